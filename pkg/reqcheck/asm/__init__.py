from reqcheck.asm.rules import Cond, NamedRule, Par, RuleRef, Skip, Switch, SwitchArm, Update
from reqcheck.asm.translate import translate_machine, translate_rule
