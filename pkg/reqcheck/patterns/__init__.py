from reqcheck.patterns.instance import PatternInstance, PatternKind
from reqcheck.patterns.synth import match, synth
