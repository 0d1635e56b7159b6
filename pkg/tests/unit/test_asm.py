"""Unit tests for ASM rules: translation, direct update semantics and the one-step oracle."""

import pytest
from hypothesis import given, settings, strategies as st

from reqcheck.asm import (
    Cond, NamedRule, Par, RuleRef, Skip, Switch, SwitchArm, Update, translate_machine, translate_rule,
)
from reqcheck.asm.oracle import apply_asm, check_one_step
from reqcheck.asm.rules import rule_references
from reqcheck.config import VerifyConfig
from reqcheck.core.ast import (
    Assign, AttrRef, Binary, BinaryOp, Call, Case, If, Literal, LocalAssign,
    LocalDecl, LocalRef, Sequence, Symbol,
)
from reqcheck.core.state import PlantState
from reqcheck.errors import ConflictingUpdateError, TranslationError, UnsupportedLocationError
from reqcheck.frontend import parse_model
from reqcheck.verifier import Interpreter
from reqcheck.verifier.outcomes import Completed

SMALL = parse_model("""\
model small
attribute x : 0 .. 3
attribute y : 0 .. 3
attribute mode : {idle, busy}
ghost attribute duration : 0 .. 100
""")

X, Y = AttrRef("x"), AttrRef("y")


def _lit(v):
    return Literal(v)


def _state(**values):
    values.setdefault("duration", 0)
    return PlantState({k: Symbol(v) if isinstance(v, str) else v for k, v in values.items()})


def _run(rule, initial, extra_rules=()):
    named = [NamedRule("r", rule)] + list(extra_rules)
    model = SMALL.with_routines(translate_machine(named, None, SMALL))
    outcome = Interpreter(model, VerifyConfig(), check_domains=False).run("r", initial)
    assert isinstance(outcome, Completed)
    return outcome.final


@pytest.mark.unit
class TestTranslateRule:
    def test_single_update_is_an_assignment(self):
        assert translate_rule(Update("x", _lit(1)), SMALL) == Assign("x", _lit(1))

    def test_parallel_block_uses_intermediate_locals(self):
        par = Par((Update("x", Y), Update("y", X)))
        stmt = translate_rule(par, SMALL)
        assert isinstance(stmt, Sequence)
        assert stmt.body == (
            LocalDecl("x_intermediate", SMALL.attribute("x").domain),
            LocalDecl("y_intermediate", SMALL.attribute("y").domain),
            LocalAssign("x_intermediate", Y),
            LocalAssign("y_intermediate", X),
            Assign("x", LocalRef("x_intermediate")),
            Assign("y", LocalRef("y_intermediate")),
        )

    def test_intermediate_names_avoid_attributes(self):
        model = parse_model("""\
model clash
attribute x : 0 .. 3
attribute y : 0 .. 3
attribute x_intermediate : 0 .. 3
ghost attribute duration : 0 .. 100
""")
        stmt = translate_rule(Par((Update("x", Y), Update("y", X))), model)
        assert stmt.body[0].name == "x_intermediate_2"

    def test_single_member_parallel_block_is_an_assignment(self):
        assert translate_rule(Par((Update("x", _lit(2)), Skip())), SMALL) == Assign("x", _lit(2))

    def test_conflicting_updates(self):
        with pytest.raises(ConflictingUpdateError):
            translate_rule(Par((Update("x", _lit(1)), Update("x", _lit(2)))), SMALL)

    def test_identical_updates_are_consistent(self):
        assert translate_rule(Par((Update("x", _lit(1)), Update("x", _lit(1)))), SMALL) == Assign("x", _lit(1))

    def test_nary_location_rejected(self):
        with pytest.raises(UnsupportedLocationError):
            translate_rule(Update("f", _lit(0), (X,)), SMALL)

    def test_conditional_inside_parallel_block_is_distributed(self):
        guard = Binary(BinaryOp.EQ, X, _lit(0))
        par = Par((Cond(guard, Update("x", _lit(1))), Update("y", _lit(2))))
        stmt = translate_rule(par, SMALL)
        assert isinstance(stmt, If)
        (g, then_body), = stmt.branches
        assert g == guard
        assert [type(s).__name__ for s in then_body] == ["LocalDecl", "LocalDecl", "LocalAssign",
                                                         "LocalAssign", "Assign", "Assign"]
        assert stmt.else_body == (Assign("y", _lit(2)),)

    def test_switch_inside_parallel_block_keeps_the_rest_as_default(self):
        switch = Switch("mode", (SwitchArm("idle", Update("mode", _lit(Symbol("busy")))),))
        stmt = translate_rule(Par((switch, Update("x", _lit(3)))), SMALL)
        assert isinstance(stmt, Case)
        assert stmt.default == (Assign("x", _lit(3)),)

    def test_switch_becomes_case(self):
        switch = Switch("mode", (SwitchArm("idle", Update("x", _lit(1))),), Skip())
        stmt = translate_rule(switch, SMALL)
        assert stmt == Case("mode", (stmt.arms[0],), ())
        assert stmt.arms[0].body == (Assign("x", _lit(1)),)

    def test_reference_outside_parallel_block_is_a_call(self):
        assert translate_rule(RuleRef("step"), SMALL, {"step": NamedRule("step", Skip())}) == Call("step")

    def test_undeclared_reference(self):
        with pytest.raises(TranslationError):
            translate_rule(RuleRef("nowhere"), SMALL)


@pytest.mark.unit
class TestTranslateMachine:
    def test_references_inside_parallel_blocks_are_inlined(self):
        rules = [NamedRule("bump", Update("x", _lit(1))),
                 NamedRule("both", Par((RuleRef("bump"), Update("y", X))))]
        routines = translate_machine(rules, "both", SMALL)
        both = routines[1]
        assert not any(isinstance(s, Call) for s in both.body)
        assert _run(rules[1].body, _state(x=3, y=0, mode="idle"), rules[:1])["y"] == 3

    def test_cyclic_references(self):
        rules = [NamedRule("a", RuleRef("b")), NamedRule("b", Par((RuleRef("a"),)))]
        with pytest.raises(TranslationError, match="cyclic"):
            translate_machine(rules, None, SMALL)

    def test_dangling_reference_and_duplicates(self):
        with pytest.raises(TranslationError, match="undeclared"):
            translate_machine([NamedRule("a", RuleRef("b"))], None, SMALL)
        with pytest.raises(TranslationError, match="declared twice"):
            translate_machine([NamedRule("a", Skip()), NamedRule("a", Skip())], None, SMALL)

    def test_missing_main_rule(self):
        with pytest.raises(TranslationError, match="main rule"):
            translate_machine([NamedRule("a", Skip())], "main", SMALL)

    def test_lgs_rules_reference_each_other(self, lgs_parsed):
        main = next(r for r in lgs_parsed.rules if r.name == "main")
        assert rule_references(main.body) == ["retraction_sequence", "extension_sequence"]


@pytest.mark.unit
class TestApplyAsm:
    def test_parallel_swap(self):
        after = apply_asm(Par((Update("x", Y), Update("y", X))), _state(x=1, y=2, mode="idle"))
        assert (after["x"], after["y"]) == (2, 1)

    def test_inconsistent_update_set(self):
        par = Par((Update("x", X), Update("x", Y)))
        with pytest.raises(ConflictingUpdateError):
            apply_asm(par, _state(x=1, y=2, mode="idle"))
        assert apply_asm(par, _state(x=2, y=2, mode="idle"))["x"] == 2

    def test_gcd_iterates_to_a_fixpoint(self, gcd_path):
        gcd_rule = parse_model(gcd_path.read_text(encoding="utf-8")).rules[0].body
        state = PlantState({"a": 12, "b": 8, "duration": 0})
        seen = []
        for _ in range(4):
            state = apply_asm(gcd_rule, state)
            seen.append((state["a"], state["b"]))
        assert seen == [(8, 4), (4, 4), (4, 0), (4, 0)]

    def test_translated_gcd_step_matches(self, gcd_model):
        interpreter = Interpreter(gcd_model, VerifyConfig(), check_domains=False)
        outcome = interpreter.run("gcd_step", PlantState({"a": 12, "b": 8, "duration": 0}))
        assert outcome.final.as_dict() == {"a": 8, "b": 4, "duration": 0}


@pytest.mark.unit
class TestOracle:
    def test_lgs_rules_agree_with_translation(self, lgs_model, lgs_parsed):
        report = check_one_step(lgs_model, lgs_parsed.rules)
        assert report.clean
        assert report.compared == 5 * 32

    def test_gcd_rule_agrees_with_translation(self, gcd_model, gcd_path):
        rules = parse_model(gcd_path.read_text(encoding="utf-8")).rules
        report = check_one_step(gcd_model, rules)
        assert report.clean
        assert report.compared == 13 * 13

    def test_mismatch_is_reported(self, gcd_model, gcd_path):
        rules = parse_model(gcd_path.read_text(encoding="utf-8")).rules
        wrong = [NamedRule("gcd_step", Par((Update("a", AttrRef("b")), Update("b", AttrRef("a")))))]
        states = [PlantState({"a": 12, "b": 8, "duration": 0})]
        report = check_one_step(gcd_model, wrong, states)
        assert not report.clean
        assert "expected [a=8, b=12, duration=0], got [a=8, b=4, duration=0]" in str(report.mismatches[0])
        assert rules[0].name == "gcd_step"

    def test_rule_without_routine(self, gcd_model):
        with pytest.raises(TranslationError):
            check_one_step(gcd_model, [NamedRule("other", Skip())])


_ints = st.one_of(
    st.integers(min_value=0, max_value=3).map(Literal),
    st.sampled_from([X, Y]),
    st.builds(lambda a, b: Binary(BinaryOp.ADD, a, b), st.sampled_from([X, Y]), st.integers(0, 2).map(Literal)),
    st.builds(lambda a, b: Binary(BinaryOp.MAX, a, b), st.sampled_from([X, Y]), st.sampled_from([X, Y])),
)
_guards = st.builds(lambda op, a, k: Binary(op, a, Literal(k)),
                    st.sampled_from([BinaryOp.EQ, BinaryOp.LE, BinaryOp.GT]),
                    st.sampled_from([X, Y]), st.integers(0, 3))
_updates = st.one_of(
    st.builds(Update, st.sampled_from(["x", "y"]), _ints),
    st.builds(Update, st.just("mode"), st.sampled_from(["idle", "busy"]).map(lambda s: Literal(Symbol(s)))),
)


def _compound(children):
    return st.one_of(
        st.lists(children, min_size=1, max_size=3).map(lambda rs: Par(tuple(rs))),
        st.builds(Cond, _guards, children, st.none() | children),
        st.builds(lambda r, d: Switch("mode", (SwitchArm("idle", r),), d), children, st.none() | children),
    )


rules = st.recursive(st.one_of(_updates, st.just(Skip())), _compound, max_leaves=6)
initial_states = st.builds(
    lambda x, y, mode: _state(x=x, y=y, mode=mode),
    st.integers(0, 3), st.integers(0, 3), st.sampled_from(["idle", "busy"]),
)


@pytest.mark.property
class TestTranslationOracleProperty:
    @settings(max_examples=500, deadline=None)
    @given(rules, initial_states)
    def test_translation_agrees_with_update_semantics(self, rule, initial):
        try:
            routines = translate_machine([NamedRule("r", rule)], None, SMALL)
        except ConflictingUpdateError:
            return
        model = SMALL.with_routines(routines)
        outcome = Interpreter(model, VerifyConfig(), check_domains=False).run("r", initial)
        assert outcome.final.values == apply_asm(rule, initial).values
