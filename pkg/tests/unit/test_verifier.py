"""Unit tests for the verification engine, verdicts and reports."""

from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import SimpleSpanProcessor
from opentelemetry.sdk.trace.export.in_memory_span_exporter import InMemorySpanExporter
from opentelemetry.trace import StatusCode
from prometheus_client import REGISTRY

from reqcheck.config import VerifyConfig
from reqcheck.core.ast import Assume, Symbol
from reqcheck.core.state import PlantState
from reqcheck.errors import (
    DomainViolationError, DurationCapExceeded, EnumerationInfeasibleError,
    IllFormedModelError, PatternError, VerificationError,
)
from reqcheck.frontend import parse_expression, parse_model
from reqcheck.lgs import LgsVariant, build_model
from reqcheck.verifier import (
    ExitStatus, Interpreter, OutcomeKind, VerdictResult, aggregate_exit_status,
    check_all, check_requirement, enumerate_initial_states, execute_routine,
    worst_case_duration,
)
from reqcheck.verifier import reference
from reqcheck.verifier.outcomes import (
    AssertFailed, AssumeViolated, BoundExceeded, Completed, Diverged, aggregate, exit_status,
)
from reqcheck.verifier.report import CheckReport, VerdictReport, check_report, verdict_report

COUNTER = parse_model("""\
model counter
attribute phase : {idle, busy}
attribute n : 0 .. 4
ghost attribute duration : 0 .. 10000

routine main do
  if n < 4 then
    n := n + 1
  end
end

routine tick assumption do
  main
  duration := duration + 2
end

-- reaches four within eight time units
routine count_up requirement do
  from
    tick
  until
    n = 4 or duration - old duration > 8
  loop
    tick
  end
  assert n = 4 end
  assert duration - old duration <= 8 end
end

routine stay_idle requirement do
  from
    main
  until
    phase = busy
  loop
    main
  end
  assert True end
end

routine only_busy requirement do
  assume phase = busy end
  main
  assert n >= 1 end
end

routine overflow requirement do
  n := n + 1
  assert True end
end

routine slow requirement do
  duration := duration + 6000
  duration := duration + 6000
  assert True end
end
""")


def _state(**values):
    values.setdefault("duration", 0)
    return PlantState({k: Symbol(v) if isinstance(v, str) else v for k, v in values.items()})


LGS = build_model(LgsVariant.CORRECT)
LGS_ERRONEOUS = build_model(LgsVariant.ERRONEOUS)

lgs_conditions = st.sampled_from([
    parse_expression(f"{attr.name} = {value}", LGS)
    for attr in LGS.attributes if attr.name != "duration"
    for value in attr.domain.values
])


def _all_outcomes(model):
    for requirement in model.requirements():
        for state in enumerate_initial_states(model):
            yield state, execute_routine(model, requirement, state)


@pytest.mark.unit
class TestInitialStates:
    def test_product_of_domains_last_attribute_fastest(self):
        states = enumerate_initial_states(COUNTER)
        assert len(states) == 10
        assert states[0].as_dict() == {"phase": "idle", "n": 0, "duration": 0}
        assert states[1].as_dict() == {"phase": "idle", "n": 1, "duration": 0}
        assert states[5].as_dict() == {"phase": "busy", "n": 0, "duration": 0}

    def test_lgs_has_32_initial_states(self, lgs_model):
        states = enumerate_initial_states(lgs_model)
        assert len(states) == 32
        assert all(s.duration == 0 for s in states)

    def test_enumeration_limit(self):
        with pytest.raises(EnumerationInfeasibleError):
            enumerate_initial_states(COUNTER, VerifyConfig(max_initial_states=9))


@pytest.mark.unit
class TestInterpreter:
    def test_completed_run_and_trace(self):
        outcome = execute_routine(COUNTER, "tick", _state(phase="idle", n=1))
        assert isinstance(outcome, Completed)
        assert outcome.final.as_dict() == {"phase": "idle", "n": 2, "duration": 2}
        assert [step.statement for step in outcome.trace] == ["main", "n := n + 1", "duration := duration + 2"]

    def test_initial_state_is_untouched(self):
        initial = _state(phase="idle", n=1)
        execute_routine(COUNTER, "tick", initial)
        assert initial["n"] == 1

    def test_false_assume_ends_the_run(self):
        outcome = execute_routine(COUNTER, "only_busy", _state(phase="idle", n=0))
        assert isinstance(outcome, AssumeViolated)
        assert outcome.routine == "only_busy"
        assert outcome.at.line == 42

    def test_failed_assert(self):
        outcome = execute_routine(COUNTER, "only_busy", _state(phase="busy", n=4))
        assert isinstance(outcome, Completed)
        failing = parse_model(
            "model m\nattribute n : 0 .. 1\nghost attribute duration : 0 .. 9\n"
            "routine main do\n  n := 0\nend\n"
            "routine r requirement do\n  main\n  assert n = 1 end\nend\n")
        outcome = execute_routine(failing, "r", _state(n=1))
        assert isinstance(outcome, AssertFailed)
        assert outcome.kind is OutcomeKind.ASSERT_FAILED
        assert outcome.trace[-1].statement == "assert n = 1 end"

    def test_loop_reaches_its_exit(self):
        outcome = execute_routine(COUNTER, "count_up", _state(phase="idle", n=0))
        assert isinstance(outcome, Completed)
        assert outcome.final.duration == 8

    def test_loop_bound_counts_the_from_part(self):
        # n = 0 needs four executions of tick: one from `from`, three from the body
        assert isinstance(execute_routine(COUNTER, "count_up", _state(phase="idle", n=0),
                                          VerifyConfig(unroll_bound=4)), Completed)
        outcome = execute_routine(COUNTER, "count_up", _state(phase="idle", n=0), VerifyConfig(unroll_bound=3))
        assert isinstance(outcome, BoundExceeded)
        assert outcome.routine == "count_up"

    def test_repeated_state_in_a_loop_diverges(self):
        outcome = execute_routine(COUNTER, "stay_idle", _state(phase="idle", n=2))
        assert isinstance(outcome, Diverged)
        assert outcome.repeated_state.as_dict() == {"phase": "idle", "n": 4, "duration": 0}

    def test_divergence_without_steps_still_has_a_trace(self):
        model = parse_model(
            "model m\nattribute n : 0 .. 3\nghost attribute duration : 0 .. 9\n"
            "routine main do\n  n := 0\nend\n"
            "routine r requirement do\n  from\n  until n = 3 loop\n  end\n  assert True end\nend\n")
        initial = _state(n=0)
        outcome = execute_routine(model, "r", initial)
        assert isinstance(outcome, Diverged)
        (step,) = outcome.trace
        assert step.state_before.values == initial.values
        assert step.state_after.values == initial.values
        assert step.routine == "r"

    def test_without_cycle_detection_the_bound_applies(self):
        outcome = execute_routine(COUNTER, "stay_idle", _state(phase="idle", n=2),
                                  VerifyConfig(detect_cycles=False, unroll_bound=10))
        assert isinstance(outcome, BoundExceeded)

    def test_domain_violation(self):
        with pytest.raises(DomainViolationError):
            execute_routine(COUNTER, "overflow", _state(phase="idle", n=4))

    def test_domain_checks_can_be_turned_off(self):
        outcome = Interpreter(COUNTER, check_domains=False).run("overflow", _state(phase="idle", n=4))
        assert outcome.final["n"] == 5

    def test_duration_cap(self):
        with pytest.raises(DurationCapExceeded):
            execute_routine(COUNTER, "slow", _state(phase="idle", n=0))

    def test_visited_states_accumulate(self):
        interpreter = Interpreter(COUNTER)
        interpreter.run("tick", _state(phase="idle", n=0))
        interpreter.run("tick", _state(phase="idle", n=0))
        assert len(interpreter.visited) == 3


@pytest.mark.unit
class TestCheckRequirement:
    def test_pass_fail_and_counterexamples(self, toy_model):
        passing = check_requirement(toy_model, "lamp_lit_when_on")
        assert passing.result is VerdictResult.PASS
        assert passing.outcome_counts() == {"assume_violated": 8, "completed": 8}

        failing = check_requirement(toy_model, "lamp_always_lit")
        assert failing.result is VerdictResult.FAIL
        examples = failing.counterexamples()
        assert len(examples) == 8
        assert all(state["switch"] == Symbol("off") for state, _ in examples)

    def test_outcome_for(self, toy_model):
        verdict = check_requirement(toy_model, "lamp_always_lit")
        assert isinstance(verdict.outcome_for(switch="off", lamp="lit", level=3), AssertFailed)
        assert verdict.outcome_for(switch="sideways") is None

    def test_unknown_from_a_small_bound(self):
        verdict = check_requirement(COUNTER, "count_up", VerifyConfig(unroll_bound=2))
        assert verdict.result is VerdictResult.UNKNOWN

    def test_worst_case_duration(self):
        assert worst_case_duration(COUNTER, "count_up") == 8

    def test_worst_case_duration_needs_a_timed_obligation(self, toy_model):
        with pytest.raises(PatternError):
            worst_case_duration(toy_model, "lamp_lit_when_on")

    def test_worst_case_duration_needs_a_pass(self):
        with pytest.raises(VerificationError):
            worst_case_duration(COUNTER, "count_up", VerifyConfig(unroll_bound=2))

    def test_only_requirements_can_be_checked(self, toy_model):
        with pytest.raises(VerificationError, match="not a requirement"):
            check_requirement(toy_model, "run_switched_on")
        with pytest.raises(VerificationError, match="no routine"):
            check_requirement(toy_model, "nothing")

    def test_ill_formed_model_is_rejected(self):
        model = parse_model("model m\nattribute n : 0 .. 1\nroutine main do\n  n := 0\nend\n")
        with pytest.raises(IllFormedModelError):
            check_requirement(model, "main")

    def test_execution_errors_carry_the_initial_state(self):
        with pytest.raises(VerificationError, match="DomainViolationError") as info:
            check_requirement(COUNTER, "overflow")
        assert info.value.initial_state == {"phase": "idle", "n": 4, "duration": 0}
        with pytest.raises(DurationCapExceeded) as info:
            check_requirement(COUNTER, "slow")
        assert info.value.initial_state == {"phase": "idle", "n": 0, "duration": 0}

    def test_check_all_in_model_order(self, toy_model):
        verdicts = check_all(toy_model)
        assert [v.requirement for v in verdicts] == ["lamp_lit_when_on", "lamp_always_lit"]
        assert aggregate_exit_status(verdicts) is ExitStatus.FAIL
        only = check_all(toy_model, names=["lamp_lit_when_on"])
        assert [v.requirement for v in only] == ["lamp_lit_when_on"]
        assert aggregate_exit_status(only) is ExitStatus.PASS

    def test_check_all_rejects_unknown_names(self, toy_model):
        with pytest.raises(VerificationError):
            check_all(toy_model, names=["lamp_lit_when_on", "typo"])

    def test_workers_do_not_change_the_verdict(self, lgs_erroneous):
        single = check_requirement(lgs_erroneous, "extension_duration", VerifyConfig(workers=1))
        pooled = check_requirement(lgs_erroneous, "extension_duration", VerifyConfig(workers=4))
        assert list(single.per_state) == list(pooled.per_state)
        assert [o.kind for o in single.per_state.values()] == [o.kind for o in pooled.per_state.values()]
        assert single.states_explored == pooled.states_explored

    def test_metrics_are_recorded(self, toy_model):
        before = REGISTRY.get_sample_value("reqcheck_verdicts_total", {"result": "fail"}) or 0
        check_requirement(toy_model, "lamp_always_lit")
        after = REGISTRY.get_sample_value("reqcheck_verdicts_total", {"result": "fail"})
        assert after == before + 1


@pytest.mark.unit
class TestAggregation:
    def test_aggregate(self):
        K = OutcomeKind
        assert aggregate([K.COMPLETED, K.ASSUME_VIOLATED]) is VerdictResult.PASS
        assert aggregate([K.COMPLETED, K.BOUND_EXCEEDED]) is VerdictResult.UNKNOWN
        assert aggregate([K.BOUND_EXCEEDED, K.DIVERGED]) is VerdictResult.FAIL
        assert aggregate([K.ASSERT_FAILED]) is VerdictResult.FAIL
        assert aggregate([]) is VerdictResult.PASS

    def test_exit_status(self):
        assert [exit_status(r) for r in VerdictResult] == [ExitStatus.PASS, ExitStatus.FAIL, ExitStatus.UNKNOWN]
        assert int(ExitStatus.ERROR) == 3


@pytest.mark.unit
class TestReferenceSimulator:
    @pytest.mark.parametrize("bound", [2, 5, 6, 64])
    def test_engine_agrees_with_reference_on_lgs(self, lgs_model, lgs_erroneous, bound):
        config = VerifyConfig(unroll_bound=bound)
        for model in (lgs_model, lgs_erroneous):
            for requirement in model.requirements():
                for state in enumerate_initial_states(model):
                    expected = reference.simulate(model, requirement.name, state.values, unroll_bound=bound)
                    outcome = execute_routine(model, requirement, state, config)
                    assert outcome.kind.value == expected.kind, (requirement.name, state.describe())
                    if isinstance(outcome, Completed):
                        assert outcome.final.values == expected.final


@pytest.mark.unit
class TestReports:
    def test_verdict_report_schema(self, lgs_erroneous):
        verdict = check_requirement(lgs_erroneous, "extension_duration")
        report = verdict_report(verdict, include_trace=True)
        assert report.result == "fail"
        assert len(report.counterexamples) == 1
        example = report.counterexamples[0]
        assert example.kind == "diverged"
        assert example.initial_state == {"handle_status": "down_position", "door_status": "closing_state",
                                         "gear_status": "retracted_position", "duration": 0}
        assert example.trace
        assert VerdictReport.model_validate_json(report.model_dump_json()) == report

    def test_counterexamples_are_capped(self, toy_model):
        verdict = check_requirement(toy_model, "lamp_always_lit")
        assert len(verdict_report(verdict).counterexamples) == 3
        assert len(verdict_report(verdict, max_counterexamples=10).counterexamples) == 8
        assert verdict_report(verdict).counterexamples[0].trace == []

    def test_check_report_round_trip(self, toy_model):
        report = check_report("toy", check_all(toy_model))
        assert CheckReport.model_validate_json(report.model_dump_json()) == report
        assert [v.requirement for v in report.verdicts] == ["lamp_lit_when_on", "lamp_always_lit"]

    def test_schema_forbids_extra_fields(self):
        with pytest.raises(ValueError):
            VerdictReport.model_validate({"requirement": "r", "result": "pass", "states_explored": 0,
                                          "max_duration_delta": 0, "counterexamples": [], "extra": 1})


@pytest.mark.unit
class TestTracing:
    @pytest.fixture
    def spans(self, mocker):
        exporter = InMemorySpanExporter()
        provider = TracerProvider()
        provider.add_span_processor(SimpleSpanProcessor(exporter))
        mocker.patch("reqcheck.verifier.engine.tracer", provider.get_tracer("test"))
        return exporter

    def test_check_opens_a_span_per_requirement(self, toy_model, spans):
        check_all(toy_model)
        finished = spans.get_finished_spans()
        assert [s.name for s in finished] == ["check_requirement", "check_requirement"]
        assert finished[1].attributes["reqcheck.requirement"] == "lamp_always_lit"
        assert finished[1].attributes["reqcheck.result"] == "fail"
        assert finished[0].status.status_code is StatusCode.OK

    def test_aborted_check_marks_the_span(self, spans):
        with pytest.raises(VerificationError):
            check_requirement(COUNTER, "overflow")
        (span,) = spans.get_finished_spans()
        assert span.status.status_code is StatusCode.ERROR


@pytest.mark.property
class TestTraceProperties:
    @pytest.mark.parametrize("model", [LGS, LGS_ERRONEOUS], ids=["correct", "erroneous"])
    def test_traces_chain_and_time_never_decreases(self, model):
        for initial, outcome in _all_outcomes(model):
            trace = outcome.trace
            if outcome.kind in (OutcomeKind.ASSERT_FAILED, OutcomeKind.DIVERGED):
                assert trace
            if not trace:
                continue
            assert trace[0].state_before.values == initial.values
            for step in trace:
                assert step.state_after.duration >= step.state_before.duration
            for earlier, later in zip(trace, trace[1:]):
                assert earlier.state_after.values == later.state_before.values

    @settings(max_examples=25, deadline=None)
    @given(st.lists(lgs_conditions, min_size=1, max_size=3))
    def test_extra_assumptions_never_turn_pass_into_fail(self, conditions):
        for requirement in LGS.requirements():
            narrowed = replace(requirement, body=tuple(Assume(c) for c in conditions) + requirement.body)
            verdict = check_requirement(LGS.replace_routine(narrowed), requirement.name)
            assert verdict.result is VerdictResult.PASS, requirement.name

    @pytest.mark.parametrize("workers", [1, 4])
    def test_verdicts_are_deterministic_down_to_the_trace(self, workers):
        config = VerifyConfig(workers=workers)
        first = check_all(LGS_ERRONEOUS)
        second = check_all(LGS_ERRONEOUS, config=config)
        assert [v.result for v in first] == [v.result for v in second]
        for a, b in zip(first, second):
            assert list(a.per_state) == list(b.per_state)
            assert a.per_state == b.per_state
            assert a.states_explored == b.states_explored
            assert a.max_duration_delta == b.max_duration_delta
