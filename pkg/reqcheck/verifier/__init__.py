from reqcheck.verifier.engine import (
    Interpreter, aggregate_exit_status, check_all, check_requirement,
    enumerate_initial_states, execute_routine, worst_case_duration,
)
from reqcheck.verifier.outcomes import ExitStatus, OutcomeKind, Verdict, VerdictResult
