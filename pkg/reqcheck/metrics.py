import logging
from contextlib import contextmanager
from time import time

from prometheus_client import Counter, Histogram

logger = logging.getLogger(__name__)

VERDICTS = Counter("reqcheck_verdicts_total", "Requirement verdicts", ["result"])
INITIAL_STATES = Counter("reqcheck_initial_states_total", "Initial states checked", ["outcome"])
CHECK_SECONDS = Histogram("reqcheck_check_seconds", "Time to check one requirement (s)",
                          ["status"], buckets=[0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1, 5])


@contextmanager
def timed_check(requirement: str):
    """
    A context manager timing one requirement check.

    Args:
        requirement (str): The requirement being checked.
    """
    t0 = time()
    status = "ok"
    try:
        yield
    except Exception:
        status = "err"
        raise
    finally:
        elapsed = time() - t0
        CHECK_SECONDS.labels(status=status).observe(elapsed)
        logger.debug(f"Checked {requirement} in {elapsed:.4f}s ({status})")


def record_verdict(result: str, outcome_counts: dict):
    VERDICTS.labels(result=result).inc()
    for outcome, count in outcome_counts.items():
        INITIAL_STATES.labels(outcome=outcome).inc(count)
