import time
import warnings

import pytest

from hpquad import get_tables, run_benchmarks


@pytest.fixture(scope="session")
def tables():
    return get_tables(15)


@pytest.fixture(scope="session")
def bench_report():
    """One full benchmark run with the Simpson baseline, shared by the
    acceptance tests.

    f5 legitimately warns about its floor-width forced accept, so the
    warning is silenced here; the acceptance tests assert the counter
    instead.  Returns (report, wall_seconds).
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        t0 = time.perf_counter()
        report = run_benchmarks(compare_simpson=True)
        elapsed = time.perf_counter() - t0
    return report, elapsed
