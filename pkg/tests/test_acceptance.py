"""Every acceptance criterion at its stated tolerance, one test per criterion.

The battery runs once per session; a PASS/FAIL line per criterion is printed
in the terminal summary.
"""

import pytest

from entlaw.verify import CHECKS, RunConfig, format_result, run_all

RESULTS = {}


@pytest.fixture(scope="module")
def results():
    if not RESULTS:
        for r in run_all(RunConfig(tolerance=1e-8, seed=0)):
            RESULTS[r.number] = r
    return RESULTS


@pytest.mark.slow
@pytest.mark.parametrize("number", range(1, len(CHECKS) + 1))
def test_criterion(results, number):
    r = results[number]
    assert r.passed, format_result(r)


def acceptance_lines():
    return [format_result(RESULTS[k]) for k in sorted(RESULTS)]
