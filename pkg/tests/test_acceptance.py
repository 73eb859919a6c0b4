"""One test per acceptance criterion. Each result line is also collected for
the terminal summary (see conftest.py)."""
import pytest

from legendre_spectra.acceptance import CHECKS, run_check

RESULT_LINES = {}


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(number):
    result = run_check(number)
    RESULT_LINES[number] = result.line()
    print(result.line())
    assert result.passed, result.line()
