"""Cross-engine acceptance suite, one test per criterion.

Criteria 7a and 10 are expected to fail; see the README.
"""
import pytest

from cascade_entanglement.validation import CHECKS

from conftest import ACCEPTANCE_RESULTS


@pytest.mark.slow
@pytest.mark.parametrize("key", list(CHECKS))
def test_criterion(key):
    result = CHECKS[key]()
    ACCEPTANCE_RESULTS[key] = result
    print(result.line())
    assert result.passed, result.line()
