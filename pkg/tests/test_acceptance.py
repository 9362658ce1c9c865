"""The eleven acceptance criteria, each at its stated tolerance.

Every criterion prints one ``[PASS]``/``[FAIL]`` line; the lines are also
collected and repeated in the terminal summary.
"""

import pytest

from bergman_lab.acceptance import CRITERIA

RESULTS = []


@pytest.mark.acceptance
@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 12)])
def test_criterion(criterion):
    result = criterion()
    RESULTS.append(result)
    print(result.line())
    assert result.passed, result.line()
