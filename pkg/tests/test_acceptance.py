"""Full-scale acceptance suite: one test per bundled criterion.

Each test prints its PASS/FAIL line (visible with `pytest -s` or in the
captured output of a failing run).  Criterion 4's growth check may flag a
conjecture-relevant anomaly without failing; everything else is exact.
"""

import pytest

from finitude.selftest import FULL, _CRITERIA

WORKERS = 2


def _run(index):
    result = _CRITERIA[index](FULL, WORKERS)
    word = "PASS" if result.passed else "FAIL"
    print(f"{word} criterion {index}: {result.title} -- {result.detail}")
    for note in result.anomalies:
        print(f"  note: {note}")
    return result


@pytest.mark.parametrize(
    "index",
    [
        pytest.param(1, id="normalization-partition"),
        pytest.param(2, id="squarefree-exactness"),
        pytest.param(3, id="prime-finite-case"),
        pytest.param(4, id="dickson-evidence"),
        pytest.param(5, id="boundary-fidelity"),
        pytest.param(6, id="arithmetic-kernel"),
        pytest.param(7, id="symmetry-and-trapped-sets"),
        pytest.param(8, id="decide-vs-direct"),
        pytest.param(9, id="determinism"),
    ],
)
def test_criterion(index):
    result = _run(index)
    assert result.passed, result.detail
