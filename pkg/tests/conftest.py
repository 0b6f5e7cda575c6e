from fractions import Fraction

import pytest

from apps.ghm.services.matrix_core import ExactMatrix


def hilbert(size: int) -> ExactMatrix:
    return ExactMatrix.from_function(size, lambda j, k: Fraction(1, j + k + 1))


def mat(rows) -> ExactMatrix:
    return ExactMatrix([[Fraction(x) if isinstance(x, (int, str)) else x for x in row] for row in rows])


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in ("GHM_PREC", "GHM_FORMAT", "GHM_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
