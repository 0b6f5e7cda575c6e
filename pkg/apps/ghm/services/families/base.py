# apps/ghm/services/families/base.py
from __future__ import annotations

import logging
import warnings
from typing import List, Optional

from apps.ghm.services.errors import (
    GeneratorUnavailable,
    IndexOutOfRange,
    NotApplicable,
    NotPositiveDefinite,
    UncertifiedBoundWarning,
)
from apps.ghm.services.exact_arith import ComplexRational
from apps.ghm.services.gram_engine import (
    Erratum,
    LowerBound,
    OrthoSystemSpec,
    build_G,
    build_H,
    connection_matrix,
    gram_inverse,
    lower_bound,
)
from apps.ghm.services.matrix_core import ExactMatrix

log = logging.getLogger(__name__)


def check_index(n: int, j: int, k: int) -> None:
    if n < 0 or not (0 <= j <= n and 0 <= k <= n):
        raise IndexOutOfRange(f"entry ({j}, {k}) outside order {n}")


def bound_from_den(den, prec: int, certified: bool, family: str) -> LowerBound:
    """Closed-form bound; outside the positive-definite regime it is reported uncertified."""
    if den <= 0:
        raise NotPositiveDefinite(f"{family}: bound denominator is not positive")
    if certified:
        return lower_bound(den, prec)
    note = "parameters outside the positive-definite regime"
    log.warning("[%s] closed bound not certified: %s", family, note)
    warnings.warn(f"{family}: {note}", UncertifiedBoundWarning, stacklevel=3)
    return lower_bound(den, prec, certified=False, note=note)


class Family:
    """
    One generalized Hilbert matrix family bound to its parameters. Subclasses
    provide the generators and closed forms; the CLI only talks to this API.
    """

    name = "family"
    hermitian = True

    def __init__(self, params):
        self.params = params
        self._system: Optional[OrthoSystemSpec] = None

    # -- generators --
    def build_system(self) -> OrthoSystemSpec:
        raise NotImplementedError

    @property
    def system(self) -> OrthoSystemSpec:
        if self._system is None:
            self._system = self.build_system()
        return self._system

    def gram_system(self) -> OrthoSystemSpec:
        return self.system.gram_system()

    def check_order(self, n: int) -> None:
        try:
            self.system.check_order(n)
        except GeneratorUnavailable as e:
            raise IndexOutOfRange(str(e)) from e

    # -- matrices --
    def entry(self, j: int, k: int) -> ComplexRational:
        raise NotApplicable(f"{self.name}: no closed entry formula")

    def has_entry_formula(self) -> bool:
        return self.system.entry is not None

    def matrix(self, n: int) -> ExactMatrix:
        """H_n from the entry formula when there is one, else from the Gram identity."""
        self.check_order(n)
        if self.has_entry_formula():
            return ExactMatrix.from_function(n + 1, self.entry)
        return build_H(self.system, n)

    def gram_matrix(self, n: int) -> ExactMatrix:
        self.check_order(n)
        return build_G(self.system, n)

    def connection(self, n: int) -> ExactMatrix:
        return connection_matrix(self.system, n)

    # -- closed forms --
    def closed_det(self, n: int) -> ComplexRational:
        raise NotImplementedError

    def closed_inverse_entry(self, n: int, j: int, k: int) -> ComplexRational:
        raise NotImplementedError

    def closed_inverse(self, n: int) -> ExactMatrix:
        self.check_order(n)
        return ExactMatrix.from_function(n + 1, lambda j, k: self.closed_inverse_entry(n, j, k))

    def closed_bound(self, n: int, prec: int) -> LowerBound:
        raise NotApplicable(f"{self.name}: no closed-form eigenvalue bound")

    def gram_inverse(self, n: int) -> ExactMatrix:
        return gram_inverse(self.system, n)

    # -- regimes and defaults --
    def pd_mode(self) -> bool:
        return True

    def default_z0(self) -> Optional[ComplexRational]:
        return None

    def printed_errata(self, n: int, prec: int) -> List[Erratum]:
        return []
