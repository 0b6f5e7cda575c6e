# apps/ghm/services/families/synthetic.py
"""
Non-Hermitian family: u_k = x^{alpha_k} (the Muntz system) paired with
v = C u for a lower-triangular C. Then B_hat = A_hat C^-1 and H = G C^*.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from apps.ghm.services.errors import NotTriangular, ParameterError, SingularMatrix
from apps.ghm.services.exact_arith import ComplexRational, as_complex
from apps.ghm.services.families.base import Family
from apps.ghm.services.families.muntz import MuntzParams, muntz_acoef, muntz_closed_det, muntz_d2, muntz_entry
from apps.ghm.services.gram_engine import OrthoSystemSpec, recover_G
from apps.ghm.services.matrix_core import ZERO, ExactMatrix, lower_triangular_inverse

Rows = Tuple[Tuple[ComplexRational, ...], ...]


def default_connection(size: int) -> Rows:
    """diag(2, 3, ..., size + 1)"""
    return tuple(
        tuple(ComplexRational(j + 2) if j == k else ZERO for k in range(size)) for j in range(size)
    )


@dataclass(frozen=True)
class SyntheticParams:
    alphas: Tuple[ComplexRational, ...]
    connection: Rows = ()

    def __post_init__(self):
        muntz = MuntzParams(tuple(self.alphas))
        object.__setattr__(self, "alphas", muntz.alphas)
        size = len(muntz.alphas)
        rows = self.connection or default_connection(size)
        if len(rows) != size:
            raise ParameterError(f"connection needs {size} rows, got {len(rows)}")
        padded = []
        for j, row in enumerate(rows):
            row = [as_complex(x) for x in row]
            if len(row) > size:
                raise ParameterError(f"connection row {j} has more than {size} entries")
            if any(row[k] for k in range(j + 1, len(row))):
                raise NotTriangular(f"connection row {j} has entries above the diagonal")
            row += [ZERO] * (size - len(row))
            if not row[j]:
                raise SingularMatrix(f"connection diagonal c({j},{j}) vanishes")
            padded.append(tuple(row))
        object.__setattr__(self, "connection", tuple(padded))

    @property
    def muntz(self) -> MuntzParams:
        return MuntzParams(self.alphas)

    @property
    def order(self) -> int:
        return len(self.alphas) - 1

    def c(self, j: int, k: int) -> ComplexRational:
        return self.connection[j][k]

    def connection_matrix(self, n: int) -> ExactMatrix:
        return ExactMatrix.from_function(n + 1, self.c)


def synthetic_system(p: SyntheticParams) -> OrthoSystemSpec:
    muntz = p.muntz
    c_inv = lower_triangular_inverse(p.connection_matrix(p.order))

    def bcoef(n: int, k: int) -> ComplexRational:
        acc = ZERO
        for m in range(k, n + 1):
            acc = acc + muntz_acoef(muntz, n, m) * c_inv[m, k]
        return acc

    return OrthoSystemSpec(
        name="synthetic",
        acoef=lambda n, k: muntz_acoef(muntz, n, k),
        d2=lambda n: muntz_d2(muntz, n),
        c=p.c,
        same_uv=False,
        bcoef=bcoef,
        max_order=p.order,
        entry=lambda j, k: synthetic_entry(p, j, k),
    )


def synthetic_entry(p: SyntheticParams, j: int, k: int) -> ComplexRational:
    """(u_j, v_k) = sum_m conj(c_{k,m}) (u_j, u_m)"""
    muntz = p.muntz
    acc = ZERO
    for m in range(k + 1):
        acc = acc + muntz_entry(muntz, j, m) * p.c(k, m).conjugate()
    return acc


def synthetic_closed_det(p: SyntheticParams, n: int) -> ComplexRational:
    det_c = ComplexRational(1)
    for j in range(n + 1):
        det_c = det_c * p.c(j, j)
    return det_c.conjugate() * muntz_closed_det(p.muntz, n)


class SyntheticFamily(Family):
    name = "synthetic"
    hermitian = False

    def __init__(self, alphas: Sequence, connection: Optional[Sequence[Sequence]] = None):
        rows = tuple(tuple(r) for r in connection) if connection else ()
        super().__init__(SyntheticParams(tuple(alphas), rows))

    def build_system(self) -> OrthoSystemSpec:
        return synthetic_system(self.params)

    def entry(self, j: int, k: int) -> ComplexRational:
        return synthetic_entry(self.params, j, k)

    def gram_matrix(self, n: int) -> ExactMatrix:
        """G recovered from H and C."""
        self.check_order(n)
        return recover_G(self.matrix(n), self.connection(n))

    def closed_det(self, n: int) -> ComplexRational:
        self.check_order(n)
        return synthetic_closed_det(self.params, n)

    def closed_inverse_entry(self, n: int, j: int, k: int) -> ComplexRational:
        return self.closed_inverse(n)[j, k]

    def closed_inverse(self, n: int) -> ExactMatrix:
        self.check_order(n)
        return self.gram_inverse(n)

    def pd_mode(self) -> bool:
        return all(a.re > Fraction(-1, 2) for a in self.params.alphas)

    def default_z0(self) -> Optional[ComplexRational]:
        return ComplexRational(-1) if self.params.muntz.is_real() else None
