"""
Smith normal form over the discrete valuation ring Z_(p)
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple
import logging

from data.pmatrix import PMatrix
from data.plocal import INFINITY, valuation, unit_part

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SmithProfile:
    """Sorted elementary-divisor exponents; INFINITY marks a zero slot"""
    exponents: Tuple

    @property
    def finite(self) -> List[int]:
        return [e for e in self.exponents if e != INFINITY]

    @property
    def rank_defect(self) -> int:
        return sum(1 for e in self.exponents if e == INFINITY)

    @property
    def length(self) -> int:
        """Length of the torsion cokernel, sum of the positive finite exponents"""
        return sum(e for e in self.finite if e > 0)

    @property
    def max_exponent(self):
        finite = self.finite
        return max(finite) if finite else None

    def to_json(self) -> list:
        return [e if e != INFINITY else "inf" for e in self.exponents]


def _min_entry(rows: List[List[Fraction]], start: int, p: int):
    """Position of the minimal-valuation entry in the trailing block, lexicographic ties"""
    best = None
    for i in range(start, len(rows)):
        for j in range(start, len(rows[i])):
            x = rows[i][j]
            if x == 0:
                continue
            v = valuation(x, p)
            if best is None or v < best[0]:
                best = (v, i, j)
    return best


def smith_normal_form(M: PMatrix) -> Tuple[SmithProfile, PMatrix, PMatrix]:
    """Return (profile, U, V) with U*M*V = diag(p^e_i), U and V in GL(Z_(p))"""
    p = M.prime
    r, c = M.shape
    A = M.to_lists()
    U = PMatrix.identity(r, p).to_lists()
    V = PMatrix.identity(c, p).to_lists()
    exponents = []

    for t in range(min(r, c)):
        best = _min_entry(A, t, p)
        if best is None:
            exponents.extend([INFINITY] * (min(r, c) - t))
            break
        e, i, j = best
        A[t], A[i] = A[i], A[t]
        U[t], U[i] = U[i], U[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        for row in V:
            row[t], row[j] = row[j], row[t]

        scale = 1 / unit_part(A[t][t], p)
        A[t] = [x * scale for x in A[t]]
        U[t] = [x * scale for x in U[t]]
        pivot = A[t][t]

        for i2 in range(t + 1, r):
            factor = A[i2][t] / pivot
            if factor:
                A[i2] = [a - factor * b for a, b in zip(A[i2], A[t])]
                U[i2] = [a - factor * b for a, b in zip(U[i2], U[t])]
        for j2 in range(t + 1, c):
            factor = A[t][j2] / pivot
            if factor:
                for row in A:
                    row[j2] -= factor * row[t]
                for row in V:
                    row[j2] -= factor * row[t]
        exponents.append(e)

    logger.debug(f"SNF exponents at p={p}: {exponents}")
    return (SmithProfile(tuple(exponents)), PMatrix.from_rows(U, p), PMatrix.from_rows(V, p))


def smith_profile(M: PMatrix) -> SmithProfile:
    return smith_normal_form(M)[0]
