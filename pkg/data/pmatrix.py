"""
PMatrix: immutable exact matrices over Q with a shared prime context.

Entries are Fractions; determinants, inverses and column spaces go through sympy
so that no step ever leaves exact rational arithmetic.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple
import logging

from sympy import Matrix, Rational as SympyRational

from data.exceptions import SizeMismatchError, SingularFormError, PrimeMismatchError
from data.plocal import (INFINITY, check_prime, valuation, format_rational, to_fraction,
                     reduce_mod, is_local)

logger = logging.getLogger(__name__)


def _to_sympy(x: Fraction) -> SympyRational:
    return SympyRational(x.numerator, x.denominator)


def _from_sympy(x) -> Fraction:
    r = SympyRational(x)
    return Fraction(int(r.p), int(r.q))


@dataclass(frozen=True)
class PMatrix:
    """Rectangular matrix of rationals; all entries share one prime"""
    entries: Tuple[Tuple[Fraction, ...], ...]
    prime: int

    def __post_init__(self):
        check_prime(self.prime)
        widths = {len(row) for row in self.entries}
        if len(widths) > 1:
            raise SizeMismatchError("rows have different lengths")

    # --- construction -----------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], p: int) -> "PMatrix":
        return cls(tuple(tuple(to_fraction(x) for x in row) for row in rows), p)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], p: int) -> "PMatrix":
        if not columns:
            raise SizeMismatchError("no columns given")
        n = len(columns[0])
        return cls.from_rows([[columns[j][i] for j in range(len(columns))] for i in range(n)], p)

    @classmethod
    def identity(cls, n: int, p: int) -> "PMatrix":
        return cls(tuple(tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)), p)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "PMatrix":
        return cls(tuple(tuple(Fraction(0) for _ in range(cols)) for _ in range(rows)), p)

    @classmethod
    def diagonal(cls, values: Sequence, p: int) -> "PMatrix":
        n = len(values)
        vals = [to_fraction(v) for v in values]
        return cls(tuple(tuple(vals[i] if i == j else Fraction(0) for j in range(n))
                         for i in range(n)), p)

    @classmethod
    def block_diagonal(cls, blocks: Sequence["PMatrix"], p: int) -> "PMatrix":
        n = sum(b.nrows for b in blocks)
        m = sum(b.ncols for b in blocks)
        rows = [[Fraction(0)] * m for _ in range(n)]
        r0 = c0 = 0
        for block in blocks:
            for i in range(block.nrows):
                for j in range(block.ncols):
                    rows[r0 + i][c0 + j] = block.entries[i][j]
            r0 += block.nrows
            c0 += block.ncols
        return cls(tuple(tuple(row) for row in rows), p)

    @classmethod
    def from_sympy(cls, m: Matrix, p: int) -> "PMatrix":
        return cls(tuple(tuple(_from_sympy(m[i, j]) for j in range(m.cols))
                         for i in range(m.rows)), p)

    # --- shape and access -------------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nrows, self.ncols

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, index: Tuple[int, int]) -> Fraction:
        i, j = index
        return self.entries[i][j]

    def row(self, i: int) -> List[Fraction]:
        return list(self.entries[i])

    def column(self, j: int) -> List[Fraction]:
        return [row[j] for row in self.entries]

    def columns(self) -> List[List[Fraction]]:
        return [self.column(j) for j in range(self.ncols)]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PMatrix":
        return PMatrix(tuple(tuple(self.entries[i][j] for j in cols) for i in rows), self.prime)

    def diagonal_entries(self) -> List[Fraction]:
        return [self.entries[i][i] for i in range(min(self.nrows, self.ncols))]

    def replace(self, i: int, j: int, value) -> "PMatrix":
        rows = [list(r) for r in self.entries]
        rows[i][j] = to_fraction(value)
        return PMatrix(tuple(tuple(r) for r in rows), self.prime)

    def to_lists(self) -> List[List[Fraction]]:
        return [list(row) for row in self.entries]

    # --- arithmetic -------------------------------------------------------

    def _check_prime(self, other: "PMatrix"):
        if other.prime != self.prime:
            raise PrimeMismatchError(f"primes {self.prime} and {other.prime} differ")

    def __matmul__(self, other: "PMatrix") -> "PMatrix":
        self._check_prime(other)
        if self.ncols != other.nrows:
            raise SizeMismatchError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.columns()
        return PMatrix(tuple(tuple(sum((a * b for a, b in zip(row, col)), Fraction(0))
                                   for col in cols) for row in self.entries), self.prime)

    def __add__(self, other: "PMatrix") -> "PMatrix":
        self._check_prime(other)
        if self.shape != other.shape:
            raise SizeMismatchError(f"cannot add {self.shape} and {other.shape}")
        return PMatrix(tuple(tuple(a + b for a, b in zip(r, s))
                             for r, s in zip(self.entries, other.entries)), self.prime)

    def __sub__(self, other: "PMatrix") -> "PMatrix":
        return self + (-other)

    def __neg__(self) -> "PMatrix":
        return self.scaled(-1)

    def scaled(self, c) -> "PMatrix":
        c = to_fraction(c)
        return PMatrix(tuple(tuple(c * a for a in row) for row in self.entries), self.prime)

    def transpose(self) -> "PMatrix":
        return PMatrix(tuple(zip(*self.entries)) if self.entries else (), self.prime)

    @property
    def T(self) -> "PMatrix":
        return self.transpose()

    def congruent(self, X: "PMatrix") -> "PMatrix":
        """X^T * self * X"""
        return X.transpose() @ self @ X

    # --- exact linear algebra via sympy -----------------------------------

    def to_sympy(self) -> Matrix:
        return Matrix(self.nrows, self.ncols,
                      [_to_sympy(x) for row in self.entries for x in row])

    def det(self) -> Fraction:
        if not self.is_square():
            raise SizeMismatchError("determinant of a non-square matrix")
        if self.nrows == 0:
            return Fraction(1)
        return _from_sympy(self.to_sympy().det(method="bareiss"))

    def inverse(self) -> "PMatrix":
        if not self.is_square():
            raise SizeMismatchError("inverse of a non-square matrix")
        if self.det() == 0:
            raise SingularFormError("matrix is singular")
        return PMatrix.from_sympy(self.to_sympy().inv(), self.prime)

    def rank(self) -> int:
        return self.to_sympy().rank()

    def column_space(self) -> "PMatrix":
        """Columns of a basis of the column space over Q"""
        basis = self.to_sympy().columnspace()
        if not basis:
            return PMatrix(tuple(() for _ in range(self.nrows)), self.prime)
        return PMatrix.from_sympy(Matrix.hstack(*basis), self.prime)

    # --- valuation data ---------------------------------------------------

    def min_valuation(self):
        vals = [valuation(x, self.prime) for row in self.entries for x in row]
        return min(vals) if vals else INFINITY

    def valuations(self) -> List[list]:
        return [[valuation(x, self.prime) for x in row] for row in self.entries]

    def is_integral(self) -> bool:
        return all(is_local(x, self.prime) for row in self.entries for x in row)

    def is_invertible_over_r(self) -> bool:
        """Integral with unit determinant, i.e. an element of GL_n(Z_(p))"""
        if not self.is_square() or not self.is_integral():
            return False
        d = self.det()
        return d != 0 and valuation(d, self.prime) == 0

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def is_diagonal(self) -> bool:
        return all(x == 0 for i, row in enumerate(self.entries)
                   for j, x in enumerate(row) if i != j)

    def is_symmetric(self, epsilon: int = 1) -> bool:
        return self == self.transpose().scaled(epsilon)

    def reduced(self, k: int) -> "PMatrix":
        """Entrywise representatives in [0, p^k); requires integral entries"""
        return PMatrix(tuple(tuple(Fraction(reduce_mod(x, self.prime, k)) for x in row)
                             for row in self.entries), self.prime)

    def residue_rows(self) -> List[List[int]]:
        return [[reduce_mod(x, self.prime, 1) for x in row] for row in self.entries]

    def congruent_mod(self, other: "PMatrix", k: int) -> bool:
        """self = other mod p^k, i.e. the difference has valuation >= k entrywise"""
        diff = self - other
        return bool(diff.min_valuation() >= k)

    def to_json(self) -> List[List[str]]:
        return [[format_rational(x) for x in row] for row in self.entries]

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(format_rational(x) for x in row) + "]"
                               for row in self.entries) + "]"
