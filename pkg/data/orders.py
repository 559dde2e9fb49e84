#!/usr/bin/env python3
"""
Hereditary block orders O^[n_1..n_r] in M_N(Z_(p)) and tiled valuation patterns.

Ideals are valuation-bound matrices: entry (i, j) is the least valuation allowed
in that position. Products are min-plus products; inverses are residuals.
"""

from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple, Union
import logging
import random

from data.enums import ResidueInvolution
from data.exceptions import (SizeMismatchError, NotIdempotentError, IncompatibleIdealError,
                         UndefinedPowerError, UnsupportedDescriptorError, PreconditionError)
from data.plocal import check_prime, valuation
from data.pmatrix import PMatrix
from data import residue_field as kfield

logger = logging.getLogger(__name__)

Bounds = Tuple[Tuple[int, ...], ...]


def _as_bounds(rows: Sequence[Sequence[int]]) -> Bounds:
    return tuple(tuple(int(x) for x in row) for row in rows)


@dataclass(frozen=True)
class ValuationIdeal:
    """Full R-lattice in M_N(Q_p) given by entrywise valuation bounds"""
    bounds: Bounds

    def __post_init__(self):
        object.__setattr__(self, 'bounds', _as_bounds(self.bounds))
        n = len(self.bounds)
        if any(len(row) != n for row in self.bounds):
            raise SizeMismatchError("bound matrix must be square")

    @property
    def size(self) -> int:
        return len(self.bounds)

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self.bounds[i][j]

    def __mul__(self, other: "ValuationIdeal") -> "ValuationIdeal":
        return ideal_multiply(self, other)

    def is_contained_in(self, other: "ValuationIdeal") -> bool:
        """self ⊆ other, i.e. every bound of self is at least the bound of other"""
        return all(a >= b for r, s in zip(self.bounds, other.bounds) for a, b in zip(r, s))

    def shifted(self, k: int) -> "ValuationIdeal":
        """p^k times the ideal"""
        return ValuationIdeal([[x + k for x in row] for row in self.bounds])

    def first_excess(self, other: "ValuationIdeal") -> Optional[Tuple[int, int]]:
        """First position where self is not inside other"""
        for i, (r, s) in enumerate(zip(self.bounds, other.bounds)):
            for j, (a, b) in enumerate(zip(r, s)):
                if a < b:
                    return i, j
        return None

    def to_json(self) -> List[List[int]]:
        return [list(row) for row in self.bounds]


@dataclass(frozen=True)
class ValuationPattern:
    """
    A tiled R-order {x : v(x_ij) >= a_ij} with a_ii = 0 and a_ij + a_jk >= a_ik.

    Block orders are the hereditary instances; other patterns (such as the
    non-hereditary examples used for the star property) only support
    non-negative radical powers.
    """
    prime: int
    bounds: Bounds

    def __post_init__(self):
        check_prime(self.prime)
        object.__setattr__(self, 'bounds', _as_bounds(self.bounds))
        n = len(self.bounds)
        if any(len(row) != n for row in self.bounds):
            raise SizeMismatchError("pattern must be square")
        if any(self.bounds[i][i] != 0 for i in range(n)):
            raise IncompatibleIdealError("pattern diagonal must be zero")
        for i, j, k in product(range(n), repeat=3):
            if self.bounds[i][j] + self.bounds[j][k] < self.bounds[i][k]:
                raise IncompatibleIdealError(f"pattern is not closed under multiplication at ({i},{k})")

    @property
    def size(self) -> int:
        return len(self.bounds)

    def as_ideal(self) -> ValuationIdeal:
        return ValuationIdeal(self.bounds)

    def block_sizes(self) -> Optional[Tuple[int, ...]]:
        """Sizes (n_1..n_r) when this is the pattern of a block order, else None"""
        n = self.size
        sizes, start = [], 0
        for i in range(1, n + 1):
            if i == n or self.bounds[i][i - 1] != 0 or self.bounds[i - 1][i] != 0:
                sizes.append(i - start)
                start = i
        candidate = BlockOrder(self.prime, tuple(sizes))
        return tuple(sizes) if candidate.pattern.bounds == self.bounds else None

    def is_hereditary_block(self) -> bool:
        return self.block_sizes() is not None

    def to_json(self) -> dict:
        return {"p": self.prime, "pattern": [list(r) for r in self.bounds]}


@dataclass(frozen=True)
class BlockOrder:
    """O^[n_1..n_r]: entries in p R above the diagonal blocks, R elsewhere"""
    prime: int
    sizes: Tuple[int, ...]

    def __post_init__(self):
        check_prime(self.prime)
        object.__setattr__(self, 'sizes', tuple(int(s) for s in self.sizes))
        if not self.sizes or any(s < 1 for s in self.sizes):
            raise PreconditionError(f"block sizes must be positive, got {self.sizes}")

    @property
    def N(self) -> int:
        return sum(self.sizes)

    @property
    def r(self) -> int:
        return len(self.sizes)

    def block_of(self, index: int) -> int:
        total = 0
        for b, s in enumerate(self.sizes):
            total += s
            if index < total:
                return b
        raise IndexError(index)

    def block_range(self, b: int) -> range:
        start = sum(self.sizes[:b])
        return range(start, start + self.sizes[b])

    @property
    def pattern(self) -> ValuationPattern:
        blocks = [self.block_of(i) for i in range(self.N)]
        return ValuationPattern(self.prime, [[1 if blocks[i] < blocks[j] else 0
                                              for j in range(self.N)] for i in range(self.N)])

    def idempotent(self, b: int) -> PMatrix:
        """Diagonal idempotent e_b of block b"""
        return PMatrix.diagonal([1 if self.block_of(i) == b else 0 for i in range(self.N)],
                                self.prime)

    def to_json(self) -> dict:
        return {"p": self.prime, "sizes": list(self.sizes)}


@dataclass(frozen=True)
class ResidueAlgebra:
    """A/Jac(A) = M_{m_1}(k) x ... x M_{m_r}(k)"""
    prime: int
    sizes: Tuple[int, ...]

    @property
    def dimension(self) -> int:
        return sum(m * m for m in self.sizes)


OrderLike = Union[BlockOrder, ValuationPattern]


def _pattern(o: OrderLike) -> ValuationPattern:
    return o.pattern if isinstance(o, BlockOrder) else o


# ---------------------------------------------------------------------------
# Membership and ideal arithmetic
# ---------------------------------------------------------------------------

def contains(o: OrderLike, M: PMatrix) -> bool:
    pat = _pattern(o)
    if M.shape != (pat.size, pat.size):
        raise SizeMismatchError(f"expected a {pat.size}x{pat.size} matrix, got {M.shape}")
    return all(M[i, j] == 0 or valuation(M[i, j], pat.prime) >= pat.bounds[i][j]
               for i in range(pat.size) for j in range(pat.size))


def ideal_contains(I: ValuationIdeal, M: PMatrix) -> bool:
    if M.shape != (I.size, I.size):
        raise SizeMismatchError(f"expected a {I.size}x{I.size} matrix, got {M.shape}")
    return all(M[i, j] == 0 or valuation(M[i, j], M.prime) >= I.bounds[i][j]
               for i in range(I.size) for j in range(I.size))


def ideal_multiply(I: ValuationIdeal, J: ValuationIdeal) -> ValuationIdeal:
    """bound(i,k) = min_j I(i,j) + J(j,k)"""
    if I.size != J.size:
        raise SizeMismatchError("ideals have different sizes")
    n = I.size
    return ValuationIdeal([[min(I.bounds[i][j] + J.bounds[j][k] for j in range(n))
                            for k in range(n)] for i in range(n)])


def left_residual(X: ValuationIdeal, target: ValuationIdeal) -> ValuationIdeal:
    """Largest L with X * L ⊆ target"""
    n = X.size
    return ValuationIdeal([[max(target.bounds[i][j] - X.bounds[i][k] for i in range(n))
                            for j in range(n)] for k in range(n)])


def right_residual(X: ValuationIdeal, target: ValuationIdeal) -> ValuationIdeal:
    """Largest L with L * X ⊆ target"""
    n = X.size
    return ValuationIdeal([[max(target.bounds[i][j] - X.bounds[k][j] for j in range(n))
                            for k in range(n)] for i in range(n)])


def is_two_sided(o: OrderLike, L: ValuationIdeal) -> bool:
    A = _pattern(o).as_ideal()
    return ideal_multiply(A, L) == L and ideal_multiply(L, A) == L


def radical(o: OrderLike) -> ValuationIdeal:
    """Jacobson radical of a tiled order: a_ij where a_ij + a_ji >= 1, else a_ij + 1"""
    a = _pattern(o).bounds
    n = len(a)
    return ValuationIdeal([[a[i][j] if a[i][j] + a[j][i] >= 1 else a[i][j] + 1
                            for j in range(n)] for i in range(n)])


def radical_inverse(o: OrderLike) -> ValuationIdeal:
    """J^-1 = {x : J x ⊆ A}"""
    pat = _pattern(o)
    if not pat.is_hereditary_block():
        raise UndefinedPowerError("J^-1 is only used for hereditary block orders")
    return left_residual(radical(pat), pat.as_ideal())


def radical_power(o: OrderLike, n: int) -> ValuationIdeal:
    pat = _pattern(o)
    result = pat.as_ideal()
    if n == 0:
        return result
    if n > 0:
        factor = radical(pat)
    else:
        if not pat.is_hereditary_block():
            raise UndefinedPowerError(f"Jac(A)^{n} is not defined for non-hereditary patterns")
        factor = radical_inverse(pat)
    for _ in range(abs(n)):
        result = ideal_multiply(result, factor)
    return result


def radical_power_by_conductor(o: OrderLike, n: int) -> ValuationIdeal:
    """For n < 0: {x : J^m x J^m ⊆ J^m} with m = -n"""
    if n >= 0:
        return radical_power(o, n)
    C = radical_power(o, -n).bounds
    size = len(C)
    return ValuationIdeal([[max(C[i][j] - C[i][k] - C[l][j]
                                for i in range(size) for j in range(size))
                            for l in range(size)] for k in range(size)])


def closed_form_radical_power(sizes: Tuple[int, int], n: int) -> ValuationIdeal:
    """Block bounds for r = 2: J^2m = [[m, m+1],[m, m]], J^2m+1 = [[m+1, m+1],[m, m+1]]"""
    if len(sizes) != 2:
        raise PreconditionError("closed form is stated for two blocks")
    m, odd = divmod(n, 2)
    block = [[m + 1, m + 1], [m, m + 1]] if odd else [[m, m + 1], [m, m]]
    owner = [0] * sizes[0] + [1] * sizes[1]
    return ValuationIdeal([[block[bi][bj] for bj in owner] for bi in owner])


# ---------------------------------------------------------------------------
# Residue algebra and projectives
# ---------------------------------------------------------------------------

def residue_algebra(o: BlockOrder) -> ResidueAlgebra:
    return ResidueAlgebra(o.prime, o.sizes)


def residue_dimension(o: OrderLike) -> int:
    """dim_k A/Jac(A) read off as the colength of the radical"""
    a = _pattern(o).bounds
    J = radical(o).bounds
    return sum(J[i][j] - a[i][j] for i in range(len(a)) for j in range(len(a)))


def decompose_projective(o: BlockOrder, e: PMatrix) -> List[int]:
    """Multiplicities of V_1..V_r in eA, from residue ranks of the diagonal blocks of e"""
    if not contains(o, e):
        raise IncompatibleIdealError("idempotent does not lie in the order")
    if e @ e != e:
        raise NotIdempotentError("matrix is not idempotent")
    multiplicities = []
    for b in range(o.r):
        idx = list(o.block_range(b))
        block = e.submatrix(idx, idx).residue_rows()
        multiplicities.append(kfield.rank(block, o.prime))
    return multiplicities


def projectives_isomorphic(o: BlockOrder, e: PMatrix, f: PMatrix) -> bool:
    """eA ≅ fA iff the residue modules agree"""
    return decompose_projective(o, e) == decompose_projective(o, f)


def hom_valuation(o: BlockOrder, i: int, j: int) -> int:
    """Hom(V_i, V_j) ≅ e_j A e_i is R (valuation 0) when i <= j and pR when i > j"""
    if not (0 <= i < o.r and 0 <= j < o.r):
        raise IndexError((i, j))
    return 1 if j < i else 0


# ---------------------------------------------------------------------------
# Star property and the ideal identity behind it
# ---------------------------------------------------------------------------

@dataclass
class StarCheck:
    holds: bool
    premise: bool
    violation: Optional[Tuple[int, int]] = None

    def to_json(self) -> dict:
        return {"holds": self.holds, "premise": self.premise,
                "violation": list(self.violation) if self.violation else None}


def star_check(o: OrderLike, L: ValuationIdeal) -> StarCheck:
    """Evaluate J^2 L ⊆ A  =>  J L J ⊆ A for one two-sided lattice L"""
    pat = _pattern(o)
    if L.size != pat.size or not is_two_sided(pat, L):
        raise IncompatibleIdealError("L is not a two-sided lattice over the order")
    A = pat.as_ideal()
    J = radical(pat)
    premise = ideal_multiply(ideal_multiply(J, J), L).is_contained_in(A)
    if not premise:
        return StarCheck(True, False)
    JLJ = ideal_multiply(ideal_multiply(J, L), J)
    excess = JLJ.first_excess(A)
    return StarCheck(excess is None, True, excess)


def check_star_property(o: OrderLike, L: ValuationIdeal) -> bool:
    return star_check(o, L).holds


def largest_star_lattice(o: OrderLike) -> ValuationIdeal:
    """The largest L in A_F with J^2 L ⊆ A"""
    pat = _pattern(o)
    J = radical(pat)
    return left_residual(ideal_multiply(J, J), pat.as_ideal())


def radical_sandwich_holds(o: OrderLike, L: ValuationIdeal, n: int) -> bool:
    """J^(n+1) L ⊆ A  =>  J^n L J^n ⊆ A"""
    A = _pattern(o).as_ideal()
    if not ideal_multiply(radical_power(o, n + 1), L).is_contained_in(A):
        return True
    Jn = radical_power(o, n)
    return ideal_multiply(ideal_multiply(Jn, L), Jn).is_contained_in(A)


def two_sided_closure(o: OrderLike, M: ValuationIdeal) -> ValuationIdeal:
    A = _pattern(o).as_ideal()
    return ideal_multiply(ideal_multiply(A, M), A)


def candidate_lattices(o: OrderLike, offset: int = 3, samples: int = 500,
                       rng: Optional[random.Random] = None, exhaustive_limit: int = 5000):
    """Two-sided lattices with bounds in [-offset, offset]; exhaustive when small enough"""
    pat = _pattern(o)
    n = pat.size
    values = range(-offset, offset + 1)
    seen = set()
    if len(values) ** (n * n) <= exhaustive_limit:
        for flat in product(values, repeat=n * n):
            L = ValuationIdeal([flat[i * n:(i + 1) * n] for i in range(n)])
            if is_two_sided(pat, L):
                yield L
        return
    rng = rng or random.Random(0)
    for _ in range(samples):
        M = ValuationIdeal([[rng.choice(values) for _ in range(n)] for _ in range(n)])
        L = two_sided_closure(pat, M)
        if L.bounds not in seen:
            seen.add(L.bounds)
            yield L


def star_scan(o: OrderLike, offset: int = 3, samples: int = 500, seed: int = 0) -> Dict:
    """Count star-property violations over candidate lattices"""
    checked = premises = 0
    violations = []
    for L in candidate_lattices(o, offset, samples, random.Random(seed)):
        result = star_check(o, L)
        checked += 1
        premises += int(result.premise)
        if not result.holds:
            violations.append({"L": L.to_json(), "position": list(result.violation)})
    logger.debug(f"star scan: {checked} lattices, {len(violations)} violations")
    return {"checked": checked, "premise_instances": premises,
            "violations": len(violations), "examples": violations[:3]}


# ---------------------------------------------------------------------------
# Residue unitary groups of [[R, pR], [R, R]]
# ---------------------------------------------------------------------------

SUPPORTED_ORDER = "[[R,m],[R,R]]"

Residue4 = Tuple[int, int, int, int]


def _residue_multiply(x: Residue4, y: Residue4, p: int) -> Residue4:
    """Product in A/pA for elements [[a, pi*b],[c, d]] written as (a, b, c, d)"""
    a, b, c, d = x
    X, Y, Z, W = y
    return ((a * X) % p, (a * Y + b * W) % p, (c * X + d * Z) % p, (d * W) % p)


def _apply_involution(x: Residue4, involution: ResidueInvolution) -> Residue4:
    a, b, c, d = x
    if involution is ResidueInvolution.TRANSPOSE_TWIST:
        return (a, c, b, d)
    return (d, b, c, a)


def _is_anti_automorphism(involution: ResidueInvolution, p: int) -> bool:
    basis = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
    for x in basis:
        for y in basis:
            lhs = _apply_involution(_residue_multiply(x, y, p), involution)
            rhs = _residue_multiply(_apply_involution(y, involution),
                                    _apply_involution(x, involution), p)
            if lhs != rhs:
                return False
    return True


def parse_involution(descriptor) -> ResidueInvolution:
    if isinstance(descriptor, ResidueInvolution):
        return descriptor
    try:
        return ResidueInvolution(str(descriptor).strip().lower())
    except ValueError:
        raise UnsupportedDescriptorError(f"unknown involution descriptor {descriptor!r}")


def residue_unitary_enumerate(p: int, order: str = SUPPORTED_ORDER,
                              involution="first") -> Tuple[int, int]:
    """(identity-component size, total size) of {a in A_k : a^sigma a = 1}"""
    check_prime(p)
    if order.replace(" ", "") != SUPPORTED_ORDER:
        raise UnsupportedDescriptorError(f"unsupported order descriptor {order!r}")
    if p > 7:
        raise UnsupportedDescriptorError("enumeration is limited to p <= 7")
    inv = parse_involution(involution)
    if not _is_anti_automorphism(inv, p):
        raise UnsupportedDescriptorError(f"{inv.value} is not an anti-automorphism")
    one = (1, 0, 0, 1)
    unitary = [x for x in product(range(p), repeat=4)
               if _residue_multiply(_apply_involution(x, inv), x, p) == one]
    if inv is ResidueInvolution.TRANSPOSE_TWIST:
        # [[1, b], [-b, 1]], b in k
        component = [x for x in unitary if x[0] == 1 and x[3] == 1]
    else:
        # diag(a, a^-1), a in k^x
        component = [x for x in unitary if x[1] == 0 and x[2] == 0]
    logger.info(f"Residue unitary group ({inv.value}) at p={p}: {len(component)}/{len(unitary)}")
    return len(component), len(unitary)
