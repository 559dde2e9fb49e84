#!/usr/bin/env python3
"""
Quadratic and alternating lattices over R = Z_(p).

Covers coradicals and the nearly unimodular predicate, Jordan splitting,
rational (Q_p) classification, the integral decision for nearly unimodular
forms, the classical Jordan-invariant oracle, Hensel lifting of residue
isometries and explicit witness construction.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple
import logging

from sympy.ntheory import sqrt_mod

from data.enums import DiscClass
from data.exceptions import (NotSymmetricError, NotLocalError, SingularFormError, SizeMismatchError,
                         NotNearlyUnimodularError, NotUnimodularError, NotIsometricError,
                         NotAnIsometryError, PrimeMismatchError, PreconditionError)
from data.plocal import (INFINITY, valuation, unit_part, legendre, hilbert_symbol, nonresidue,
                     format_rational)
from data.pmatrix import PMatrix
from data.smith import smith_profile
from data import residue_field as kfield

logger = logging.getLogger(__name__)

DEFAULT_PRECISION = 8

OracleEntry = Tuple[int, int, DiscClass]


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GramForm:
    """Integral epsilon-symmetric Gram matrix over Z_(p)"""
    gram: PMatrix
    epsilon: int = 1

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise PreconditionError(f"epsilon must be +1 or -1, got {self.epsilon}")
        if not self.gram.is_square():
            raise SizeMismatchError(f"Gram matrix must be square, got {self.gram.shape}")
        if not self.gram.is_symmetric(self.epsilon):
            kind = "symmetric" if self.epsilon == 1 else "alternating"
            raise NotSymmetricError(f"Gram matrix is not {kind}")
        if not self.gram.is_integral():
            raise NotLocalError("Gram matrix has entries outside Z_(p)")

    @classmethod
    def from_rows(cls, rows, p: int, epsilon: int = 1) -> "GramForm":
        return cls(PMatrix.from_rows(rows, p), epsilon)

    @classmethod
    def diagonal(cls, values: Sequence, p: int) -> "GramForm":
        return cls(PMatrix.diagonal(values, p), 1)

    @property
    def prime(self) -> int:
        return self.gram.prime

    @property
    def rank(self) -> int:
        return self.gram.nrows

    def det(self) -> Fraction:
        return self.gram.det()

    def is_singular(self) -> bool:
        return self.det() == 0

    def is_unimodular(self) -> bool:
        d = self.det()
        return d != 0 and valuation(d, self.prime) == 0

    def congruent(self, X: PMatrix) -> "GramForm":
        """The form X^T G X, i.e. f restricted to the columns of X"""
        return GramForm(self.gram.congruent(X), self.epsilon)

    def orthogonal_sum(self, other: "GramForm") -> "GramForm":
        if other.prime != self.prime or other.epsilon != self.epsilon:
            raise PrimeMismatchError("orthogonal sum needs the same prime and sign")
        return GramForm(PMatrix.block_diagonal([self.gram, other.gram], self.prime), self.epsilon)

    def scaled(self, c) -> "GramForm":
        return GramForm(self.gram.scaled(c), self.epsilon)

    def to_json(self) -> dict:
        return {"p": self.prime, "epsilon": self.epsilon, "gram": self.gram.to_json()}


@dataclass(frozen=True)
class CoradicalProfile:
    """Nonzero elementary-divisor exponents of the Gram matrix plus the rank defect"""
    exponents: Tuple[int, ...]
    rank_defect: int = 0

    @property
    def is_semisimple(self) -> bool:
        return self.rank_defect == 0 and all(e <= 1 for e in self.exponents)

    @property
    def length(self) -> int:
        return sum(self.exponents)

    def to_json(self) -> dict:
        return {"exponents": list(self.exponents), "rank_defect": self.rank_defect}


@dataclass(frozen=True)
class RationalClass:
    """Rank, discriminant square class and Hasse invariant over Q_p"""
    prime: int
    rank: int
    disc_class: Tuple[int, int]
    hasse: int

    def disc_representative(self) -> Fraction:
        parity, bit = self.disc_class
        unit = nonresidue(self.prime) if bit else 1
        return Fraction(self.prime ** parity * unit)

    def to_json(self) -> dict:
        return {"p": self.prime, "rank": self.rank,
                "disc_class": {"valuation_parity": self.disc_class[0],
                               "legendre_bit": self.disc_class[1]},
                "hasse": self.hasse}


@dataclass(frozen=True)
class JordanSplit:
    """Constituents (scale, unimodular form) with a witness W over R"""
    constituents: Tuple[Tuple[int, GramForm], ...]
    witness: PMatrix

    @property
    def scales(self) -> List[int]:
        return [s for s, _ in self.constituents]

    def block_gram(self) -> PMatrix:
        p = self.witness.prime
        return PMatrix.block_diagonal([f.gram.scaled(Fraction(p) ** s)
                                       for s, f in self.constituents], p)


@dataclass
class LiftResult:
    """Newton iteration output with its defect valuations, one per iterate"""
    witness: PMatrix
    precision: int
    steps: int
    defect_history: List = field(default_factory=list)


# ---------------------------------------------------------------------------
# Congruence reduction engine
# ---------------------------------------------------------------------------

class _Congruence:
    """Mutable symmetric-or-alternating matrix A with a basis change W, A = W^T G W"""

    def __init__(self, G: PMatrix):
        self.p = G.prime
        self.n = G.nrows
        self.A = G.to_lists()
        self.W = PMatrix.identity(self.n, self.p).to_lists()

    def swap(self, i: int, j: int):
        if i == j:
            return
        self.A[i], self.A[j] = self.A[j], self.A[i]
        for row in self.A:
            row[i], row[j] = row[j], row[i]
        for row in self.W:
            row[i], row[j] = row[j], row[i]

    def add_multiple(self, target: int, source: int, c: Fraction):
        """b_target <- b_target + c * b_source"""
        if not c:
            return
        for row in self.A:
            row[target] += c * row[source]
        self.A[target] = [a + c * b for a, b in zip(self.A[target], self.A[source])]
        for row in self.W:
            row[target] += c * row[source]

    def scale(self, i: int, c: Fraction):
        for row in self.A:
            row[i] *= c
        self.A[i] = [c * a for a in self.A[i]]
        for row in self.W:
            row[i] *= c

    def witness(self) -> PMatrix:
        return PMatrix.from_rows(self.W, self.p)

    def matrix(self) -> PMatrix:
        return PMatrix.from_rows(self.A, self.p)


def diagonalize(G: PMatrix) -> Tuple[List[Fraction], PMatrix]:
    """
    Diagonalize a nonsingular symmetric matrix by congruence over Z_(p).

    Pivots on a diagonal entry of minimal valuation (smallest index); when only
    off-diagonal entries attain the minimum, the lexicographically first one is
    folded into the diagonal first. Returned valuations are non-decreasing.
    """
    p = G.prime
    eng = _Congruence(G)
    n = eng.n
    for t in range(n):
        vmin, pos = INFINITY, None
        for i in range(t, n):
            for j in range(t, n):
                x = eng.A[i][j]
                if x != 0:
                    v = valuation(x, p)
                    if v < vmin:
                        vmin, pos = v, (i, j)
        if pos is None:
            raise SingularFormError("Gram matrix is singular")
        diag = [i for i in range(t, n) if eng.A[i][i] != 0 and valuation(eng.A[i][i], p) == vmin]
        if diag:
            pivot = diag[0]
        else:
            # 2 is a unit, so v(a_ii + 2 a_ij + a_jj) = vmin
            i, j = next((a, b) for a in range(t, n) for b in range(a + 1, n)
                        if eng.A[a][b] != 0 and valuation(eng.A[a][b], p) == vmin)
            eng.add_multiple(i, j, Fraction(1))
            pivot = i
        eng.swap(t, pivot)
        d = eng.A[t][t]
        for j in range(t + 1, n):
            eng.add_multiple(j, t, -eng.A[j][t] / d)
    return [eng.A[i][i] for i in range(n)], eng.witness()


def symplectic_reduce(f: GramForm) -> Tuple[List[int], PMatrix]:
    """
    Reduce a nonsingular alternating form to blocks p^s [[0,1],[-1,0]].

    Returns the non-decreasing scales and W with W^T G W equal to the block sum.
    """
    if f.epsilon != -1:
        raise PreconditionError("symplectic reduction needs an alternating form")
    if f.rank % 2 or f.is_singular():
        raise SingularFormError("alternating form is singular")
    p = f.prime
    eng = _Congruence(f.gram)
    n = eng.n
    scales = []
    for t in range(0, n, 2):
        best = None
        for i in range(t, n):
            for j in range(i + 1, n):
                x = eng.A[i][j]
                if x != 0:
                    v = valuation(x, p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        s, i, j = best
        eng.swap(t, i)
        eng.swap(t + 1, j)
        eng.scale(t + 1, 1 / unit_part(eng.A[t][t + 1], p))
        c = eng.A[t][t + 1]
        for k in range(t + 2, n):
            g_ke, g_kf = eng.A[k][t], eng.A[k][t + 1]
            eng.add_multiple(k, t, -g_kf / c)
            eng.add_multiple(k, t + 1, g_ke / c)
        scales.append(s)
    return scales, eng.witness()


def symplectic_block(scales: Sequence[int], p: int) -> PMatrix:
    return PMatrix.block_diagonal(
        [PMatrix.from_rows([[0, Fraction(p) ** s], [-Fraction(p) ** s, 0]], p) for s in scales], p)


# ---------------------------------------------------------------------------
# Coradical and nearly unimodular forms
# ---------------------------------------------------------------------------

def coradical(f: GramForm) -> CoradicalProfile:
    """Cokernel of the adjoint map P -> P*, as elementary-divisor exponents"""
    profile = smith_profile(f.gram)
    exps = tuple(sorted(e for e in profile.finite if e >= 1))
    return CoradicalProfile(exps, profile.rank_defect)


def is_nearly_unimodular(f: GramForm) -> bool:
    return coradical(f).is_semisimple


def _require_quadratic(f: GramForm):
    if f.epsilon != 1:
        raise PreconditionError("operation is defined for symmetric (epsilon = +1) forms")


def jordan_split(f: GramForm) -> JordanSplit:
    _require_quadratic(f)
    p = f.prime
    diag, W = diagonalize(f.gram)
    groups: Dict[int, List[Fraction]] = {}
    for d in diag:
        groups.setdefault(valuation(d, p), []).append(d)
    constituents = tuple(
        (s, GramForm.diagonal([d / Fraction(p) ** s for d in groups[s]], p))
        for s in sorted(groups))
    return JordanSplit(constituents, W)


def _disc_class(det: Fraction, p: int) -> Tuple[int, int]:
    parity = valuation(det, p) % 2
    bit = 0 if legendre(unit_part(det, p), p) == 1 else 1
    return parity, bit


def rational_class_of_matrix(G: PMatrix) -> RationalClass:
    """Q_p invariants of any nonsingular symmetric rational matrix"""
    p = G.prime
    diag, _ = diagonalize(G)
    det = Fraction(1)
    for d in diag:
        det *= d
    hasse = 1
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            hasse *= hilbert_symbol(diag[i], diag[j], p)
    return RationalClass(p, len(diag), _disc_class(det, p), hasse)


def rational_class(f: GramForm) -> RationalClass:
    _require_quadratic(f)
    return rational_class_of_matrix(f.gram)


def isometric_rational(f: GramForm, g: GramForm) -> bool:
    if f.prime != g.prime:
        raise PrimeMismatchError("forms live over different primes")
    return rational_class(f) == rational_class(g)


def isometric_integral_nearly_unimodular(f: GramForm, g: GramForm) -> bool:
    """Integral isometry for nearly unimodular forms: same rational class and coradical"""
    if f.prime != g.prime:
        raise PrimeMismatchError("forms live over different primes")
    _require_quadratic(f)
    _require_quadratic(g)
    for form in (f, g):
        if not is_nearly_unimodular(form):
            raise NotNearlyUnimodularError(
                f"form {form.gram} is not nearly unimodular; refine it or use the Jordan oracle")
    if f.rank != g.rank:
        return False
    return coradical(f) == coradical(g) and rational_class(f) == rational_class(g)


def jordan_invariant_oracle(f: GramForm) -> List[OracleEntry]:
    """Scales, ranks and determinant square classes of the Jordan constituents"""
    split = jordan_split(f)
    return [(s, c.rank, DiscClass.from_legendre(legendre(c.det(), f.prime)))
            for s, c in split.constituents]


def oracle_to_json(oracle: Sequence[OracleEntry]) -> List[list]:
    return [[s, r, d.value] for s, r, d in oracle]


def isometric_integral(f: GramForm, g: GramForm) -> bool:
    """Integral isometry for arbitrary nonsingular forms via the Jordan oracle"""
    return f.rank == g.rank and jordan_invariant_oracle(f) == jordan_invariant_oracle(g)


def hyperbolic(n: int, epsilon: int, p: int) -> GramForm:
    block = PMatrix.from_rows([[0, 1], [epsilon, 0]], p)
    return GramForm(PMatrix.block_diagonal([block] * n, p), epsilon)


def count_nearly_unimodular_classes(c: RationalClass) -> List[List[OracleEntry]]:
    """All integral classes of nearly unimodular forms inside a rational class"""
    if c.rank < 1:
        raise PreconditionError("rational class must have rank >= 1")
    p = c.prime
    delta = nonresidue(p)
    found: List[List[OracleEntry]] = []
    for r1 in range(c.rank + 1):
        r0 = c.rank - r1
        for d0 in ((1, delta) if r0 else (1,)):
            for d1 in ((1, delta) if r1 else (1,)):
                entries = [1] * max(r0 - 1, 0) + ([d0] if r0 else [])
                entries += [p] * max(r1 - 1, 0) + ([p * d1] if r1 else [])
                form = GramForm.diagonal(entries, p)
                if rational_class(form) != c:
                    continue
                oracle = jordan_invariant_oracle(form)
                if oracle not in found:
                    found.append(oracle)
    logger.debug(f"{len(found)} nearly unimodular classes in rank {c.rank} at p={p}")
    return found


# ---------------------------------------------------------------------------
# Invariant arithmetic (cancellation)
# ---------------------------------------------------------------------------

def orthogonal_sum_class(a: RationalClass, b: RationalClass) -> RationalClass:
    if a.prime != b.prime:
        raise PrimeMismatchError("classes live over different primes")
    p = a.prime
    disc = ((a.disc_class[0] + b.disc_class[0]) % 2, a.disc_class[1] ^ b.disc_class[1])
    hasse = a.hasse * b.hasse * hilbert_symbol(a.disc_representative(), b.disc_representative(), p)
    return RationalClass(p, a.rank + b.rank, disc, hasse)


def cancel_class(total: RationalClass, part: RationalClass) -> RationalClass:
    """The class c with orthogonal_sum_class(c, part) == total"""
    if total.prime != part.prime:
        raise PrimeMismatchError("classes live over different primes")
    if part.rank > total.rank:
        raise PreconditionError("cannot cancel a summand of larger rank")
    p = total.prime
    disc = ((total.disc_class[0] - part.disc_class[0]) % 2,
            total.disc_class[1] ^ part.disc_class[1])
    rest = RationalClass(p, total.rank - part.rank, disc, 1)
    hasse = total.hasse * part.hasse * hilbert_symbol(rest.disc_representative(),
                                                      part.disc_representative(), p)
    return RationalClass(p, rest.rank, disc, hasse)


# ---------------------------------------------------------------------------
# Similitudes
# ---------------------------------------------------------------------------

def integral_similitude_factors(f: GramForm, g: GramForm) -> List[Fraction]:
    """Square-class representatives lam with lam*f integrally isometric to g"""
    _require_quadratic(f)
    if f.rank != g.rank or f.is_singular() or g.is_singular():
        return []
    p = f.prime
    shift = valuation(g.det(), p) - valuation(f.det(), p)
    if shift % f.rank:
        return []
    v = shift // f.rank
    factors = []
    for u in (1, nonresidue(p)):
        lam = Fraction(p) ** v * u
        scaled = f.gram.scaled(lam)
        if not scaled.is_integral():
            continue
        if jordan_invariant_oracle(GramForm(scaled)) == jordan_invariant_oracle(g):
            factors.append(lam)
    return factors


def rational_similitude_factors(f: GramForm, g: GramForm) -> List[Fraction]:
    """Representatives lam of Q_p^x / squares with lam*f rationally isometric to g"""
    _require_quadratic(f)
    p = f.prime
    target = rational_class(g)
    factors = []
    for lam in (Fraction(1), Fraction(nonresidue(p)), Fraction(p), Fraction(p * nonresidue(p))):
        if rational_class_of_matrix(f.gram.scaled(lam)) == target:
            factors.append(lam)
    return factors


# ---------------------------------------------------------------------------
# Alternating forms
# ---------------------------------------------------------------------------

def isometric_alternating(f: GramForm, g: GramForm) -> bool:
    """Integral congruence of nonsingular alternating forms: equal symplectic scales"""
    if f.rank != g.rank:
        return False
    return symplectic_reduce(f)[0] == symplectic_reduce(g)[0]


def isometric_alternating_rational(f: GramForm, g: GramForm) -> bool:
    """Over Q_p nonsingular alternating forms are classified by rank"""
    for form in (f, g):
        if form.epsilon != -1 or form.is_singular():
            raise PreconditionError("expected nonsingular alternating forms")
    return f.rank == g.rank


def alternating_witness(f: GramForm, g: GramForm, integral: bool = True) -> PMatrix:
    """X with X^T F X = G; over R when integral is set, else over Q"""
    scales_f, S_f = symplectic_reduce(f)
    scales_g, S_g = symplectic_reduce(g)
    if len(scales_f) != len(scales_g):
        raise NotIsometricError("alternating forms have different ranks")
    p = f.prime
    if integral:
        if scales_f != scales_g:
            raise NotIsometricError(f"symplectic scales differ: {scales_f} vs {scales_g}")
        middle = PMatrix.identity(f.rank, p)
    else:
        middle = PMatrix.diagonal(
            [x for a, b in zip(scales_f, scales_g) for x in (1, Fraction(p) ** (b - a))], p)
    X = S_f @ middle @ S_g.inverse()
    if f.gram.congruent(X) != g.gram:
        raise NotAnIsometryError("symplectic witness failed verification")
    return X


# ---------------------------------------------------------------------------
# Hensel lifting and witnesses
# ---------------------------------------------------------------------------

def _as_matrix(G) -> PMatrix:
    return G.gram if isinstance(G, GramForm) else G


def _require_unimodular(G: PMatrix, label: str):
    d = G.det()
    if d == 0 or valuation(d, G.prime) != 0:
        raise NotUnimodularError(f"{label} is not unimodular")


def lift_isometry_with_trace(G, G_target, X0: PMatrix, k: int = DEFAULT_PRECISION) -> LiftResult:
    """
    Newton iteration X <- X (I + p^m C), C = -1/2 G'^-1 D, from a residue isometry.

    Each step at least doubles the defect valuation m (capped at k); iterates are
    reduced into [0, p^k).
    """
    G, Gt = _as_matrix(G), _as_matrix(G_target)
    p = G.prime
    _require_unimodular(G, "source form")
    _require_unimodular(Gt, "target form")
    if not X0.is_integral():
        raise NotAnIsometryError("seed has entries outside Z_(p)")
    defect = G.congruent(X0) - Gt
    m = defect.min_valuation()
    if m < 1:
        raise NotAnIsometryError("seed is not an isometry modulo p")

    history = [m]
    X, steps = X0, 0
    Gt_inv = Gt.inverse()
    n = G.nrows
    while m < k:
        pm = Fraction(p) ** m
        D = defect.scaled(1 / pm)
        C = (Gt_inv @ D).scaled(Fraction(-1, 2))
        X = (X @ (PMatrix.identity(n, p) + C.scaled(pm))).reduced(k)
        steps += 1
        defect = G.congruent(X) - Gt
        new_m = defect.min_valuation()
        logger.debug(f"Newton step {steps}: defect valuation {m} -> {new_m}")
        m = new_m
        history.append(m)
    return LiftResult(X, k, steps, history)


def lift_isometry(G, G_target, X0: PMatrix, k: int = DEFAULT_PRECISION) -> PMatrix:
    return lift_isometry_with_trace(G, G_target, X0, k).witness


def residue_isometry(source: Sequence[int], target: Sequence[int], p: int) -> List[List[int]]:
    """
    Y over F_p with Y^T diag(source) Y = diag(target), for unit diagonals of
    equal determinant class; built by representing the first target value and
    splitting off its orthogonal complement.
    """
    a = [x % p for x in source]
    b = [x % p for x in target]
    n = len(a)
    if n == 1:
        ratio = (b[0] * pow(a[0], -1, p)) % p
        root = sqrt_mod(ratio, p)
        if root is None:
            raise NotIsometricError("residue forms have different discriminants")
        return [[root % p]]

    a0, a1, b0 = a[0], a[1], b[0]
    inv_a1 = pow(a1, -1, p)
    s = t = None
    for cand in range(p):
        rest = ((b0 - a0 * cand * cand) * inv_a1) % p
        root = sqrt_mod(rest, p)
        if root is not None:
            s, t = cand, root % p
            break
    if s is None:
        raise NotIsometricError("binary residue form does not represent the target")

    M = kfield.identity(n)
    M[0][0], M[1][0] = s, t
    M[0][1], M[1][1] = (-a1 * t) % p, (a0 * s) % p
    complement = [(a0 * a1 * b0) % p] + a[2:]
    Y_rest = residue_isometry(complement, b[1:], p)
    block = kfield.identity(n)
    for i in range(n - 1):
        for j in range(n - 1):
            block[i + 1][j + 1] = Y_rest[i][j]
    return kfield.matmul(M, block, p)


def build_isometry_witness(f: GramForm, g: GramForm, k: int = DEFAULT_PRECISION) -> PMatrix:
    """X in GL_n(R) with X^T F X = G' mod p^k for isometric nearly unimodular forms"""
    if not isometric_integral_nearly_unimodular(f, g):
        raise NotIsometricError("forms are not integrally isometric")
    p = f.prime
    if f.gram == g.gram:
        return PMatrix.identity(f.rank, p)

    split_f, split_g = jordan_split(f), jordan_split(g)
    if split_f.scales != split_g.scales:
        raise NotIsometricError("Jordan scales differ")
    blocks = []
    for (s, cf), (_, cg) in zip(split_f.constituents, split_g.constituents):
        src = [cf.gram.residue_rows()[i][i] for i in range(cf.rank)]
        dst = [cg.gram.residue_rows()[i][i] for i in range(cg.rank)]
        Y0 = PMatrix.from_rows(residue_isometry(src, dst, p), p)
        blocks.append(lift_isometry(cf.gram, cg.gram, Y0, k))
        logger.debug(f"scale {s}: lifted residue isometry of rank {cf.rank}")
    Y = PMatrix.block_diagonal(blocks, p)
    X = (split_f.witness @ Y @ split_g.witness.inverse()).reduced(k)
    if not X.is_invertible_over_r() or not f.gram.congruent(X).congruent_mod(g.gram, k):
        raise NotAnIsometryError("assembled witness failed verification")
    logger.info(f"✅ Built isometry witness modulo {p}^{k}")
    return X


def verify_witness(f: GramForm, g: GramForm, X: PMatrix, k: Optional[int] = None) -> bool:
    """X in GL_n(R) and X^T F X = G' exactly, or modulo p^k when k is given"""
    if not X.is_invertible_over_r():
        return False
    image = f.gram.congruent(X)
    return image == g.gram if k is None else image.congruent_mod(g.gram, k)


def describe(f: GramForm) -> str:
    return "<" + ",".join(format_rational(x) for x in f.gram.diagonal_entries()) + ">"
