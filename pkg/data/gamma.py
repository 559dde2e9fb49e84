#!/usr/bin/env python3
"""
Gamma-forms: lattices over Z_(p) with an action of a finite group Gamma of
order prime to p, preserving a symmetric bilinear form.

Groups are given by multiplication tables. A representation rho acts on the
left of column vectors; the right module structure is x.g = rho(g^-1) x, so
rho(g)^T G rho(g) = G is the invariance condition f(xg, yg) = f(x, y).
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import random

from data.exceptions import (PreconditionError, PrimeMismatchError, SizeMismatchError,
                         InvarianceError, NotNearlyUnimodularError, NotUnimodularError,
                         NotAnIsometryError, RetryExhaustedError)
from data.lattice_forms import (GramForm, CoradicalProfile, coradical, is_nearly_unimodular,
                            rational_class_of_matrix, DEFAULT_PRECISION)
from data.plocal import PLocalNumber, check_prime, valuation
from data.pmatrix import PMatrix
from data import residue_field as kfield

logger = logging.getLogger(__name__)

KGAMMA_EXHAUSTIVE_LIMIT = 10_000
KGAMMA_RANDOM_TRIES = 400


# ---------------------------------------------------------------------------
# Finite groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteGroup:
    """Multiplication table on indices 0..n-1; table[g][h] is the index of gh"""
    table: Tuple[Tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, 'table', tuple(tuple(int(x) for x in row) for row in self.table))
        n = len(self.table)
        if n == 0 or any(len(row) != n for row in self.table):
            raise SizeMismatchError("group table must be a non-empty square")
        full = set(range(n))
        for row in self.table:
            if set(row) != full:
                raise PreconditionError("group table rows must be permutations")
        for col in zip(*self.table):
            if set(col) != full:
                raise PreconditionError("group table columns must be permutations")
        if self._find_identity() is None:
            raise PreconditionError("group table has no identity")
        t = self.table
        for a, b, c in product(range(n), repeat=3):
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise PreconditionError(f"group table is not associative at ({a}, {b}, {c})")

    def _find_identity(self) -> Optional[int]:
        n = len(self.table)
        return next((e for e in range(n)
                     if all(self.table[e][g] == g and self.table[g][e] == g for g in range(n))),
                    None)

    @classmethod
    def from_table(cls, table: Sequence[Sequence[int]], name: str = "") -> "FiniteGroup":
        return cls(tuple(tuple(row) for row in table), name)

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def identity(self) -> int:
        return self._find_identity()

    def elements(self) -> range:
        return range(self.order)

    def multiply(self, g: int, h: int) -> int:
        return self.table[g][h]

    def inverse(self, g: int) -> int:
        e = self.identity
        return next(h for h in self.elements() if self.table[g][h] == e)

    @property
    def inverse_table(self) -> List[int]:
        return [self.inverse(g) for g in self.elements()]

    def power(self, g: int, k: int) -> int:
        result = self.identity
        for _ in range(k):
            result = self.multiply(result, g)
        return result

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.multiply(x, g)
            k += 1
        return k

    @property
    def exponent(self) -> int:
        result = 1
        for g in self.elements():
            o = self.element_order(g)
            a, b = result, o
            while b:
                a, b = b, a % b
            result = result * o // a
        return result

    def is_abelian(self) -> bool:
        return all(self.table[g][h] == self.table[h][g]
                   for g in self.elements() for h in self.elements())

    def generators(self) -> List[int]:
        """Greedy generating set: each new element lies outside the subgroup so far"""
        gens: List[int] = []
        span = {self.identity}
        for g in self.elements():
            if g in span:
                continue
            gens.append(g)
            span = self._closure(gens)
            if len(span) == self.order:
                break
        return gens

    def _closure(self, gens: Sequence[int]) -> set:
        span = {self.identity}
        frontier = [self.identity]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.multiply(x, g)
                if y not in span:
                    span.add(y)
                    frontier.append(y)
        return span

    def to_json(self) -> List[List[int]]:
        return [list(row) for row in self.table]


def cyclic_group(n: int) -> FiniteGroup:
    if n < 1:
        raise PreconditionError("cyclic group order must be positive")
    return FiniteGroup(tuple(tuple((i + j) % n for j in range(n)) for i in range(n)), f"C{n}")


def symmetric_group_3() -> FiniteGroup:
    perms = list(permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    # (p q)(x) = p(q(x))
    table = [[index[tuple(p[q[x]] for x in range(3))] for q in perms] for p in perms]
    return FiniteGroup(tuple(tuple(row) for row in table), "S3")


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    """Element (g, h) has index g * |b| + h"""
    m = b.order
    n = a.order * m
    table = [[a.multiply(i // m, j // m) * m + b.multiply(i % m, j % m) for j in range(n)]
             for i in range(n)]
    return FiniteGroup(tuple(tuple(row) for row in table), f"{a.name}x{b.name}")


# ---------------------------------------------------------------------------
# Group ring R Gamma with sigma and the trace T
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupRingElem:
    """sum_g a_g g with coefficients indexed by group element"""
    group: FiniteGroup
    prime: int
    coefficients: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, 'coefficients', tuple(Fraction(c) for c in self.coefficients))
        if len(self.coefficients) != self.group.order:
            raise SizeMismatchError("one coefficient per group element is required")

    @classmethod
    def zero(cls, group: FiniteGroup, p: int) -> "GroupRingElem":
        return cls(group, p, (Fraction(0),) * group.order)

    @classmethod
    def basis(cls, group: FiniteGroup, p: int, g: int, c=1) -> "GroupRingElem":
        coeffs = [Fraction(0)] * group.order
        coeffs[g] = Fraction(c)
        return cls(group, p, tuple(coeffs))

    @classmethod
    def one(cls, group: FiniteGroup, p: int) -> "GroupRingElem":
        return cls.basis(group, p, group.identity)

    def coefficient(self, g: int) -> Fraction:
        return self.coefficients[g]

    def support(self) -> Dict[int, Fraction]:
        return {g: c for g, c in enumerate(self.coefficients) if c}

    def _check(self, other: "GroupRingElem"):
        if other.group != self.group or other.prime != self.prime:
            raise PrimeMismatchError("group ring elements over different groups or primes")

    def __add__(self, other: "GroupRingElem") -> "GroupRingElem":
        self._check(other)
        return GroupRingElem(self.group, self.prime,
                             tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: "GroupRingElem") -> "GroupRingElem":
        return self + other.scaled(-1)

    def __mul__(self, other: "GroupRingElem") -> "GroupRingElem":
        self._check(other)
        out = [Fraction(0)] * self.group.order
        for g, a in self.support().items():
            for h, b in other.support().items():
                out[self.group.multiply(g, h)] += a * b
        return GroupRingElem(self.group, self.prime, tuple(out))

    def scaled(self, c) -> "GroupRingElem":
        c = Fraction(c)
        return GroupRingElem(self.group, self.prime, tuple(c * a for a in self.coefficients))

    def to_json(self) -> Dict[str, str]:
        return {str(g): str(c) for g, c in self.support().items()}


def sigma(x: GroupRingElem) -> GroupRingElem:
    """(sum a_g g)^sigma = sum a_g g^-1"""
    out = [Fraction(0)] * x.group.order
    for g, a in enumerate(x.coefficients):
        out[x.group.inverse(g)] += a
    return GroupRingElem(x.group, x.prime, tuple(out))


def trace_T(x: GroupRingElem) -> PLocalNumber:
    """Coefficient of the identity"""
    return PLocalNumber(x.coefficient(x.group.identity), x.prime)


# ---------------------------------------------------------------------------
# Gamma-lattices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaLattice:
    """Free Z_(p)-lattice with a Gamma-action rho and an invariant symmetric Gram matrix"""
    group: FiniteGroup
    action: Tuple[PMatrix, ...]
    gram: PMatrix

    def __post_init__(self):
        object.__setattr__(self, 'action', tuple(self.action))
        p = self.gram.prime
        check_prime(p)
        if self.group.order % p == 0:
            raise PreconditionError(f"|Gamma| = {self.group.order} is divisible by p = {p}")
        if len(self.action) != self.group.order:
            raise SizeMismatchError("one action matrix per group element is required")
        n = self.gram.nrows
        GramForm(self.gram)
        for g, rho in enumerate(self.action):
            if rho.prime != p:
                raise PrimeMismatchError("action and Gram matrix live over different primes")
            if rho.shape != (n, n) or not rho.is_invertible_over_r():
                raise InvarianceError(f"action of element {g} is not in GL_{n}(Z_({p}))")
        e = self.group.identity
        if self.action[e] != PMatrix.identity(n, p):
            raise InvarianceError("identity does not act trivially")
        for g in self.group.elements():
            for h in self.group.elements():
                if self.action[g] @ self.action[h] != self.action[self.group.multiply(g, h)]:
                    raise InvarianceError(f"action is not a homomorphism at ({g}, {h})")
        for g, rho in enumerate(self.action):
            if self.gram.congruent(rho) != self.gram:
                raise InvarianceError(f"form is not invariant under element {g}")

    @property
    def prime(self) -> int:
        return self.gram.prime

    @property
    def rank(self) -> int:
        return self.gram.nrows

    @property
    def form(self) -> GramForm:
        return GramForm(self.gram)

    def right_act(self, x: PMatrix, g: int) -> PMatrix:
        """x.g for a column vector x"""
        return self.action[self.group.inverse(g)] @ x

    def residue_module(self) -> "ResidueModule":
        return ResidueModule(self.prime, self.group, self.rank,
                             tuple(rho.residue_rows() for rho in self.action))

    def to_json(self) -> dict:
        return {"p": self.prime, "group_table": self.group.to_json(),
                "action": {str(g): rho.to_json() for g, rho in enumerate(self.action)},
                "gram": self.gram.to_json()}


@dataclass(frozen=True)
class ResidueModule:
    """k-space of the given dimension with a left k Gamma-action, one F_p matrix per element"""
    prime: int
    group: FiniteGroup
    dimension: int
    action: Tuple[Tuple[Tuple[int, ...], ...], ...]

    def __post_init__(self):
        object.__setattr__(self, 'action', tuple(tuple(tuple(int(x) % self.prime for x in row)
                                                       for row in m) for m in self.action))

    def matrix(self, g: int) -> List[List[int]]:
        return [list(row) for row in self.action[g]]

    def direct_sum(self, other: "ResidueModule") -> "ResidueModule":
        d1, d2 = self.dimension, other.dimension
        blocks = []
        for g in self.group.elements():
            rows = [list(r) + [0] * d2 for r in self.action[g]]
            rows += [[0] * d1 + list(r) for r in other.action[g]]
            blocks.append(rows)
        return ResidueModule(self.prime, self.group, d1 + d2, tuple(blocks))

    def to_json(self) -> dict:
        return {"dimension": self.dimension,
                "action": {str(g): [list(r) for r in m] for g, m in enumerate(self.action)}}


# ---------------------------------------------------------------------------
# Standard actions
# ---------------------------------------------------------------------------

def regular_action(group: FiniteGroup, p: int) -> Tuple[PMatrix, ...]:
    """rho(g) e_h = e_{h g^-1}: the right regular module written as a left action"""
    n = group.order
    mats = []
    for g in group.elements():
        g_inv = group.inverse(g)
        rows = [[0] * n for _ in range(n)]
        for h in group.elements():
            rows[group.multiply(h, g_inv)][h] = 1
        mats.append(PMatrix.from_rows(rows, p))
    return tuple(mats)


def permutation_action(group: FiniteGroup, perms: Sequence[Sequence[int]], p: int) -> Tuple[PMatrix, ...]:
    """rho(g) e_i = e_{perms[g][i]}"""
    mats = []
    for perm in perms:
        n = len(perm)
        rows = [[0] * n for _ in range(n)]
        for i, j in enumerate(perm):
            rows[j][i] = 1
        mats.append(PMatrix.from_rows(rows, p))
    return tuple(mats)


def character_action(group: FiniteGroup, values: Sequence[int], p: int) -> Tuple[PMatrix, ...]:
    """One-dimensional action by a +-1 valued character"""
    if any(v not in (1, -1) for v in values):
        raise PreconditionError("character lines need values +-1")
    return tuple(PMatrix.from_rows([[v]], p) for v in values)


def residue_characters(group: FiniteGroup, p: int) -> List[Tuple[int, ...]]:
    """Homomorphisms Gamma -> F_p^x, as value tuples indexed by element"""
    gens = group.generators()
    roots = {}
    for g in gens:
        o = group.element_order(g)
        roots[g] = [c for c in range(1, p) if pow(c, o, p) == 1]
    found = []
    for choice in product(*(roots[g] for g in gens)):
        values: Dict[int, int] = {group.identity: 1}
        frontier = [group.identity]
        consistent = True
        while frontier and consistent:
            x = frontier.pop()
            for g, c in zip(gens, choice):
                y = group.multiply(x, g)
                v = (values[x] * c) % p
                if y not in values:
                    values[y] = v
                    frontier.append(y)
                elif values[y] != v:
                    consistent = False
                    break
        if not consistent or len(values) != group.order:
            continue
        chi = tuple(values[g] for g in group.elements())
        if all(chi[group.multiply(g, h)] == (chi[g] * chi[h]) % p
               for g in group.elements() for h in group.elements()):
            found.append(chi)
    return found


def is_real_character(chi: Sequence[int], p: int) -> bool:
    return all(v in (1, p - 1) for v in chi)


def signed_values(chi: Sequence[int], p: int) -> List[int]:
    return [1 if v == 1 else -1 for v in chi]


def is_split_abelian(group: FiniteGroup, p: int) -> bool:
    return group.is_abelian() and (p - 1) % group.exponent == 0


def isotypic_multiplicities(module: ResidueModule) -> Dict[Tuple[int, ...], int]:
    """dim of the chi-eigenspace for each F_p-valued linear character chi"""
    p = module.prime
    out = {}
    for chi in residue_characters(module.group, p):
        rows = []
        for g in module.group.elements():
            m = module.matrix(g)
            for i in range(module.dimension):
                row = list(m[i])
                row[i] = (row[i] - chi[g]) % p
                rows.append(row)
        out[chi] = len(kfield.nullspace(rows, module.dimension, p)) if module.dimension else 0
    return out


# ---------------------------------------------------------------------------
# Hermitianization
# ---------------------------------------------------------------------------

HermitianTable = Dict[Tuple[int, int], GroupRingElem]


def hermitianize(L: GammaLattice) -> HermitianTable:
    """h^(e_i, e_j) = sum_g f(e_i . g, e_j) g = sum_g (rho(g^-1)^T G)_ij g"""
    group, p, n = L.group, L.prime, L.rank
    twisted = [L.action[group.inverse(g)].transpose() @ L.gram for g in group.elements()]
    table: HermitianTable = {}
    for i in range(n):
        for j in range(n):
            coeffs = tuple(twisted[g][i, j] for g in group.elements())
            table[(i, j)] = GroupRingElem(group, p, coeffs)
    if not _trace_recovers_gram(L, table):
        raise InvarianceError("trace of the hermitian form does not recover the Gram matrix")
    return table


def _trace_recovers_gram(L: GammaLattice, table: HermitianTable) -> bool:
    return all(trace_T(table[(i, j)]).value == L.gram[i, j]
               for i in range(L.rank) for j in range(L.rank))


def hermitian_pairing(L: GammaLattice, table: HermitianTable, x: PMatrix, y: PMatrix) -> GroupRingElem:
    """h^(x, y) extended R-bilinearly from the basis table"""
    total = GroupRingElem.zero(L.group, L.prime)
    for i in range(L.rank):
        if not x[i, 0]:
            continue
        for j in range(L.rank):
            if y[j, 0]:
                total = total + table[(i, j)].scaled(x[i, 0] * y[j, 0])
    return total


def is_sesquilinear(L: GammaLattice, table: Optional[HermitianTable] = None) -> bool:
    """h^(x.k, y) = k^sigma h^(x, y) and h^(x, y.k) = h^(x, y) k on basis vectors and generators of Gamma"""
    table = table or hermitianize(L)
    p, n = L.prime, L.rank
    basis = [PMatrix.from_columns([[int(i == r) for r in range(n)]], p) for i in range(n)]
    for k in L.group.generators():
        elem = GroupRingElem.basis(L.group, p, k)
        for i in range(n):
            for j in range(n):
                base = table[(i, j)]
                left = hermitian_pairing(L, table, L.right_act(basis[i], k), basis[j])
                right = hermitian_pairing(L, table, basis[i], L.right_act(basis[j], k))
                if left != sigma(elem) * base or right != base * elem:
                    return False
    return True


# ---------------------------------------------------------------------------
# Coradical with action and k Gamma isomorphism
# ---------------------------------------------------------------------------

def corad_with_action(L: GammaLattice) -> Tuple[CoradicalProfile, ResidueModule]:
    """
    Coradical P*/G P as a k Gamma-module. Gamma acts on P* through rho(g)^-T;
    for a nearly unimodular form the coradical is k^n / im(G mod p).
    """
    profile = coradical(L.form)
    if not profile.is_semisimple:
        raise NotNearlyUnimodularError("coradical of a Gamma-form needs a nearly unimodular form")
    p, n = L.prime, L.rank
    G_bar = L.gram.residue_rows()
    rref, pivots = kfield.row_reduce(kfield.transpose(G_bar), p)
    image = [rref[r] for r in range(len(pivots))]
    complement = kfield.extend_to_basis(image, n, p)
    d = len(complement)
    if d == 0:
        return profile, ResidueModule(p, L.group, 0, tuple(() for _ in L.group.elements()))
    frame_rows = kfield.transpose(image + complement)
    mats = []
    for g in L.group.elements():
        dual = L.action[g].inverse().transpose().residue_rows()
        block = [[0] * d for _ in range(d)]
        for c, vec in enumerate(complement):
            moved = [sum(dual[i][j] * vec[j] for j in range(n)) % p for i in range(n)]
            coords = kfield.solve(frame_rows, moved, p)
            for r in range(d):
                block[r][c] = coords[len(image) + r]
        mats.append(block)
    return profile, ResidueModule(p, L.group, d, tuple(mats))


def coradical_is_semisimple(L: GammaLattice) -> bool:
    """Killed by p and, for split abelian Gamma, the sum of its eigenspaces"""
    profile, module = corad_with_action(L)
    if any(e != 1 for e in profile.exponents):
        return False
    if not is_split_abelian(L.group, L.prime):
        return True
    return sum(isotypic_multiplicities(module).values()) == module.dimension


def hom_space(M: ResidueModule, N: ResidueModule) -> List[List[List[int]]]:
    """Basis of {X : N(g) X = X M(g) for all g}, X of shape dim N x dim M"""
    p = M.prime
    dm, dn = M.dimension, N.dimension
    unknowns = dn * dm
    rows = []
    for g in M.group.elements():
        Mg, Ng = M.matrix(g), N.matrix(g)
        for r in range(dn):
            for c in range(dm):
                eq = [0] * unknowns
                for s in range(dn):
                    eq[s * dm + c] += Ng[r][s]
                for s in range(dm):
                    eq[r * dm + s] -= Mg[s][c]
                rows.append([x % p for x in eq])
    basis = kfield.nullspace(rows, unknowns, p)
    return [[vec[r * dm:(r + 1) * dm] for r in range(dn)] for vec in basis]


def _combine(basis: Sequence[List[List[int]]], coeffs: Sequence[int], p: int) -> List[List[int]]:
    rows, cols = len(basis[0]), len(basis[0][0])
    return [[sum(c * b[r][s] for c, b in zip(coeffs, basis)) % p for s in range(cols)]
            for r in range(rows)]


def kgamma_iso_test(M: ResidueModule, N: ResidueModule, seed: int = 0,
                    exhaustive_limit: int = KGAMMA_EXHAUSTIVE_LIMIT,
                    random_tries: int = KGAMMA_RANDOM_TRIES) -> bool:
    """An invertible Gamma-equivariant k-matrix M -> N exists"""
    if M.prime != N.prime or M.group != N.group:
        raise PrimeMismatchError("modules over different primes or groups")
    if M.dimension != N.dimension:
        return False
    if M.dimension == 0:
        return True
    p = M.prime
    basis = hom_space(M, N)
    if not basis:
        return False
    if p ** len(basis) <= exhaustive_limit:
        for coeffs in product(range(p), repeat=len(basis)):
            if kfield.determinant_nonzero(_combine(basis, coeffs, p), p):
                return True
        return False
    rng = random.Random(seed)
    for _ in range(random_tries):
        coeffs = [rng.randrange(p) for _ in basis]
        if kfield.determinant_nonzero(_combine(basis, coeffs, p), p):
            return True
    logger.warning(f"⚠️ No invertible equivariant map in {random_tries} random tries "
                   f"(Hom dimension {len(basis)})")
    return False


# ---------------------------------------------------------------------------
# Isometry decision (split abelian Gamma)
# ---------------------------------------------------------------------------

def character_idempotent(L: GammaLattice, chi: Sequence[int]) -> PMatrix:
    """e_chi = |Gamma|^-1 sum_g chi(g)^-1 rho(g) for a +-1 valued character"""
    p = L.prime
    values = signed_values(chi, p)
    total = PMatrix.zeros(L.rank, L.rank, p)
    for g in L.group.elements():
        total = total + L.action[g].scaled(values[g])
    return total.scaled(Fraction(1, L.group.order))


def _real_components_agree(L: GammaLattice, M: GammaLattice) -> bool:
    p = L.prime
    for chi in residue_characters(L.group, p):
        if not is_real_character(chi, p):
            continue
        grams = []
        for lat in (L, M):
            B = character_idempotent(lat, chi).column_space()
            grams.append(lat.gram.congruent(B) if B.ncols else None)
        if (grams[0] is None) != (grams[1] is None):
            return False
        if grams[0] is None:
            continue
        if grams[0].nrows != grams[1].nrows:
            return False
        if rational_class_of_matrix(grams[0]) != rational_class_of_matrix(grams[1]):
            logger.debug(f"real character {signed_values(chi, p)}: rational classes differ")
            return False
    return True


def gamma_isometric_split_abelian(L: GammaLattice, M: GammaLattice, seed: int = 0,
                                  exhaustive_limit: int = KGAMMA_EXHAUSTIVE_LIMIT,
                                  random_tries: int = KGAMMA_RANDOM_TRIES) -> bool:
    """
    Isometry of nearly unimodular Gamma-forms: isomorphic lattices, isomorphic
    coradicals (as k Gamma-modules) and rationally isometric Gamma-forms.

    Rationally the space splits into character eigenspaces. Real characters
    carry quadratic forms compared by their Q_p class; a pair chi, chi^-1 spans
    a hyperbolic piece fixed by its dimension, which the module test covers.
    """
    if L.prime != M.prime:
        raise PrimeMismatchError("Gamma-forms live over different primes")
    if L.group != M.group:
        raise PreconditionError("Gamma-forms carry different groups")
    if not is_split_abelian(L.group, L.prime):
        raise PreconditionError(f"Gamma must be abelian with exponent dividing p - 1 = {L.prime - 1}")
    for lat in (L, M):
        if not is_nearly_unimodular(lat.form):
            raise NotNearlyUnimodularError("Gamma-form is not nearly unimodular")
    if L.rank != M.rank:
        return False
    if not kgamma_iso_test(L.residue_module(), M.residue_module(), seed, exhaustive_limit, random_tries):
        logger.debug("underlying k Gamma-modules differ")
        return False
    profile_l, corad_l = corad_with_action(L)
    profile_m, corad_m = corad_with_action(M)
    if profile_l != profile_m:
        return False
    if not kgamma_iso_test(corad_l, corad_m, seed, exhaustive_limit, random_tries):
        logger.debug("coradicals differ as k Gamma-modules")
        return False
    return _real_components_agree(L, M)


# ---------------------------------------------------------------------------
# Equivariant Hensel lifting
# ---------------------------------------------------------------------------

def average_equivariant(L: GammaLattice, M: GammaLattice, X: PMatrix) -> PMatrix:
    """|Gamma|^-1 sum_g rho(g) X rho'(g)^-1; fixes X when rho(g) X = X rho'(g)"""
    total = PMatrix.zeros(X.nrows, X.ncols, X.prime)
    for g in L.group.elements():
        total = total + L.action[g] @ X @ M.action[g].inverse()
    return total.scaled(Fraction(1, L.group.order))


def is_equivariant_mod(L: GammaLattice, M: GammaLattice, X: PMatrix, k: int) -> bool:
    return all((L.action[g] @ X).congruent_mod(X @ M.action[g], k) for g in L.group.elements())


def equivariant_lift_isometry(L: GammaLattice, M: GammaLattice, X0: PMatrix,
                              k: int = DEFAULT_PRECISION, max_steps: int = 64) -> PMatrix:
    """
    X with X^T G X = G' and rho(g) X = X rho'(g) modulo p^k, from such an X0 mod p.

    Newton steps X <- X (I - 1/2 G'^-1 D) keep equivariance; each step is
    followed by the averaging projection and reduction into [0, p^k).
    Averaging fixes X modulo p^m when p does not divide |Gamma|, so a lift that
    stops being invertible is an internal fault and raises InvarianceError.
    """
    if L.group != M.group or L.prime != M.prime:
        raise PreconditionError("Gamma-forms carry different groups or primes")
    p, n = L.prime, L.rank
    for lat, label in ((L, "source"), (M, "target")):
        if not lat.form.is_unimodular():
            raise NotUnimodularError(f"{label} Gamma-form is not unimodular")
    if X0.shape != (n, M.rank) or not X0.is_integral():
        raise NotAnIsometryError("seed must be an integral square matrix")
    if not is_equivariant_mod(L, M, X0, 1):
        raise NotAnIsometryError("seed is not equivariant modulo p")
    G, Gt = L.gram, M.gram
    if not G.congruent(X0).congruent_mod(Gt, 1):
        raise NotAnIsometryError("seed is not an isometry modulo p")

    X = average_equivariant(L, M, X0).reduced(k)
    Gt_inv = Gt.inverse()
    identity = PMatrix.identity(n, p)
    for step in range(max_steps):
        defect = G.congruent(X) - Gt
        m = defect.min_valuation()
        if m >= k:
            break
        pm = Fraction(p) ** m
        C = (Gt_inv @ defect.scaled(1 / pm)).scaled(Fraction(-1, 2))
        X = average_equivariant(L, M, X @ (identity + C.scaled(pm))).reduced(k)
        if not X.is_invertible_over_r():
            raise InvarianceError("lift lost invertibility")
        logger.debug(f"equivariant Newton step {step + 1}: defect valuation {m}")
    else:
        raise RetryExhaustedError(f"equivariant lift did not reach precision {k}")
    if not is_equivariant_mod(L, M, X, k) or not G.congruent(X).congruent_mod(Gt, k):
        raise InvarianceError("equivariant lift failed verification")
    return X


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def twist(L: GammaLattice, X: PMatrix) -> GammaLattice:
    """Transport along X in GL_n(R): Gram X^T G X and action X^-1 rho X"""
    if not X.is_invertible_over_r():
        raise NotAnIsometryError("twist matrix must lie in GL_n(Z_(p))")
    X_inv = X.inverse()
    return GammaLattice(L.group, tuple(X_inv @ rho @ X for rho in L.action), L.gram.congruent(X))


def orthogonal_sum(parts: Sequence[GammaLattice]) -> GammaLattice:
    if not parts:
        raise PreconditionError("orthogonal sum of no Gamma-forms")
    group, p = parts[0].group, parts[0].prime
    action = tuple(PMatrix.block_diagonal([lat.action[g] for lat in parts], p)
                   for g in group.elements())
    return GammaLattice(group, action, PMatrix.block_diagonal([lat.gram for lat in parts], p))


def random_integral_unit(n: int, p: int, rng: random.Random, max_retries: int = 50) -> PMatrix:
    for _ in range(max_retries):
        X = PMatrix.from_rows([[rng.randint(-p, p) for _ in range(n)] for _ in range(n)], p)
        d = X.det()
        if d != 0 and valuation(d, p) == 0:
            return X
    raise RetryExhaustedError("could not draw an element of GL_n(Z_(p))")


def random_gamma_form(group: FiniteGroup, p: int, rng: random.Random,
                      pieces: int = 2, nearly_unimodular: bool = True, twisted: bool = True,
                      max_retries: int = 50) -> GammaLattice:
    """
    Orthogonal sum of character lines (+-1 characters) and regular copies with
    scalar Gram, scaled by units or p times units, then transported along a
    random element of GL_n(R).
    """
    if group.order % p == 0:
        raise PreconditionError(f"|Gamma| = {group.order} is divisible by p = {p}")
    real_chars = [signed_values(chi, p) for chi in residue_characters(group, p)
                  if is_real_character(chi, p)]
    parts = []
    for _ in range(pieces):
        c = rng.randrange(1, p)
        if nearly_unimodular and rng.randrange(2):
            c *= p
        if real_chars and rng.randrange(2):
            values = rng.choice(real_chars)
            parts.append(GammaLattice(group, character_action(group, values, p),
                                      PMatrix.from_rows([[c]], p)))
        else:
            parts.append(GammaLattice(group, regular_action(group, p),
                                      PMatrix.identity(group.order, p).scaled(c)))
    L = orthogonal_sum(parts)
    if twisted:
        L = twist(L, random_integral_unit(L.rank, p, rng, max_retries))
    return L
