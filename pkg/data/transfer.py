#!/usr/bin/env python3
"""
Transfer into the endomorphism order and the descent experiment.

A diagonal nearly unimodular form G = diag(a_1..a_N) with v(a_i) in {0, 1}
determines the order E = {X : v(X_ij) >= max(0, v(a_j) - v(a_i))} and the
involution tau(X) = G^-1 X^T G. Hermitian forms h with the same coradical as G
correspond to tau-symmetric units a = G^-1 h of E.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple
import logging
import random

from data.enums import WitnessKind
from data.exceptions import (PreconditionError, PrimeMismatchError, SizeMismatchError,
                         RetryExhaustedError, NotAnIsometryError)
from data.lattice_forms import GramForm, jordan_invariant_oracle, is_nearly_unimodular, OracleEntry
from data.orders import BlockOrder, ValuationIdeal, contains, radical_power
from data.plocal import INFINITY, valuation, unit_part, legendre
from data.pmatrix import PMatrix
from data.smith import smith_normal_form

logger = logging.getLogger(__name__)

DEFAULT_DENOMINATOR_BOUND = 3
DEFAULT_MAX_RETRIES = 50


@dataclass(frozen=True)
class MorphismTriple:
    """(P, f, Q): an R-linear map f: P -> Q between free modules, as a Q_rank x P_rank matrix"""
    prime: int
    P_rank: int
    Q_rank: int
    map: PMatrix

    def __post_init__(self):
        if self.map.shape != (self.Q_rank, self.P_rank):
            raise SizeMismatchError(f"map has shape {self.map.shape}, "
                                    f"expected {(self.Q_rank, self.P_rank)}")
        if self.map.prime != self.prime:
            raise PrimeMismatchError("map prime differs from triple prime")
        if not self.map.is_integral():
            raise PreconditionError("morphism entries must lie in Z_(p)")

    @classmethod
    def from_matrix(cls, M: PMatrix) -> "MorphismTriple":
        return cls(M.prime, M.ncols, M.nrows, M)


@dataclass(frozen=True)
class TransferContext:
    """Base form G_f, its order E and the involution tau(X) = G_f^-1 X^T G_f"""
    form: GramForm
    order: BlockOrder
    n0: int
    n1: int
    anisotropic: bool

    @property
    def prime(self) -> int:
        return self.form.prime

    @property
    def N(self) -> int:
        return self.form.rank

    @property
    def entry_valuations(self) -> List[int]:
        return [valuation(x, self.prime) for x in self.form.gram.diagonal_entries()]

    @property
    def block_groups(self) -> int:
        return int(self.n0 > 0) + int(self.n1 > 0)

    def bound(self, i: int, j: int) -> int:
        v = self.entry_valuations
        return max(0, v[j] - v[i])

    def tau(self, X: PMatrix) -> PMatrix:
        G = self.form.gram
        return G.inverse() @ X.transpose() @ G

    def in_order(self, X: PMatrix) -> bool:
        return contains(self.order, X)

    def is_order_unit(self, X: PMatrix) -> bool:
        """X in E^x: X in E, invertible, and X^-1 in E"""
        if not self.in_order(X) or X.det() == 0:
            return False
        return self.in_order(X.inverse())

    def is_tau_symmetric_unit(self, a: PMatrix) -> bool:
        return self.tau(a) == a and self.is_order_unit(a)

    def to_json(self) -> dict:
        return {"form": self.form.to_json(), "order_sizes": list(self.order.sizes),
                "n0": self.n0, "n1": self.n1, "anisotropic": self.anisotropic}


@dataclass(frozen=True)
class CongruenceInstance:
    """Candidate x for the congruence x^tau x = a with a a tau-symmetric unit of E"""
    context: TransferContext
    a: PMatrix
    x: PMatrix

    def __post_init__(self):
        if not self.context.is_tau_symmetric_unit(self.a):
            raise PreconditionError("a is not a tau-symmetric unit of E")


@dataclass
class DescentReport:
    trials: int = 0
    integral_witness_count: int = 0
    rational_only_count: int = 0
    not_witness_count: int = 0
    claim9_violations: int = 0
    claim11_violations: int = 0
    anisotropic: bool = True
    asserted: bool = True
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        if not self.asserted:
            return True
        return (self.integral_witness_count == self.trials and self.claim9_violations == 0
                and self.claim11_violations == 0)

    def merge(self, other: "DescentReport") -> "DescentReport":
        return DescentReport(self.trials + other.trials,
                             self.integral_witness_count + other.integral_witness_count,
                             self.rational_only_count + other.rational_only_count,
                             self.not_witness_count + other.not_witness_count,
                             self.claim9_violations + other.claim9_violations,
                             self.claim11_violations + other.claim11_violations,
                             self.anisotropic and other.anisotropic,
                             self.asserted and other.asserted,
                             (self.failures + other.failures)[:10])

    def to_json(self) -> dict:
        return {"trials": self.trials, "integral_witness_count": self.integral_witness_count,
                "rational_only_count": self.rational_only_count,
                "not_witness_count": self.not_witness_count,
                "claim9_violations": self.claim9_violations,
                "claim11_violations": self.claim11_violations,
                "anisotropic": self.anisotropic, "asserted": self.asserted,
                "passed": self.passed}


# ---------------------------------------------------------------------------
# Context construction
# ---------------------------------------------------------------------------

def residue_block_anisotropic(units: Sequence[Fraction], p: int) -> bool:
    """Diagonal unit form over F_p is anisotropic: dim <= 1, or dim 2 with -u1 u2 a nonsquare"""
    if len(units) <= 1:
        return True
    if len(units) == 2:
        return legendre(-units[0] * units[1], p) == -1
    return False


def build_context(f: GramForm) -> TransferContext:
    p = f.prime
    if f.epsilon != 1 or not f.gram.is_diagonal():
        raise PreconditionError("transfer context needs a diagonal symmetric form")
    entries = f.gram.diagonal_entries()
    if any(x == 0 for x in entries):
        raise PreconditionError("diagonal form is singular")
    vals = [valuation(x, p) for x in entries]
    if any(v not in (0, 1) for v in vals) or not is_nearly_unimodular(f):
        raise PreconditionError(f"entry valuations must lie in {{0, 1}}, got {vals}")
    if vals != sorted(vals):
        raise PreconditionError("diagonal must list unit entries before p-multiples")
    n0 = vals.count(0)
    n1 = len(vals) - n0
    order = BlockOrder(p, (n0, n1) if n0 and n1 else (len(vals),))
    units0 = [unit_part(x, p) for x in entries[:n0]]
    units1 = [unit_part(x, p) for x in entries[n0:]]
    anisotropic = residue_block_anisotropic(units0, p) and residue_block_anisotropic(units1, p)
    ctx = TransferContext(f, order, n0, n1, anisotropic)
    _verify_context(ctx)
    logger.debug(f"transfer context at p={p}: blocks ({n0}, {n1}), anisotropic={anisotropic}")
    return ctx


def tau_bounds(ctx: TransferContext, I: ValuationIdeal) -> ValuationIdeal:
    """Bounds of tau(I): position (j, i) receives I(i, j) + v(a_i) - v(a_j)"""
    v = ctx.entry_valuations
    n = ctx.N
    return ValuationIdeal([[I.bounds[i][j] + v[i] - v[j] for i in range(n)] for j in range(n)])


def _verify_context(ctx: TransferContext):
    p, n = ctx.prime, ctx.N
    E = ValuationIdeal([[ctx.bound(i, j) for j in range(n)] for i in range(n)])
    if E.bounds != ctx.order.pattern.bounds:
        raise PreconditionError("order bounds do not match the block order")
    if tau_bounds(ctx, E) != E:
        raise PreconditionError("tau does not preserve E")
    if ctx.block_groups > 2:
        raise PreconditionError("more than two block groups")
    for i in range(n):
        for j in range(n):
            e = PMatrix.zeros(n, n, p).replace(i, j, 1)
            if ctx.tau(ctx.tau(e)) != e:
                raise PreconditionError("tau is not an involution")
        e_ii = PMatrix.zeros(n, n, p).replace(i, i, 1)
        if ctx.tau(e_ii) != e_ii:
            raise PreconditionError(f"tau moves the idempotent e_{i}{i}")


def tau_preserves_radical_powers(ctx: TransferContext, low: int = -3, high: int = 3) -> bool:
    return all(tau_bounds(ctx, radical_power(ctx.order, n)) == radical_power(ctx.order, n)
               for n in range(low, high + 1))


# ---------------------------------------------------------------------------
# Transfer and morphisms
# ---------------------------------------------------------------------------

def transfer_form(ctx: TransferContext, h) -> PMatrix:
    """a = G_f^-1 G_h for a symmetric (possibly rational) Gram matrix of the same rank"""
    G_h = h.gram if isinstance(h, GramForm) else h
    if G_h.prime != ctx.prime:
        raise PrimeMismatchError("forms live over different primes")
    if G_h.shape != (ctx.N, ctx.N):
        raise SizeMismatchError(f"rank mismatch: {G_h.nrows} vs {ctx.N}")
    if not G_h.is_symmetric():
        raise PreconditionError("transferred form must be symmetric")
    return ctx.form.gram.inverse() @ G_h


def untransfer(ctx: TransferContext, a: PMatrix) -> GramForm:
    """The form G_f a attached to a tau-symmetric element"""
    return GramForm(ctx.form.gram @ a)


def morphism_iso_test(t: MorphismTriple, u: MorphismTriple) -> bool:
    if t.prime != u.prime:
        raise PrimeMismatchError("triples live over different primes")
    if (t.P_rank, t.Q_rank) != (u.P_rank, u.Q_rank):
        return False
    return smith_normal_form(t.map)[0] == smith_normal_form(u.map)[0]


def morphism_isomorphism(t: MorphismTriple, u: MorphismTriple) -> Tuple[PMatrix, PMatrix]:
    """(phi, psi) in GL(P) x GL(Q) with psi f = f' phi, read off the two Smith forms"""
    if not morphism_iso_test(t, u):
        raise NotAnIsometryError("morphisms have different cokernels")
    _, U, V = smith_normal_form(t.map)
    _, U2, V2 = smith_normal_form(u.map)
    psi = U2.inverse() @ U
    phi = V2 @ V.inverse()
    if psi @ t.map != u.map @ phi or not (psi.is_invertible_over_r() and phi.is_invertible_over_r()):
        raise NotAnIsometryError("constructed pair failed verification")
    return phi, psi


# ---------------------------------------------------------------------------
# Congruence witnesses
# ---------------------------------------------------------------------------

def congruence_verify(inst: CongruenceInstance) -> WitnessKind:
    ctx = inst.context
    if inst.x.shape != inst.a.shape or ctx.tau(inst.x) @ inst.x != inst.a:
        return WitnessKind.NOT_WITNESS
    if ctx.is_order_unit(inst.x):
        return WitnessKind.INTEGRAL
    return WitnessKind.RATIONAL_ONLY


def _random_local(rng: random.Random, p: int, low: int, high: int) -> Fraction:
    c = rng.randint(-p * p, p * p)
    return Fraction(c) * Fraction(p) ** rng.randint(low, high)


def random_unitary(ctx: TransferContext, seed: int,
                   denominator_bound: int = DEFAULT_DENOMINATOR_BOUND,
                   max_retries: int = DEFAULT_MAX_RETRIES,
                   antisymmetric: Optional[PMatrix] = None) -> PMatrix:
    """Cayley transform u = (I - z)(I + z)^-1 of z = G^-1 S, S antisymmetric; u^tau u = I"""
    rng = random.Random(seed)
    p, n = ctx.prime, ctx.N
    G_inv = ctx.form.gram.inverse()
    identity = PMatrix.identity(n, p)
    for attempt in range(max_retries):
        if antisymmetric is None:
            rows = [[Fraction(0)] * n for _ in range(n)]
            for i in range(n):
                for j in range(i + 1, n):
                    rows[i][j] = _random_local(rng, p, -denominator_bound, 1)
                    rows[j][i] = -rows[i][j]
            S = PMatrix.from_rows(rows, p)
        else:
            S = antisymmetric
        z = G_inv @ S
        plus, minus = identity + z, identity - z
        if plus.det() == 0 or minus.det() == 0:
            if antisymmetric is not None:
                break
            continue
        u = minus @ plus.inverse()
        if ctx.tau(u) @ u != identity:
            raise NotAnIsometryError("Cayley transform is not unitary")
        return u
    raise RetryExhaustedError(f"no invertible Cayley transform after {max_retries} attempts")


def random_order_unit(ctx: TransferContext, rng: random.Random,
                      max_retries: int = DEFAULT_MAX_RETRIES) -> PMatrix:
    """Random x in E^x: integral entries obeying the bounds of E, unit determinant"""
    p, n = ctx.prime, ctx.N
    for _ in range(max_retries):
        rows = [[Fraction(rng.randint(-p, p)) * Fraction(p) ** ctx.bound(i, j) for j in range(n)]
                for i in range(n)]
        x = PMatrix.from_rows(rows, p)
        d = x.det()
        if d != 0 and valuation(d, p) == 0:
            return x
    raise RetryExhaustedError("could not draw a unit of E")


def claim9_violations(ctx: TransferContext, x: PMatrix) -> int:
    """Entries breaking v(tau(x)_ji) = v(x_ij) + v(a_i) - v(a_j)"""
    v = ctx.entry_valuations
    tx = ctx.tau(x)
    bad = 0
    for i in range(ctx.N):
        for j in range(ctx.N):
            lhs = valuation(tx[j, i], ctx.prime)
            rhs = valuation(x[i, j], ctx.prime)
            if rhs != INFINITY:
                rhs = rhs + v[i] - v[j]
            if lhs != rhs:
                bad += 1
    return bad


def claim11_violations(ctx: TransferContext, x: PMatrix) -> int:
    """Per column j and block group S: v(sum_S tau(x)_ji x_ij) equals the minimum term valuation"""
    p = ctx.prime
    tx = ctx.tau(x)
    groups = [range(0, ctx.n0), range(ctx.n0, ctx.N)]
    bad = 0
    for j in range(ctx.N):
        for group in groups:
            terms = [tx[j, i] * x[i, j] for i in group]
            if not terms:
                continue
            total = sum(terms, Fraction(0))
            lowest = min(valuation(t, p) for t in terms)
            if valuation(total, p) != lowest:
                bad += 1
    return bad


def descent_experiment(ctx: TransferContext, trials: int, seed: int,
                       denominator_bound: int = DEFAULT_DENOMINATOR_BOUND,
                       max_retries: int = DEFAULT_MAX_RETRIES) -> DescentReport:
    """Draw x = u x0 with u tau-unitary and x0 in E^x; the congruence x^tau x = a must descend"""
    for size in (ctx.n0, ctx.n1):
        if size > 2:
            raise PreconditionError(
                f"residue constituent of dimension {size}: anisotropic forms over F_p have dimension <= 2")
    report = DescentReport(anisotropic=ctx.anisotropic, asserted=ctx.anisotropic)
    if not ctx.anisotropic:
        logger.warning("⚠️ Residue form is isotropic: descent checks are logged, not asserted")
    rng = random.Random(seed)
    for trial in range(trials):
        x0 = random_order_unit(ctx, rng, max_retries)
        u = random_unitary(ctx, rng.randrange(2 ** 32), denominator_bound, max_retries)
        x = u @ x0
        a = ctx.tau(x) @ x
        report.trials += 1
        if not ctx.is_tau_symmetric_unit(a):
            report.not_witness_count += 1
            report.failures.append(f"trial {trial}: a is not a tau-symmetric unit")
            continue
        kind = congruence_verify(CongruenceInstance(ctx, a, x))
        if kind is WitnessKind.INTEGRAL:
            report.integral_witness_count += 1
        elif kind is WitnessKind.RATIONAL_ONLY:
            report.rational_only_count += 1
            report.failures.append(f"trial {trial}: witness {x} not in E")
        else:
            report.not_witness_count += 1
        report.claim9_violations += claim9_violations(ctx, x)
        report.claim11_violations += claim11_violations(ctx, x)
    if report.asserted and not report.passed:
        logger.error(f"❌ Descent failures: {report.failures[:3]}")
    elif not report.asserted:
        logger.info(f"Isotropic control: {report.integral_witness_count}/{report.trials} integral")
    return report


# ---------------------------------------------------------------------------
# Congruence classes
# ---------------------------------------------------------------------------

def congruence_class_invariants(ctx: TransferContext, a: PMatrix) -> List[OracleEntry]:
    """Jordan invariants of G_f a; equal labels iff tau-congruent"""
    if not ctx.is_tau_symmetric_unit(a):
        raise PreconditionError("a is not a tau-symmetric unit of E")
    return jordan_invariant_oracle(untransfer(ctx, a))


def tau_congruent(ctx: TransferContext, a: PMatrix, b: PMatrix) -> bool:
    return congruence_class_invariants(ctx, a) == congruence_class_invariants(ctx, b)
