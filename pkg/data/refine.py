#!/usr/bin/env python3
"""
Lattice refinement: from a nonsingular rational quadratic space and a full
lattice P, produce a nearly unimodular lattice in the same rational class.

Each round replaces P by P ∩ P̃ (P̃ the dual lattice), reads the elementary
divisors p^d_i of P̃/P, and for n = max(d_i) - 1 > 0 moves to P + p^n P̃.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional
import logging

from data.exceptions import (SingularFormError, NotSymmetricError, SizeMismatchError,
                             RetryExhaustedError)
from data.lattice_forms import GramForm
from data.plocal import INFINITY
from data.pmatrix import PMatrix
from data.smith import SmithProfile, smith_normal_form, smith_profile

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AmbientForm:
    """Rational Gram matrix gram_F together with a basis (columns) of a full lattice"""
    gram_F: PMatrix
    basis: PMatrix

    def __post_init__(self):
        if not self.gram_F.is_square() or not self.gram_F.is_symmetric():
            raise NotSymmetricError("ambient Gram matrix must be square and symmetric")
        if self.gram_F.det() == 0:
            raise SingularFormError("ambient form is singular")
        if self.basis.shape != self.gram_F.shape:
            raise SizeMismatchError("lattice basis must be square of the ambient size")
        if self.basis.det() == 0:
            raise SingularFormError("lattice basis is not invertible over Q")

    @classmethod
    def standard(cls, gram_F: PMatrix, basis: Optional[PMatrix] = None) -> "AmbientForm":
        """Caller basis, or p^c times the standard lattice with c the least making the Gram integral"""
        if basis is None:
            low = gram_F.min_valuation()
            c = 0 if low == INFINITY or low >= 0 else (-int(low) + 1) // 2
            basis = PMatrix.identity(gram_F.nrows, gram_F.prime).scaled(Fraction(gram_F.prime) ** c)
        return cls(gram_F, basis)

    @property
    def prime(self) -> int:
        return self.gram_F.prime

    @property
    def rank(self) -> int:
        return self.gram_F.nrows

    def restricted_gram(self) -> PMatrix:
        """Gram matrix of the form in the lattice basis"""
        return self.gram_F.congruent(self.basis)

    def restricted_form(self) -> GramForm:
        return GramForm(self.restricted_gram())

    def with_basis(self, basis: PMatrix) -> "AmbientForm":
        return AmbientForm(self.gram_F, basis)

    def to_json(self) -> dict:
        return {"p": self.prime, "epsilon": 1, "gram": self.restricted_gram().to_json(),
                "basis": self.basis.to_json()}


@dataclass(frozen=True)
class DualPair:
    """A lattice basis, the basis of its dual and the elementary divisors of P̃/P"""
    basis: PMatrix
    dual_basis: PMatrix
    quotient_profile: SmithProfile

    @property
    def contained(self) -> bool:
        """P ⊆ P̃"""
        return all(e >= 0 for e in self.quotient_profile.exponents)

    @property
    def colength(self) -> int:
        return sum(self.quotient_profile.exponents)


@dataclass
class RefinementStep:
    iteration: int
    n: int
    colength_before: int
    colength_after: int
    profile: List[int]
    chain_holds: bool

    def to_json(self) -> dict:
        return {"iteration": self.iteration, "n": self.n,
                "colength_before": self.colength_before, "colength_after": self.colength_after,
                "profile": self.profile, "containment_chain": self.chain_holds}


@dataclass
class RefinementResult:
    output: AmbientForm
    initial_colength: int
    trace: List[RefinementStep] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.trace)


def dual_lattice(a: AmbientForm) -> DualPair:
    """P̃ = {x : g(P, x) ⊆ R} has basis B H^-1 where H = B^T G B"""
    H = a.restricted_gram()
    return DualPair(a.basis, a.basis @ H.inverse(), smith_profile(H))


def dual_of(a: AmbientForm) -> AmbientForm:
    return a.with_basis(dual_lattice(a).dual_basis)


def lattice_contains(outer: PMatrix, inner: PMatrix) -> bool:
    """Lattice spanned by inner columns lies in the lattice spanned by outer columns"""
    return (outer.inverse() @ inner).is_integral()


def intersect_with_dual(a: AmbientForm) -> AmbientForm:
    """Replace P by P ∩ P̃; unchanged when P ⊆ P̃ already"""
    p = a.prime
    H = a.restricted_gram()
    low = H.min_valuation()
    if low >= 0:
        return a
    m = -int(low)
    pm = Fraction(p) ** m
    profile, _, V = smith_normal_form(H.scaled(pm))
    scale = PMatrix.diagonal([Fraction(p) ** max(0, m - d) for d in profile.exponents], p)
    logger.debug(f"intersect with dual: m={m}, exponents={list(profile.exponents)}")
    return a.with_basis(a.basis @ V @ scale)


def _refinement_step(a: AmbientForm):
    """One move P -> P + p^n P̃ on a normalized lattice; None when already nearly unimodular"""
    p = a.prime
    profile, _, V = smith_normal_form(a.restricted_gram())
    top = max(profile.exponents)
    n = top - 1
    if n <= 0:
        return None
    scale = PMatrix.diagonal([Fraction(p) ** min(0, n - d) for d in profile.exponents], p)
    return n, a.with_basis(a.basis @ V @ scale)


def refine_with_trace(a: AmbientForm, max_iterations: Optional[int] = None) -> RefinementResult:
    current = intersect_with_dual(a)
    start = dual_lattice(current)
    initial = start.colength
    logger.info(f"🔄 Refining rank-{a.rank} lattice at p={a.prime}, initial colength {initial}")
    trace: List[RefinementStep] = []
    limit = initial if max_iterations is None else max_iterations
    while True:
        before = dual_lattice(current)
        step = _refinement_step(current)
        if step is None:
            break
        n, nxt = step
        after = dual_lattice(nxt)
        chain = (lattice_contains(nxt.basis, current.basis)
                 and not lattice_contains(current.basis, nxt.basis)
                 and lattice_contains(after.dual_basis, nxt.basis)
                 and lattice_contains(before.dual_basis, after.dual_basis)
                 and not lattice_contains(after.dual_basis, before.dual_basis))
        trace.append(RefinementStep(len(trace) + 1, n, before.colength, after.colength,
                                    list(before.quotient_profile.exponents), chain))
        logger.info(f"   iteration {len(trace)}: n={n}, colength {before.colength} -> {after.colength}")
        current = nxt
        if len(trace) > limit:
            raise RetryExhaustedError(f"refinement did not terminate within {limit} iteration(s)")
    logger.info(f"✅ Refinement finished after {len(trace)} iteration(s)")
    return RefinementResult(current, initial, trace)


def refine_to_nearly_unimodular(a: AmbientForm) -> AmbientForm:
    return refine_with_trace(a).output
