"""
Seeded random generators for forms, morphisms and contexts used by the campaigns
"""

from fractions import Fraction
from typing import List, Sequence, Tuple
import random

from data.exceptions import RetryExhaustedError
from data.lattice_forms import GramForm
from data.plocal import legendre, valuation
from data.pmatrix import PMatrix
from data.transfer import MorphismTriple


def random_unit(rng: random.Random, p: int) -> int:
    """Nonzero integer in [-p^2, p^2] prime to p"""
    while True:
        u = rng.randint(1, p * p)
        if u % p:
            return u if rng.randrange(2) else -u


def random_gl(rng: random.Random, n: int, p: int, max_retries: int = 50) -> PMatrix:
    """Random element of GL_n(Z_(p)) with small integer entries"""
    for _ in range(max_retries):
        X = PMatrix.from_rows([[rng.randint(-p, p) for _ in range(n)] for _ in range(n)], p)
        d = X.det()
        if d != 0 and valuation(d, p) == 0:
            return X
    raise RetryExhaustedError(f"could not draw an element of GL_{n}(Z_({p}))")


def random_nearly_unimodular_diagonal(rng: random.Random, p: int, rank: int) -> List[int]:
    return [random_unit(rng, p) * (p if rng.randrange(2) else 1) for _ in range(rank)]


def random_nearly_unimodular(rng: random.Random, p: int, rank: int, mixed: bool = True) -> GramForm:
    """Diagonal entries u or p u, optionally mixed by a random change of basis"""
    f = GramForm.diagonal(random_nearly_unimodular_diagonal(rng, p, rank), p)
    return f.congruent(random_gl(rng, rank, p)) if mixed else f


def random_unimodular(rng: random.Random, p: int, rank: int) -> GramForm:
    return GramForm.diagonal([random_unit(rng, p) for _ in range(rank)], p)


def random_rational_form(rng: random.Random, p: int, rank: int, low: int = -2, high: int = 2,
                         max_retries: int = 50) -> PMatrix:
    """Nonsingular symmetric rational matrix with entry valuations in [low, high]"""
    for _ in range(max_retries):
        rows = [[Fraction(0)] * rank for _ in range(rank)]
        for i in range(rank):
            for j in range(i, rank):
                if i != j and rng.randrange(3) == 0:
                    continue
                value = Fraction(random_unit(rng, p)) * Fraction(p) ** rng.randint(low, high)
                rows[i][j] = rows[j][i] = value
        G = PMatrix.from_rows(rows, p)
        if G.det() != 0:
            return G
    raise RetryExhaustedError("could not draw a nonsingular rational form")


def random_morphism(rng: random.Random, p: int, max_rank: int = 4) -> MorphismTriple:
    """Integral Q_rank x P_rank map with entries of valuation 0..2 (or zero)"""
    P_rank, Q_rank = rng.randint(1, max_rank), rng.randint(1, max_rank)
    rows = [[0 if rng.randrange(4) == 0 else random_unit(rng, p) * p ** rng.randint(0, 2)
             for _ in range(P_rank)] for _ in range(Q_rank)]
    return MorphismTriple.from_matrix(PMatrix.from_rows(rows, p))


def transported_morphism(rng: random.Random, t: MorphismTriple) -> MorphismTriple:
    """psi f phi^-1 for random psi in GL(Q), phi in GL(P): an isomorphic triple"""
    psi = random_gl(rng, t.Q_rank, t.prime)
    phi = random_gl(rng, t.P_rank, t.prime)
    return MorphismTriple.from_matrix(psi @ t.map @ phi.inverse())


def anisotropic_units(rng: random.Random, p: int, size: int) -> List[int]:
    """Units u_1..u_size whose residue form is anisotropic (size <= 2)"""
    units = [random_unit(rng, p) for _ in range(min(size, 1))]
    while len(units) < size:
        u = random_unit(rng, p)
        if legendre(-units[0] * u, p) == -1:
            units.append(u)
    return units


def random_transfer_diagonal(rng: random.Random, p: int, sizes: Sequence[int] = (0, 1, 2)) -> List[int]:
    """Diagonal (units first, then p-multiples) with anisotropic residue constituents"""
    while True:
        n0, n1 = rng.choice(sizes), rng.choice(sizes)
        if n0 + n1:
            break
    return anisotropic_units(rng, p, n0) + [p * u for u in anisotropic_units(rng, p, n1)]


def hensel_instance(rng: random.Random, p: int, rank: int) -> Tuple[PMatrix, PMatrix, PMatrix]:
    """(G, G', X0): unimodular G, G' = X^T G X and a residue seed X0 = X + p E"""
    G = random_unimodular(rng, p, rank).gram
    X = random_gl(rng, rank, p)
    noise = PMatrix.from_rows([[p * rng.randint(-p, p) for _ in range(rank)] for _ in range(rank)], p)
    return G, G.congruent(X), X + noise
