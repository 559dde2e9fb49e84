#!/usr/bin/env python3
"""
Exact arithmetic in the localization Z_(p) at an odd prime p.

Scalars are plain fractions.Fraction values; the prime travels alongside as an
explicit context argument. PLocalNumber bundles the two for callers that want a
self-describing value.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple, Union
import logging

from sympy import isprime, multiplicity, oo
from sympy.ntheory import legendre_symbol

from data.exceptions import (InvalidPrimeError, NotAUnitError, ZeroArgumentError,
                         DocumentError, PrimeMismatchError)

logger = logging.getLogger(__name__)

INFINITY = oo

Rational = Union[int, Fraction]


def check_prime(p: int) -> int:
    """Validate a prime context; p = 2 is rejected"""
    if isinstance(p, bool) or not isinstance(p, int):
        raise InvalidPrimeError(f"prime must be an integer, got {p!r}")
    if p == 2:
        raise InvalidPrimeError("p = 2 is not supported (2 must be a unit)")
    if not isprime(p):
        raise InvalidPrimeError(f"{p} is not a prime")
    return p


def to_fraction(value) -> Fraction:
    """Parse an int, Fraction or "num/den" string into a Fraction"""
    if isinstance(value, bool):
        raise DocumentError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise DocumentError(f"not a rational: {value!r}")
    raise DocumentError(f"not a rational: {value!r}")


def format_rational(x: Rational) -> str:
    """Serialize as "num/den", omitting the denominator when it is 1"""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def valuation(x: Rational, p: int):
    """p-adic valuation; INFINITY for zero"""
    x = Fraction(x)
    if x == 0:
        return INFINITY
    return int(multiplicity(p, abs(x.numerator))) - int(multiplicity(p, x.denominator))


def unit_part(x: Rational, p: int) -> Fraction:
    """x / p^v(x) for nonzero x"""
    x = Fraction(x)
    if x == 0:
        raise ZeroArgumentError("zero has no unit part")
    v = valuation(x, p)
    return x / Fraction(p) ** v


def split_unit(x: Rational, p: int) -> Tuple[int, Fraction]:
    """Return (v, u) with x = p^v * u"""
    v = valuation(x, p)
    return v, unit_part(x, p)


def is_local(x: Rational, p: int) -> bool:
    """True iff x lies in Z_(p)"""
    return Fraction(x).denominator % p != 0


def residue(x: Rational, p: int) -> int:
    """Image of x in k = F_p; x must be in Z_(p)"""
    x = Fraction(x)
    if x.denominator % p == 0:
        raise NotAUnitError(f"{format_rational(x)} is not in Z_({p})")
    return (x.numerator * pow(x.denominator, -1, p)) % p


def reduce_mod(x: Rational, p: int, k: int) -> int:
    """Representative of x in Z/p^k, in [0, p^k)"""
    x = Fraction(x)
    modulus = p ** k
    if x.denominator % p == 0:
        raise NotAUnitError(f"{format_rational(x)} is not in Z_({p})")
    return (x.numerator * pow(x.denominator, -1, modulus)) % modulus


def legendre(u: Rational, p: int) -> int:
    """Legendre symbol of a unit u of Z_(p)"""
    u = Fraction(u)
    if u == 0 or valuation(u, p) != 0:
        raise NotAUnitError(f"{format_rational(u)} is not a unit at {p}")
    return int(legendre_symbol(residue(u, p), p))


def hilbert_symbol(a: Rational, b: Rational, p: int) -> int:
    """Hilbert symbol (a, b)_p for odd p"""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ZeroArgumentError("Hilbert symbol is undefined at zero")
    alpha, u = split_unit(a, p)
    beta, v = split_unit(b, p)
    sign = -1 if (alpha * beta * (p - 1) // 2) % 2 else 1
    result = sign
    if beta % 2:
        result *= legendre(u, p)
    if alpha % 2:
        result *= legendre(v, p)
    return result


def nonresidue(p: int) -> int:
    """Smallest positive quadratic nonresidue mod p"""
    for candidate in range(2, p):
        if legendre_symbol(candidate, p) == -1:
            return candidate
    raise InvalidPrimeError(f"no nonresidue modulo {p}")


@dataclass(frozen=True)
class PLocalNumber:
    """An element of Q with its prime context; arithmetic stays exact"""
    value: Fraction
    prime: int

    def __post_init__(self):
        object.__setattr__(self, 'value', Fraction(self.value))
        check_prime(self.prime)

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def denominator(self) -> int:
        return self.value.denominator

    @property
    def valuation(self):
        return valuation(self.value, self.prime)

    def is_integral(self) -> bool:
        return is_local(self.value, self.prime)

    def is_unit(self) -> bool:
        return self.value != 0 and self.valuation == 0

    def residue(self) -> int:
        return residue(self.value, self.prime)

    def _coerce(self, other) -> Fraction:
        if isinstance(other, PLocalNumber):
            if other.prime != self.prime:
                raise PrimeMismatchError(f"primes {self.prime} and {other.prime} differ")
            return other.value
        return Fraction(other)

    def __add__(self, other):
        return PLocalNumber(self.value + self._coerce(other), self.prime)

    __radd__ = __add__

    def __sub__(self, other):
        return PLocalNumber(self.value - self._coerce(other), self.prime)

    def __rsub__(self, other):
        return PLocalNumber(self._coerce(other) - self.value, self.prime)

    def __mul__(self, other):
        return PLocalNumber(self.value * self._coerce(other), self.prime)

    __rmul__ = __mul__

    def __truediv__(self, other):
        divisor = self._coerce(other)
        if divisor == 0:
            raise ZeroArgumentError("division by zero")
        return PLocalNumber(self.value / divisor, self.prime)

    def __neg__(self):
        return PLocalNumber(-self.value, self.prime)

    def __eq__(self, other):
        if isinstance(other, PLocalNumber):
            return self.prime == other.prime and self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.prime))

    def __str__(self):
        return format_rational(self.value)
