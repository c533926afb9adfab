"""Exact rationals, primitive projective coordinates over Q, and Weil heights.

A point of P^n(Q) is stored as a tuple of coprime integers with the first
nonzero coordinate positive, so v and -v share one representative.  On such
coordinates the absolute logarithmic Weil height is log max|x_i|, computed
here in double precision (>= 50 bits relative); every comparison that must
be exact (h = 0, h(a) = h(b), additivity of products) is done on the
integers themselves, never on the logs.

Rationals are `fractions.Fraction` throughout the package: the stdlib type
already maintains gcd-reduced numerator / positive denominator form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import AllZero

Rational = Fraction


def format_rational(q: Fraction) -> str:
    """Serialize as "p/q", omitting the denominator when it is 1."""
    return str(q)


def parse_rational(text: str) -> Fraction:
    """Inverse of :func:`format_rational`; accepts "p" and "p/q"."""
    return Fraction(text.strip())


@dataclass(frozen=True)
class PrimitiveVector:
    """Coprime integer coordinates of a point of P^n(Q), sign-canonical."""

    coords: tuple[int, ...]

    def __post_init__(self):
        if not self.coords:
            raise AllZero("empty coordinate list")
        if all(c == 0 for c in self.coords):
            raise AllZero("all projective coordinates are zero")
        g = 0
        for c in self.coords:
            g = gcd(g, abs(c))
        if g != 1:
            raise ValueError(f"coordinates not coprime (gcd {g}): {self.coords}")
        for c in self.coords:
            if c != 0:
                if c < 0:
                    raise ValueError("first nonzero coordinate must be positive")
                break

    def __str__(self) -> str:
        return "(" + ":".join(str(c) for c in self.coords) + ")"

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def max_abs(self) -> int:
        return max(abs(c) for c in self.coords)


class P1Value(PrimitiveVector):
    """A point of P^1(Q): the affine value a/b, or infinity when b = 0."""

    def __post_init__(self):
        super().__post_init__()
        if len(self.coords) != 2:
            raise ValueError("P1Value needs exactly two coordinates")

    @property
    def is_infinity(self) -> bool:
        return self.coords[1] == 0

    def as_fraction(self) -> Fraction:
        if self.is_infinity:
            raise ZeroDivisionError("point at infinity has no affine value")
        return Fraction(self.coords[0], self.coords[1])


def _canonical_int_coords(nums: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for c in nums:
        g = gcd(g, abs(c))
    if g == 0:
        raise AllZero("all projective coordinates are zero")
    scaled = [c // g for c in nums]
    for c in scaled:
        if c != 0:
            if c < 0:
                scaled = [-x for x in scaled]
            break
    return tuple(scaled)


def normalize_projective(raw: Sequence[Fraction | int]) -> PrimitiveVector:
    """Canonical primitive representative of a projective point over Q.

    Clears denominators, divides out the gcd, and flips sign so the first
    nonzero coordinate is positive.  Raises :class:`AllZero` when every
    entry vanishes.
    """
    fracs = [Fraction(c) for c in raw]
    lcm = 1
    for f in fracs:
        lcm = lcm * f.denominator // gcd(lcm, f.denominator)
    nums = [int(f * lcm) for f in fracs]
    return PrimitiveVector(_canonical_int_coords(nums))


def p1_value(num: Fraction | int, den: Fraction | int) -> P1Value:
    """The point (num : den) of P^1 in canonical coordinates."""
    fn, fd = Fraction(num), Fraction(den)
    lcm = fn.denominator * fd.denominator // gcd(fn.denominator, fd.denominator)
    return P1Value(_canonical_int_coords([int(fn * lcm), int(fd * lcm)]))


P1_INFINITY = P1Value((1, 0))


def log_abs(n: int) -> float:
    """Natural log of |n| for a nonzero integer of any size."""
    # math.log takes arbitrary-precision ints directly (no float overflow)
    return math.log(abs(n))


def height_projective(point: PrimitiveVector) -> float:
    """Absolute logarithmic Weil height: log max|x_i| on primitive coords."""
    return log_abs(point.max_abs())


def height_rational(q: Fraction) -> float:
    """Height of an affine rational value, i.e. of (numerator : denominator)."""
    return log_abs(max(abs(q.numerator), q.denominator))


def segre_product(p: PrimitiveVector, q: PrimitiveVector) -> PrimitiveVector:
    """All pairwise coordinate products p_i*q_j in row-major order.

    The product of two primitive integer vectors is again primitive, and
    the sign convention is preserved, so heights add exactly:
    max|p_i q_j| = max|p_i| * max|q_j|.
    """
    coords = tuple(a * b for a in p.coords for b in q.coords)
    return PrimitiveVector(coords)


def segre_fold(points: Iterable[PrimitiveVector]) -> PrimitiveVector:
    """Iterated Segre product of several projective points (left fold)."""
    it = iter(points)
    try:
        acc = next(it)
    except StopIteration:
        raise ValueError("segre_fold needs at least one point") from None
    for p in it:
        acc = segre_product(acc, p)
    return acc
