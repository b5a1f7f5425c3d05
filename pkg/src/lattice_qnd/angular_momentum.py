"""Exact Wigner 3j and 6j symbols.

Angular momenta are carried as :class:`HalfInt` (twice the value, stored as an
int) and the symbols are evaluated with the Racah sums in unbounded integer
arithmetic. Results are :class:`SqrtRational` values ``sign * sqrt(n / d)``, so
the squares that enter the dispersive phase shift are exact fractions.

A selection-rule zero (``m1 + m2 + m3 != 0``, triangle rule) is a legal result
and comes back as ``SqrtRational.zero()``. Malformed quantum numbers (negative
magnitude, ``|m| > j``, mixed integer/half-integer parity) raise ``ValueError``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Real

__all__ = ["HalfInt", "SqrtRational", "wigner3j", "wigner6j", "half"]


@dataclass(frozen=True, order=True)
class HalfInt:
    """Integer or half-integer number stored as ``twice_value``."""

    twice_value: int

    def __post_init__(self):
        if not isinstance(self.twice_value, int) or isinstance(self.twice_value, bool):
            raise TypeError("twice_value must be an int")

    @classmethod
    def of(cls, value) -> "HalfInt":
        """Build from an int, float, Fraction, ``"9/2"`` string or HalfInt."""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, int) and not isinstance(value, bool):
            return cls(2 * value)
        if isinstance(value, (Fraction, Real)):
            twice = Fraction(value) * 2 if isinstance(value, Fraction) else 2 * float(value)
            twice_int = round(twice)
            if twice != twice_int:
                raise ValueError(f"{value!r} is not a multiple of 1/2")
            return cls(int(twice_int))
        raise TypeError(f"cannot interpret {value!r} as a half-integer")

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def __float__(self) -> float:
        return self.twice_value / 2

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice_value)

    def __add__(self, other) -> "HalfInt":
        return HalfInt(self.twice_value + HalfInt.of(other).twice_value)

    __radd__ = __add__

    def __sub__(self, other) -> "HalfInt":
        return HalfInt(self.twice_value - HalfInt.of(other).twice_value)

    def __rsub__(self, other) -> "HalfInt":
        return HalfInt.of(other) - self

    def __str__(self) -> str:
        if self.is_integer:
            return str(self.twice_value // 2)
        return f"{self.twice_value}/2"

    def __repr__(self) -> str:
        return f"HalfInt({self})"


def half(value) -> HalfInt:
    """Shorthand for :meth:`HalfInt.of`."""
    return HalfInt.of(value)


@dataclass(frozen=True)
class SqrtRational:
    """The number ``sign * sqrt(numerator / denominator)`` in lowest terms."""

    sign: int
    numerator: int
    denominator: int = 1

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if self.numerator < 0 or self.denominator <= 0:
            raise ValueError("numerator must be >= 0 and denominator > 0")
        if (self.sign == 0) != (self.numerator == 0):
            raise ValueError("sign is 0 exactly when the numerator is 0")
        if math.gcd(self.numerator, self.denominator) != 1:
            raise ValueError("numerator and denominator must be coprime")

    @classmethod
    def zero(cls) -> "SqrtRational":
        return cls(0, 0, 1)

    @classmethod
    def from_square(cls, sign: int, square: Fraction) -> "SqrtRational":
        square = Fraction(square)
        if square < 0:
            raise ValueError("square must be non-negative")
        if square == 0:
            return cls.zero()
        return cls(1 if sign > 0 else -1, square.numerator, square.denominator)

    def squared(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __float__(self) -> float:
        return self.sign * math.sqrt(self.numerator / self.denominator)

    def __bool__(self) -> bool:
        return self.sign != 0

    def __neg__(self) -> "SqrtRational":
        return SqrtRational(-self.sign, self.numerator, self.denominator)

    def __mul__(self, other: "SqrtRational") -> "SqrtRational":
        return SqrtRational.from_square(self.sign * other.sign, self.squared() * other.squared())

    def __str__(self) -> str:
        if self.sign == 0:
            return "0"
        s = "-" if self.sign < 0 else ""
        return f"{s}sqrt({self.numerator}/{self.denominator})"


_fact = math.factorial


def _magnitude(j: HalfInt, name: str) -> int:
    if j.twice_value < 0:
        raise ValueError(f"{name}={j} must be non-negative")
    return j.twice_value


def _triangle_ok(a: int, b: int, c: int) -> bool:
    """Triangle rule on twice-values; parity is checked separately."""
    return abs(a - b) <= c <= a + b


def _triangle_delta(a: int, b: int, c: int) -> Fraction:
    """Delta(abc) from twice-values; caller guarantees triangle and parity."""
    return Fraction(
        _fact((a + b - c) // 2) * _fact((a - b + c) // 2) * _fact((-a + b + c) // 2),
        _fact((a + b + c) // 2 + 1),
    )


def wigner3j(j1, j2, j3, m1, m2, m3) -> SqrtRational:
    """Wigner 3j symbol ``(j1 j2 j3; m1 m2 m3)``.

    Arguments may be anything :meth:`HalfInt.of` accepts.

    >>> float(wigner3j(1, 1, 0, 0, 0, 0))  # -1/sqrt(3)
    -0.5773502691896258
    """
    js = [HalfInt.of(x).twice_value for x in (j1, j2, j3)]
    ms = [HalfInt.of(x).twice_value for x in (m1, m2, m3)]
    return _wigner3j_twice(*js, *ms)


@lru_cache(maxsize=65536)
def _wigner3j_twice(tj1, tj2, tj3, tm1, tm2, tm3) -> SqrtRational:
    for k, (tj, tm) in enumerate(zip((tj1, tj2, tj3), (tm1, tm2, tm3)), start=1):
        if tj < 0:
            raise ValueError(f"j{k}={tj}/2 must be non-negative")
        if abs(tm) > tj:
            raise ValueError(f"|m{k}| > j{k} ({tm}/2, {tj}/2)")
        if (tj + tm) % 2:
            raise ValueError(f"j{k} + m{k} must be an integer ({tj}/2, {tm}/2)")

    if tm1 + tm2 + tm3 != 0:
        return SqrtRational.zero()
    if not _triangle_ok(tj1, tj2, tj3):
        return SqrtRational.zero()
    # with sum(m) = 0 and integer j+m, sum(j) is automatically an integer

    j1, j2, j3 = tj1, tj2, tj3  # twice-values below, halved at factorial time
    pref = _triangle_delta(j1, j2, j3) * Fraction(
        _fact((j1 + tm1) // 2) * _fact((j1 - tm1) // 2)
        * _fact((j2 + tm2) // 2) * _fact((j2 - tm2) // 2)
        * _fact((j3 + tm3) // 2) * _fact((j3 - tm3) // 2)
    )

    # Racah: sum over k of (-1)^k / [k! (j3-j2+k+m1)! (j3-j1+k-m2)! (j1+j2-j3-k)! (j1-k-m1)! (j2-k+m2)!]
    a1 = (j3 - j2 + tm1) // 2
    a2 = (j3 - j1 - tm2) // 2
    b1 = (j1 + j2 - j3) // 2
    b2 = (j1 - tm1) // 2
    b3 = (j2 + tm2) // 2
    kmin = max(0, -a1, -a2)
    kmax = min(b1, b2, b3)
    total = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = _fact(k) * _fact(a1 + k) * _fact(a2 + k) * _fact(b1 - k) * _fact(b2 - k) * _fact(b3 - k)
        total += Fraction(-1 if k % 2 else 1, den)
    if total == 0:
        return SqrtRational.zero()

    phase = -1 if ((j1 - j2 - tm3) // 2) % 2 else 1
    sign = phase * (1 if total > 0 else -1)
    return SqrtRational.from_square(sign, pref * total * total)


def wigner6j(j1, j2, j3, j4, j5, j6) -> SqrtRational:
    """Wigner 6j symbol ``{j1 j2 j3; j4 j5 j6}``.

    Every triad must have an integer sum; a triangle violation gives zero.
    """
    tw = [HalfInt.of(x) for x in (j1, j2, j3, j4, j5, j6)]
    return _wigner6j_twice(*(_magnitude(j, f"j{k}") for k, j in enumerate(tw, start=1)))


_TRIADS = ((0, 1, 2), (0, 4, 5), (3, 1, 5), (3, 4, 2))


@lru_cache(maxsize=65536)
def _wigner6j_twice(*tj: int) -> SqrtRational:
    for t in _TRIADS:
        if sum(tj[i] for i in t) % 2:
            raise ValueError(f"triad {[f'{tj[i]}/2' for i in t]} has a half-integer sum")
    if not all(_triangle_ok(*(tj[i] for i in t)) for t in _TRIADS):
        return SqrtRational.zero()

    a, b, c, d, e, f = tj
    pref = Fraction(1)
    for t in _TRIADS:
        pref *= _triangle_delta(*(tj[i] for i in t))

    s1 = (a + b + c) // 2
    s2 = (a + e + f) // 2
    s3 = (d + b + f) // 2
    s4 = (d + e + c) // 2
    p1 = (a + b + d + e) // 2
    p2 = (b + c + e + f) // 2
    p3 = (c + a + f + d) // 2
    total = Fraction(0)
    for t in range(max(s1, s2, s3, s4), min(p1, p2, p3) + 1):
        den = (_fact(t - s1) * _fact(t - s2) * _fact(t - s3) * _fact(t - s4)
               * _fact(p1 - t) * _fact(p2 - t) * _fact(p3 - t))
        total += Fraction((-1 if t % 2 else 1) * _fact(t + 1), den)
    if total == 0:
        return SqrtRational.zero()
    return SqrtRational.from_square(1 if total > 0 else -1, pref * total * total)
