"""Exact-as-practical angular-momentum coupling kernel.

Clebsch-Gordan coefficients and Wigner 3j symbols evaluated through the Racah
sum in exact big-integer factorial arithmetic.  The only floating-point step
is a single square root at the very end, which keeps the results accurate to
unit roundoff up to j of about 50 and avoids the catastrophic cancellation
that plagues naive floating-point evaluation of the alternating sum.

Angular momenta are half-integers stored exactly as ``twice = 2j`` so that
parity conditions (integer versus half-integer chains) never depend on
floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Union

HalfIntLike = Union["HalfInt", int, float, str]


@dataclass(frozen=True, order=True)
class HalfInt:
    """A nonnegative-or-negative half-integer, stored exactly as 2j."""

    twice: int

    @staticmethod
    def coerce(value: HalfIntLike) -> "HalfInt":
        """Build from a HalfInt, int, exact half-integral float, or string.

        Strings accept plain integers, fractions like ``"3/2"``, and decimal
        halves like ``"1.5"``.
        """
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not a half-integer")
        if isinstance(value, int):
            return HalfInt(2 * value)
        if isinstance(value, float):
            twice = 2 * value
            if twice != int(twice):
                raise ValueError(f"{value} is not a half-integer")
            return HalfInt(int(twice))
        if isinstance(value, str):
            text = value.strip()
            if "/" in text:
                num, den = text.split("/", 1)
                frac = Fraction(int(num), int(den))
            else:
                frac = Fraction(text)
            if (2 * frac).denominator != 1:
                raise ValueError(f"{value!r} is not a half-integer")
            return HalfInt(int(2 * frac))
        raise TypeError(f"cannot interpret {value!r} as a half-integer")

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __float__(self) -> float:
        return self.twice / 2.0

    def __add__(self, other: HalfIntLike) -> "HalfInt":
        return HalfInt(self.twice + HalfInt.coerce(other).twice)

    __radd__ = __add__

    def __sub__(self, other: HalfIntLike) -> "HalfInt":
        return HalfInt(self.twice - HalfInt.coerce(other).twice)

    def __rsub__(self, other: HalfIntLike) -> "HalfInt":
        return HalfInt(HalfInt.coerce(other).twice - self.twice)

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __str__(self) -> str:
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def __repr__(self) -> str:
        return f"HalfInt({self.twice})"


class ThreeJArgs(NamedTuple):
    """Arguments of a Wigner 3j symbol; selection-rule failures give value 0."""

    j1: HalfInt
    j2: HalfInt
    j3: HalfInt
    m1: HalfInt
    m2: HalfInt
    m3: HalfInt


@lru_cache(maxsize=None)
def _fact(n: int) -> int:
    return math.factorial(n)


def _selection_ok(tj1: int, tj2: int, tj3: int, tm1: int, tm2: int, tm3: int) -> bool:
    # magnitudes nonnegative, projections in range with matching parity,
    # m-sum zero, triangle rule, integral total angular momentum
    if min(tj1, tj2, tj3) < 0:
        return False
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tj3, tm3)):
        if abs(tm) > tj or (tj - tm) % 2 != 0:
            return False
    if tm1 + tm2 + tm3 != 0:
        return False
    if (tj1 + tj2 + tj3) % 2 != 0:
        return False
    if tj3 < abs(tj1 - tj2) or tj3 > tj1 + tj2:
        return False
    return True


def _canonical(tj1, tj2, tj3, tm1, tm2, tm3):
    """Regge-style reduction: lexicographically smallest symmetry image.

    Cyclic column permutations leave the symbol invariant; column swaps and
    global m negation multiply it by (-1)^(j1+j2+j3).  Returns the canonical
    key and the sign relating the input symbol to the canonical one.
    """
    cols = ((tj1, tm1), (tj2, tm2), (tj3, tm3))
    perms = (
        ((0, 1, 2), 0),
        ((1, 2, 0), 0),
        ((2, 0, 1), 0),
        ((0, 2, 1), 1),
        ((1, 0, 2), 1),
        ((2, 1, 0), 1),
    )
    swap_phase = ((tj1 + tj2 + tj3) // 2) % 2  # parity of j1+j2+j3
    best = None
    best_sign = 1
    for perm, odd in perms:
        for flip in (1, -1):
            key = tuple(cols[i][0] for i in perm) + tuple(flip * cols[i][1] for i in perm)
            odd_ops = odd + (1 if flip < 0 else 0)
            sign = -1 if (swap_phase and odd_ops % 2) else 1
            if best is None or key < best:
                best = key
                best_sign = sign
    return best, best_sign


@lru_cache(maxsize=None)
def _three_j_rational(
    tj1: int, tj2: int, tj3: int, tm1: int, tm2: int, tm3: int
) -> tuple[int, Fraction]:
    """(sign, squared value) of the 3j symbol as an exact rational.

    Racah single-sum formula; all factorial arguments below are exact ints.
    """
    j1pj2mj3 = (tj1 + tj2 - tj3) // 2
    j1mj2pj3 = (tj1 - tj2 + tj3) // 2
    mj1pj2pj3 = (-tj1 + tj2 + tj3) // 2
    jsum1 = (tj1 + tj2 + tj3) // 2 + 1
    delta = Fraction(
        _fact(j1pj2mj3) * _fact(j1mj2pj3) * _fact(mj1pj2pj3), _fact(jsum1)
    )
    prod = (
        _fact((tj1 + tm1) // 2)
        * _fact((tj1 - tm1) // 2)
        * _fact((tj2 + tm2) // 2)
        * _fact((tj2 - tm2) // 2)
        * _fact((tj3 + tm3) // 2)
        * _fact((tj3 - tm3) // 2)
    )

    a1 = j1pj2mj3
    a2 = (tj1 - tm1) // 2
    a3 = (tj2 + tm2) // 2
    b1 = (tj3 - tj2 + tm1) // 2
    b2 = (tj3 - tj1 - tm2) // 2
    kmin = max(0, -b1, -b2)
    kmax = min(a1, a2, a3)
    series = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = (
            _fact(k)
            * _fact(a1 - k)
            * _fact(a2 - k)
            * _fact(a3 - k)
            * _fact(b1 + k)
            * _fact(b2 + k)
        )
        term = Fraction(1, den)
        series += -term if k % 2 else term
    if series == 0:
        return 0, Fraction(0)

    phase = -1 if ((tj1 - tj2 - tm3) // 2) % 2 else 1
    sign = phase * (1 if series > 0 else -1)
    return sign, delta * prod * series * series


def three_j(
    j1: HalfIntLike,
    j2: HalfIntLike,
    j3: HalfIntLike,
    m1: HalfIntLike,
    m2: HalfIntLike,
    m3: HalfIntLike,
) -> float:
    """Wigner 3j symbol; returns 0.0 whenever a selection rule fails.

    Values are memoised on the canonical (symmetry-reduced) argument tuple,
    so repeated evaluation inside spherical-tensor builders is cheap.
    """
    tjs = tuple(HalfInt.coerce(x).twice for x in (j1, j2, j3, m1, m2, m3))
    if not _selection_ok(*tjs):
        return 0.0
    key, sign = _canonical(*tjs)
    inner_sign, squared = _three_j_rational(*key)
    # lone conversion to floating point: sqrt of the exact squared value
    return sign * inner_sign * math.sqrt(float(squared))


def three_j_args(args: ThreeJArgs) -> float:
    return three_j(*args)


def clebsch_gordan(
    j1: HalfIntLike,
    m1: HalfIntLike,
    j2: HalfIntLike,
    m2: HalfIntLike,
    j: HalfIntLike,
    m: HalfIntLike,
) -> float:
    """Clebsch-Gordan coefficient (j1 m1 j2 m2 | j m).

    Derived from the 3j symbol through the standard relation; zero iff
    m != m1 + m2 or the triangle rule fails.
    """
    tj1, tm1 = HalfInt.coerce(j1).twice, HalfInt.coerce(m1).twice
    tj2, tm2 = HalfInt.coerce(j2).twice, HalfInt.coerce(m2).twice
    tj, tm = HalfInt.coerce(j).twice, HalfInt.coerce(m).twice
    if not _selection_ok(tj1, tj2, tj, tm1, tm2, -tm):
        return 0.0
    phase = -1 if ((tj1 - tj2 + tm) // 2) % 2 else 1
    key, sign = _canonical(tj1, tj2, tj, tm1, tm2, -tm)
    inner_sign, squared = _three_j_rational(*key)
    # fold the sqrt(2j+1) factor into the single square root
    return phase * sign * inner_sign * math.sqrt(float((tj + 1) * squared))
