"""Exact recurrences for the depth-2 algorithm costs and lower-bound numerics.

T(h) is the worst-case expected query count of the two-level evaluator,
S^M(h) / S^m(h) the cost of finishing a node given an already-evaluated
majority / minority child.  Base cases

    T(0) = 1, T(1) = 8/3, S^M(1) = 3/2, S^m(1) = 2

and, for h >= 2,

    S^m(h) = T(h-2) + T(h-1) + (2/3) S^M(h-1) + (1/3) S^m(h-1)
    S^M(h) = T(h-2) + (2/3) T(h-1) + (1/3) S^M(h-1) + (1/3) S^m(h-1)
    T(h)   = 2 T(h-2) + (23/27) T(h-1) + (26/27) S^M(h-1) + (18/27) S^m(h-1)

Everything here is exact rational arithmetic; decimal output is produced
only at the edges, as certified enclosures.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

#: growth constant of the upper bound, read exactly from its decimal literal
GROWTH_ALPHA = Fraction(264944, 100000)

#: leading coefficient of the upper bound T(h) <= LEADING_COEFF * GROWTH_ALPHA^h
LEADING_COEFF = Fraction(1007, 1000)


@dataclass(frozen=True)
class ComplexityTable:
    """Rows h = 0..H of exact values T(h), S^M(h), S^m(h).

    S^M and S^m start at h = 1; index 0 holds None for both.
    """

    T: tuple[Fraction, ...]
    SM: tuple
    Sm: tuple

    @property
    def height(self) -> int:
        return len(self.T) - 1

    def check(self) -> None:
        assert self.T[0] == 1 and self.T[1] == Fraction(8, 3)
        assert self.SM[1] == Fraction(3, 2) and self.Sm[1] == 2
        for h in range(1, self.height + 1):
            assert self.SM[h] <= self.Sm[h], f"S^M > S^m at h={h}"
            assert self.SM[h] <= self.T[h], f"S^M > T at h={h}"


def solve(H: int) -> ComplexityTable:
    """Exact table for h = 0..H (H >= 1)."""
    if H < 1:
        raise ValueError("H must be >= 1")
    T = [Fraction(1), Fraction(8, 3)]
    SM = [None, Fraction(3, 2)]
    Sm = [None, Fraction(2)]
    for h in range(2, H + 1):
        Sm.append(T[h - 2] + T[h - 1] + Fraction(2, 3) * SM[h - 1]
                  + Fraction(1, 3) * Sm[h - 1])
        SM.append(T[h - 2] + Fraction(2, 3) * T[h - 1] + Fraction(1, 3) * SM[h - 1]
                  + Fraction(1, 3) * Sm[h - 1])
        T.append(2 * T[h - 2] + Fraction(23, 27) * T[h - 1]
                 + Fraction(26, 27) * SM[h - 1] + Fraction(18, 27) * Sm[h - 1])
    table = ComplexityTable(tuple(T), tuple(SM), tuple(Sm))
    table.check()
    return table


def growth_ratio(table: ComplexityTable, h: int) -> Fraction:
    """T(h)/T(h-1), exactly."""
    if not 1 <= h <= table.height:
        raise ValueError(f"h must be in 1..{table.height}")
    return table.T[h] / table.T[h - 1]


@dataclass(frozen=True)
class Ansatz:
    """Candidate constants for T(h) <= a*alpha^h, S^M <= b*alpha^h, S^m <= c*alpha^h.

    Useful candidates have alpha > 2 and a >= 1; the verifier accepts any
    positive constants so that failing candidates can be reported rather
    than rejected up front.
    """

    alpha: Fraction
    a: Fraction
    b: Fraction
    c: Fraction

    def __post_init__(self):
        if not (self.alpha > 0 and self.a > 0 and self.b > 0 and self.c > 0):
            raise ValueError("ansatz constants must be positive")


#: reference constants; every inequality below holds for them exactly
DEFAULT_ANSATZ = Ansatz(
    alpha=GROWTH_ALPHA,
    a=Fraction(102, 100),
    b=Fraction(559576, 1000000) * Fraction(102, 100),
    c=Fraction(755791, 1000000) * Fraction(102, 100),
)


def verify_ansatz(ans: Ansatz) -> tuple[bool, list[str]]:
    """Exact check of the four base-case and three inductive inequalities.

    Returns (all hold, list of violated inequality descriptions).
    """
    al, a, b, c = ans.alpha, ans.a, ans.b, ans.c
    checks = [
        ("2 <= c*alpha", 2 <= c * al),
        ("3/2 <= b*alpha", Fraction(3, 2) <= b * al),
        ("1 <= a", 1 <= a),
        ("8/3 <= a*alpha", Fraction(8, 3) <= a * al),
        ("a + ((3a+2b+c)/3)*alpha <= c*alpha^2",
         a + (3 * a + 2 * b + c) / 3 * al <= c * al ** 2),
        ("a + ((2a+b+c)/3)*alpha <= b*alpha^2",
         a + (2 * a + b + c) / 3 * al <= b * al ** 2),
        ("2a + ((23a+26b+18c)/27)*alpha <= a*alpha^2",
         2 * a + (23 * a + 26 * b + 18 * c) / 27 * al <= a * al ** 2),
    ]
    violations = [name for name, ok in checks if not ok]
    return not violations, violations


def binomial_bound(p: Sequence[Fraction], h: int) -> Fraction:
    """Sum_i C(h,i) * 2^(h-i) * p_i for p = (p_0, ..., p_h).

    This turns per-level minority-query probabilities into a query lower
    bound; geometric p_i = a*q^i collapses to a*(2+q)^h.
    """
    if len(p) != h + 1:
        raise ValueError(f"need h+1 = {h + 1} probabilities, got {len(p)}")
    return sum(comb(h, i) * 2 ** (h - i) * Fraction(p[i]) for i in range(h + 1))


# ---------------------------------------------------------------------------
# Certified decimal enclosures for the lower-bound base 2 + alpha_k^(-1/k)
# ---------------------------------------------------------------------------

def kth_root_interval(value: Fraction, k: int, digits: int) -> tuple[Fraction, Fraction]:
    """[lo, hi] with lo <= value^(1/k) <= hi and hi - lo <= 10^-digits.

    Integer bisection on n |-> n^k at scale 10^digits; no floating point.
    """
    if value < 0:
        raise ValueError("value must be non-negative")
    if k < 1 or digits < 0:
        raise ValueError("need k >= 1 and digits >= 0")
    scale = 10 ** digits
    num, den = value.numerator, value.denominator
    # find n with n^k <= num/den * scale^k < (n+1)^k
    target_num = num * scale ** k
    lo, hi = 0, 1
    while hi ** k * den <= target_num:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid ** k * den <= target_num:
            lo = mid
        else:
            hi = mid
    return Fraction(lo, scale), Fraction(lo + 1, scale)


@dataclass(frozen=True)
class BoundInterval:
    """Certified enclosure of (1-2*delta) * (alpha_k / 2^k) * base^h with
    base = 2 + alpha_k^(-1/k)."""

    k: int
    alpha_k: Fraction
    delta: Fraction
    h: int
    base_lo: Fraction
    base_hi: Fraction
    value_lo: Fraction
    value_hi: Fraction

    @property
    def base_width(self) -> Fraction:
        return self.base_hi - self.base_lo

    @property
    def value_width(self) -> Fraction:
        return self.value_hi - self.value_lo


def lower_bound(k: int, alpha_k: Fraction, delta: Fraction, h: int,
                digits: int = 6) -> BoundInterval:
    """Enclose (1-2*delta)*(alpha_k/2^k)*(2 + alpha_k^(-1/k))^h.

    Both the base interval and the value interval are certified to width
    <= 10^-digits (extra working digits are added until the powered value
    interval is narrow enough).
    """
    if alpha_k <= 0:
        raise ValueError("alpha_k must be positive")
    delta = Fraction(delta)
    if not 0 <= delta < Fraction(1, 2):
        raise ValueError("delta must lie in [0, 1/2)")
    if h < 0:
        raise ValueError("h must be non-negative")
    coeff = (1 - 2 * delta) * alpha_k / 2 ** k
    tol = Fraction(1, 10 ** digits)
    work = digits
    while True:
        rlo, rhi = kth_root_interval(1 / alpha_k, k, work)
        base_lo, base_hi = 2 + rlo, 2 + rhi
        value_lo = coeff * base_lo ** h
        value_hi = coeff * base_hi ** h
        if value_hi - value_lo <= tol and base_hi - base_lo <= tol:
            return BoundInterval(k, alpha_k, delta, h,
                                 base_lo, base_hi, value_lo, value_hi)
        work += max(2, work // 2)


def decimal_str(x: Fraction, digits: int) -> str:
    """Round-half-even decimal rendering of an exact rational."""
    scale = 10 ** digits
    q, r = divmod(x.numerator * scale, x.denominator)
    if 2 * r > x.denominator or (2 * r == x.denominator and q % 2):
        q += 1
    sign = "-" if q < 0 else ""
    q = abs(q)
    return f"{sign}{q // scale}.{q % scale:0{digits}d}" if digits else f"{sign}{q}"
