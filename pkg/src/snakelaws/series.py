"""Exact rational / quadratic-field series algebra.

Everything in this module is exact: coefficients live in Q or in Q(sqrt2),
gamma ratios at half-integer arguments are reduced to rationals, and the
fixed-point series solvers reproduce the moment generating functions of the
local time weighted by exp(-sigma/2) (series F) and exp(-sigma_+/2)
(series F_+) coefficient by coefficient.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence


class ParityError(ValueError):
    """Gamma ratio at half-integers with mismatched parity would be irrational."""


class PoleError(ValueError):
    """Pochhammer denominator hits zero."""


# ---------------------------------------------------------------------------
# exact gamma machinery
# ---------------------------------------------------------------------------

def _gamma_half(j: int) -> tuple[Fraction, int]:
    """Gamma(j/2) for integer j >= 1, as (rational, power of sqrt(pi)).

    Even j: Gamma(j/2) = (j/2 - 1)!.  Odd j = 2k+1:
    Gamma(k + 1/2) = (2k)!/(4^k k!) * sqrt(pi).
    """
    if j < 1:
        raise ValueError(f"Gamma argument {j}/2 must be positive")
    if j % 2 == 0:
        return Fraction(math.factorial(j // 2 - 1)), 0
    k = (j - 1) // 2
    return Fraction(math.factorial(2 * k), 4**k * math.factorial(k)), 1


def gamma_ratio_half(p: int, q: int) -> Fraction:
    """Exact Gamma(p/2)/Gamma(q/2) for p == q (mod 2), both >= 1."""
    if p < 1 or q < 1:
        raise ValueError("arguments must be positive integers")
    if (p - q) % 2 != 0:
        raise ParityError(f"Gamma({p}/2)/Gamma({q}/2) is irrational")
    num, s1 = _gamma_half(p)
    den, s2 = _gamma_half(q)
    assert s1 == s2
    return num / den


# ---------------------------------------------------------------------------
# Q(sqrt2)
# ---------------------------------------------------------------------------

def _coerce(x) -> "QuadExt | None":
    if isinstance(x, QuadExt):
        return x
    if isinstance(x, (int, Fraction)):
        return QuadExt(x, 0)
    return None


class QuadExt:
    """Element a + b*sqrt(2) with rational a, b."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(o.a - self.a, o.b - self.b)

    def __neg__(self):
        return QuadExt(-self.a, -self.b)

    def __mul__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a * o.a + 2 * self.b * o.b,
                       self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def inverse(self) -> "QuadExt":
        n = self.a * self.a - 2 * self.b * self.b
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt2)")
        return QuadExt(self.a / n, -self.b / n)

    def __truediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadExt(1, 0)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.a, -self.b)

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(2.0)

    def __repr__(self):
        return f"QuadExt({self.a!r}, {self.b!r})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt2"


SQRT2 = QuadExt(0, 1)


# ---------------------------------------------------------------------------
# truncated formal power series
# ---------------------------------------------------------------------------

class TruncatedSeries:
    """Power series truncated at a fixed order; coefficients in Q or Q(sqrt2)."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable, order: int):
        c = list(coeffs)[: order + 1]
        c += [0] * (order + 1 - len(c))
        self.coeffs = c
        self.order = order

    @classmethod
    def zero(cls, order: int) -> "TruncatedSeries":
        return cls([], order)

    @classmethod
    def identity(cls, order: int) -> "TruncatedSeries":
        """The series lambda itself."""
        return cls([0, 1], order)

    def __getitem__(self, n: int):
        return self.coeffs[n]

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs, order)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order)
        return TruncatedSeries(
            [self.coeffs[i] + other.coeffs[i] for i in range(n + 1)], n)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order)
        return TruncatedSeries(
            [self.coeffs[i] - other.coeffs[i] for i in range(n + 1)], n)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order)
        out = [0] * (n + 1)
        for i, ci in enumerate(self.coeffs[: n + 1]):
            if not ci:
                continue
            for j in range(n + 1 - i):
                cj = other.coeffs[j]
                if cj:
                    out[i + j] = out[i + j] + ci * cj
        return TruncatedSeries(out, n)

    def scale(self, c) -> "TruncatedSeries":
        return TruncatedSeries([c * x for x in self.coeffs], self.order)

    def shift(self) -> "TruncatedSeries":
        """Multiply by lambda."""
        return TruncatedSeries([0] + self.coeffs[:-1], self.order)

    def valuation_at_least(self, k: int) -> bool:
        return all(not c for c in self.coeffs[:k])

    def is_zero(self) -> bool:
        return all(not c for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return all(self.coeffs[i] == other.coeffs[i] for i in range(n + 1))

    def __repr__(self):
        return f"TruncatedSeries({self.coeffs!r})"


def compose(outer: Sequence, inner: TruncatedSeries) -> TruncatedSeries:
    """Horner evaluation of sum_j outer[j] * inner^j; inner must have zero
    constant term so that truncation at inner.order is exact."""
    if inner.coeffs[0]:
        raise ValueError("inner series must have positive valuation")
    n = inner.order
    out = TruncatedSeries.zero(n)
    for c in reversed(list(outer[: n + 1])):
        out = out * inner
        out = TruncatedSeries([out.coeffs[0] + c] + out.coeffs[1:], n)
    return out


# ---------------------------------------------------------------------------
# the series F: local time weighted by exp(-sigma/2)
# ---------------------------------------------------------------------------

def coef_F(n: int) -> Fraction:
    """Exact n-th coefficient of F, n >= 1:
    (-1)^(n-1) 3^(1-n)/n! * Gamma(3n/2 - 1)/Gamma(n/2)."""
    if n < 1:
        raise ValueError("coefficients start at n = 1 (F(0) = 0)")
    sign = 1 if n % 2 == 1 else -1
    return (Fraction(sign, 3 ** (n - 1) * math.factorial(n))
            * gamma_ratio_half(3 * n - 2, n))


def weighted_moment_sigma(n: int) -> Fraction:
    """Exact n-th local-time moment weighted by exp(-sigma/2):
    (1/2) 3^(1-n) Gamma(3n/2 - 1)/Gamma(n/2)."""
    if n < 1:
        raise ValueError("n >= 1 required")
    return Fraction(1, 2 * 3 ** (n - 1)) * gamma_ratio_half(3 * n - 2, n)


def _inv_sqrt_one_plus(g: TruncatedSeries) -> TruncatedSeries:
    """(1 + g)^(-1/2) for g with zero constant term, via the linear
    recurrence from H'(1 + g) = -(1/2) g' H."""
    if g.coeffs[0]:
        raise ValueError("g must have positive valuation")
    n = g.order
    h = [Fraction(1)] + [Fraction(0)] * n
    for k in range(1, n + 1):
        acc = 0
        for j in range(1, k + 1):
            gj = g.coeffs[j]
            if gj:
                acc += gj * h[k - j] * (2 * k - j)
        h[k] = -acc * Fraction(1, 2 * k)
    return TruncatedSeries(h, n)


@lru_cache(maxsize=8)
def series_solve_F(N: int) -> TruncatedSeries:
    """Unique zero-constant-term solution of F = lambda * (1 + F/3)^(-1/2)
    to order N, by fixed-point iteration (valuation of the error grows by
    at least one per step, so the truncation order can grow with it)."""
    if N < 1:
        raise ValueError("N >= 1 required")
    F = TruncatedSeries.zero(1)
    for it in range(1, N + 1):
        order = min(it + 1, N)
        Fk = F.truncate(order)
        G = Fk.scale(Fraction(1, 3))
        F = _inv_sqrt_one_plus(G).shift()
    return F.truncate(N)


# ---------------------------------------------------------------------------
# the series F_+: local time weighted by exp(-sigma_+/2), over Q(sqrt2)
# ---------------------------------------------------------------------------

def coef_Fplus(n: int) -> QuadExt:
    """Exact n-th coefficient of F_+, n >= 1:
    (-1)^(n+1)/n! (3 sqrt2)^(-n) 2^(2n+1)/(n+2) * Gamma(3n/2-1)/Gamma(n/2)."""
    if n < 1:
        raise ValueError("coefficients start at n = 1 (F_+(0) = 1/3)")
    sign = 1 if n % 2 == 1 else -1
    rational = (Fraction(sign * 2 ** (2 * n + 1),
                         math.factorial(n) * (n + 2))
                * gamma_ratio_half(3 * n - 2, n))
    # 1/(3 sqrt2) = sqrt2/6
    return QuadExt(0, Fraction(1, 6)) ** n * rational


def _psi_scaled_coeffs(order: int) -> list[Fraction]:
    """-124416/((36 sqrt2 - w)(72 sqrt2 - w)) at w = 72 sqrt2 u reduces to
    -24/((1 - u)(1 - 2u)) = -24 sum (2^(k+1) - 1) u^k; pure rationals."""
    return [Fraction(-24 * (2 ** (k + 1) - 1)) for k in range(order + 1)]


def _r_scaled_coeffs(order: int) -> list[Fraction]:
    """R(72 sqrt2 u - 36 sqrt2) - 1/3 as a rational series in u:
    (3/4)(1 - 2u)^2 - 5/6 + (1/12)(1 - 2u)^(-2)."""
    coeffs = [Fraction(0)] * (order + 1)
    coeffs[0] = Fraction(3, 4) - Fraction(5, 6)
    if order >= 1:
        coeffs[1] = Fraction(-3)
    if order >= 2:
        coeffs[2] = Fraction(3)
    for k in range(order + 1):
        coeffs[k] += Fraction((k + 1) * 2**k, 12)
    return coeffs


@lru_cache(maxsize=8)
def _fplus_scaled(N: int) -> TruncatedSeries:
    """F_+(72 sqrt2 u) - 1/3 as a rational series in u: the fixed point
    gamma = u * psi(gamma) composed with the shifted parametrization."""
    gamma = TruncatedSeries.zero(1)
    for it in range(1, N + 1):
        order = min(it + 1, N)
        g = gamma.truncate(order)
        gamma = compose(_psi_scaled_coeffs(order), g).shift()
    gamma = gamma.truncate(N)
    return compose(_r_scaled_coeffs(N), gamma)


def series_solve_Fplus(N: int) -> TruncatedSeries:
    """F_+ - 1/3 to order N over Q(sqrt2).

    Solved in the scaled variable u = lambda/(72 sqrt2), where both the
    branch fixed point and the rational parametrization have small rational
    coefficients, then mapped back by powers of 1/(72 sqrt2) = sqrt2/144."""
    if N < 1:
        raise ValueError("N >= 1 required")
    scaled = _fplus_scaled(N)
    t = QuadExt(0, Fraction(1, 144))    # 1/(72 sqrt2)
    return TruncatedSeries(
        [t**n * scaled.coeffs[n] for n in range(N + 1)], N)


def p_cubic(y: TruncatedSeries, z: TruncatedSeries) -> TruncatedSeries:
    """The polynomial 96 y^3 z^2 - 36 z^4 - 36 y z^2 + 12 z^2 - 9 y^2 + 6 y - 1
    evaluated on series."""
    n = min(y.order, z.order)
    y = y.truncate(n)
    z = z.truncate(n)
    z2 = z * z
    out = (y * y * y * z2).scale(96)
    out = out - (z2 * z2).scale(36)
    out = out - (y * z2).scale(36)
    out = out + z2.scale(12)
    out = out - (y * y).scale(9)
    out = out + y.scale(6)
    return TruncatedSeries([out.coeffs[0] - 1] + out.coeffs[1:], n)


def fplus_cubic_residual(N: int) -> TruncatedSeries:
    """P(1/3 + F~_+(lambda), lambda) truncated at order N; identically zero.

    Computed in the scaled variable u = lambda/(72 sqrt2); there
    lambda^2 = 10368 u^2 is rational, so the whole residual stays in Q
    (zero in the scaled variable iff zero over Q(sqrt2))."""
    scaled = _fplus_scaled(N)
    y = TruncatedSeries([scaled.coeffs[0] + Fraction(1, 3)]
                        + scaled.coeffs[1:], N)
    u = TruncatedSeries.identity(N)
    u2 = (u * u).scale(Fraction(10368))     # lambda^2
    out = (y * y * y * u2).scale(96)
    out = out - (u2 * u2).scale(36)
    out = out - (y * u2).scale(36)
    out = out + u2.scale(12)
    out = out - (y * y).scale(9)
    out = out + y.scale(6)
    return TruncatedSeries([out.coeffs[0] - 1] + out.coeffs[1:], N)


# ---------------------------------------------------------------------------
# the rational parametrization Q, R and its exact verification
# ---------------------------------------------------------------------------

_Q_POLY = {3: Fraction(-1, 124416), 1: Fraction(1, 48)}
_R_LAURENT = {2: Fraction(1, 3456), 0: Fraction(-1, 2), -2: Fraction(216)}


def _lmul(p: dict, q: dict) -> dict:
    out: dict = {}
    for i, a in p.items():
        for j, b in q.items():
            out[i + j] = out.get(i + j, Fraction(0)) + a * b
    return {k: v for k, v in out.items() if v}


def _ladd(p: dict, q: dict) -> dict:
    out = dict(p)
    for k, v in q.items():
        out[k] = out.get(k, Fraction(0)) + v
    return {k: v for k, v in out.items() if v}


def _lscale(p: dict, c) -> dict:
    return {k: c * v for k, v in p.items()}


def q_r_identity_check(q_poly: dict | None = None,
                       r_laurent: dict | None = None) -> bool:
    """Exact check that P(R(z), Q(z)) vanishes identically as a Laurent
    polynomial in z (cleared of poles by z^6)."""
    Q = dict(_Q_POLY if q_poly is None else q_poly)
    R = dict(_R_LAURENT if r_laurent is None else r_laurent)
    Q2 = _lmul(Q, Q)
    acc = _lscale(_lmul(_lmul(_lmul(R, R), R), Q2), Fraction(96))
    acc = _ladd(acc, _lscale(_lmul(Q2, Q2), Fraction(-36)))
    acc = _ladd(acc, _lscale(_lmul(R, Q2), Fraction(-36)))
    acc = _ladd(acc, _lscale(Q2, Fraction(12)))
    acc = _ladd(acc, _lscale(_lmul(R, R), Fraction(-9)))
    acc = _ladd(acc, _lscale(R, Fraction(6)))
    acc = _ladd(acc, {0: Fraction(-1)})
    cleared = _lmul(acc, {6: Fraction(1)})
    return all(v == 0 for v in cleared.values())


def q_eval(z: QuadExt) -> QuadExt:
    return QuadExt(Fraction(-1, 124416), 0) * z**3 + QuadExt(Fraction(1, 48), 0) * z


def r_eval(z: QuadExt) -> QuadExt:
    return (QuadExt(Fraction(1, 3456), 0) * z**2
            + QuadExt(Fraction(-1, 2), 0)
            + QuadExt(216, 0) * (z**2).inverse())


def q_derivative(z: QuadExt) -> QuadExt:
    return QuadExt(Fraction(-1, 41472), 0) * z**2 + QuadExt(Fraction(1, 48), 0)


def branch_derivatives() -> dict[str, QuadExt]:
    """Exact d/dz of the three local inverses of Q at 0, i.e. 1/Q'(root)
    for each root of Q.  The two outer roots give -24; the middle gives 48."""
    roots = {
        "minus": QuadExt(0, -36),
        "zero": QuadExt(0, 0),
        "plus": QuadExt(0, 36),
    }
    return {name: q_derivative(r).inverse() for name, r in roots.items()}


# ---------------------------------------------------------------------------
# exact binomial convolutions and the terminating hypergeometric sum
# ---------------------------------------------------------------------------

def coef_rational_product(m: int, k: int, l: int) -> Fraction:
    """[lambda^m] (1 - 2 lambda)^(-k) (1 - lambda)^(-l), by exact convolution."""
    if m < 0 or k < 1 or l < 1:
        raise ValueError("need m >= 0, k >= 1, l >= 1")
    total = Fraction(0)
    for j in range(m + 1):
        total += Fraction(math.comb(j + k - 1, j) * 2**j
                          * math.comb(m - j + l - 1, m - j))
    return total


def hypergeom_2f1_half(m: int, l: int, k: int) -> Fraction:
    """Terminating 2F1(-m, l; -m-k+1; 1/2) as an exact finite sum."""
    if m < 0 or l < 1:
        raise ValueError("need m >= 0, l >= 1")
    if k < 1:
        raise PoleError("lower parameter hits a nonnegative integer")
    total = Fraction(0)
    num_a = 1   # (-m)_j
    num_b = 1   # (l)_j
    den = 1     # (-m-k+1)_j
    fact = 1
    for j in range(m + 1):
        total += Fraction(num_a * num_b, den * fact * 2**j)
        num_a *= (-m + j)
        num_b *= (l + j)
        den *= (-m - k + 1 + j)
        fact *= (j + 1)
    return total


def _gamma_ratio_over_sqrtpi(p1: int, p2: int, q: int, pow2: int) -> Fraction:
    """2^pow2 / sqrt(pi) * Gamma(p1/2) Gamma(p2/2) / Gamma(q/2), exact.

    Exactly one of Gamma(p1/2), Gamma(p2/2) must carry a sqrt(pi) so the
    result is rational; both parities are handled."""
    n1, s1 = _gamma_half(p1)
    n2, s2 = _gamma_half(p2)
    d, s3 = _gamma_half(q)
    if s1 + s2 - s3 - 1 != 0:
        raise ParityError("sqrt(pi) does not cancel")
    return Fraction(2) ** pow2 * n1 * n2 / d


def bailey_check(n: int) -> bool:
    """Exact check of both closed gamma-ratio evaluations of the terminating
    2F1(-n+1, n; c; 1/2) sums, c = -2n+3 and c = -2n-1, for n >= 2."""
    if n < 2:
        raise ValueError("n >= 2 required")
    lhs1 = hypergeom_2f1_half(n - 1, n, n - 1)
    rhs1 = _gamma_ratio_over_sqrtpi(n - 1, 3 * n - 2, 4 * n - 4, 2 * n - 3)
    lhs2 = hypergeom_2f1_half(n - 1, n, n + 3)
    rhs2 = _gamma_ratio_over_sqrtpi(n + 3, 3 * n + 2, 4 * n + 4, 2 * n + 1)
    return lhs1 == rhs1 and lhs2 == rhs2


# ---------------------------------------------------------------------------
# conditional moments (floats; quarter-integer gammas are irrational)
# ---------------------------------------------------------------------------

def conditional_moment(n: int, conditioning: str) -> float:
    """n-th moment of the local time given total duration 1 ('sigma') or
    positive duration 1 ('sigma_plus')."""
    if n < 1:
        raise ValueError("n >= 1 required")
    lg = math.lgamma(0.75 * n + 1.0) - math.lgamma(0.5 * n + 1.0)
    if conditioning == "sigma":
        return math.exp(0.75 * n * math.log(2.0) - n * math.log(3.0) + lg)
    if conditioning == "sigma_plus":
        return (2.0 / (n + 2)) * math.exp(
            2.25 * n * math.log(2.0) - n * math.log(3.0) + lg)
    raise ValueError(f"unknown conditioning {conditioning!r}")


def dump_coefficients(N: int) -> list[tuple[int, str, str]]:
    """Rows (n, F coefficient, F_+ coefficient) as exact strings."""
    f = series_solve_F(N)
    fp = series_solve_Fplus(N)
    return [(n, str(f.coeffs[n]), str(fp.coeffs[n])) for n in range(1, N + 1)]
