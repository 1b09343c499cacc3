"""Series inversion for implicit threshold equations, and two closed-form integrals.

The inversions solve

    lam = -(mu0 lam + mu0**2) f(alpha)

for ``alpha`` as a power series, either in ``lam`` (``f'(0) < 0``) or in
``sigma = lam**(1/2)`` (``f(0) = f'(0) = 0``, ``f''(0) < 0``). Coefficients
are found order by order: after the leading term, the coefficient of each
new order enters the residual linearly through the nonzero derivative of
the equation at the origin, so it is fixed by one back-substitution.

All series routines only use ``+ - * /`` (and one square root for the
half-power case), so ``fractions.Fraction`` or ``mpmath.mpf`` coefficients
go through exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DomainError


@dataclass(frozen=True)
class PowerSeries:
    """Truncated series ``sum_k coefficients[k] * x**(start + k)``."""

    coefficients: tuple
    start: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(self.coefficients))

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def coefficient(self, n):
        k = n - self.start
        return self.coefficients[k] if 0 <= k < len(self.coefficients) else 0

    def dense(self):
        """Coefficients from ``x**0`` up to the last retained power."""
        return [0] * self.start + list(self.coefficients)

    def __call__(self, x):
        total = 0
        for a in reversed(self.coefficients):
            total = total * x + a
        return total * x ** self.start


def _dense(f) -> list:
    if isinstance(f, PowerSeries):
        return f.dense()
    return list(f)


def _mul(a, b, n):
    """Product of dense series truncated to ``n`` coefficients."""
    out = [0] * n
    for i, ai in enumerate(a[:n]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: n - i]):
            out[i + j] = out[i + j] + ai * bj
    return out


def _compose(f, inner, n):
    """``f(inner(x))`` truncated to ``n`` coefficients; ``inner`` has no constant term."""
    out = [0] * n
    for a in reversed(f):
        out = _mul(out, inner, n)
        out[0] = out[0] + a
    return out


def implicit_residual(f, mu0, alpha, lam):
    """``lam + (mu0 lam + mu0**2) f(alpha)``, zero on the solution branch."""
    f = _dense(f)
    value = 0
    for a in reversed(f):
        value = value * alpha + a
    return lam + (mu0 * lam + mu0 * mu0) * value


def _check_vanishing(f, upto, name):
    for k in range(min(upto, len(f))):
        if f[k] != 0:
            raise ValueError(f"{name} must vanish to order {upto} at the origin")


def invert_a1(f, mu0, order):
    """Coefficients ``c_1..c_N`` of ``alpha(lam) = sum c_n lam**n``.

    Parameters
    ----------
    f : PowerSeries or sequence
        ``f(alpha)``; plain sequences hold coefficients of ``alpha**0, alpha**1, ...``.
        Requires ``f(0) = 0`` and ``f'(0) < 0``.
    mu0 : number
        Positive threshold coupling.
    order : int
        Number ``N >= 1`` of coefficients.

    Returns
    -------
    PowerSeries
        With ``start = 1``; its leading coefficient is ``-1 / (mu0**2 f'(0))``.
    """
    f = _dense(f)
    _check_vanishing(f, 1, "f")
    if len(f) < 2 or not f[1] < 0:
        raise ValueError("invert_a1 requires f'(0) < 0")
    if order < 1:
        raise ValueError("order must be >= 1")
    n = order + 1
    lam_series = [0, 1] + [0] * (n - 2)
    outer = [mu0 * mu0, mu0] + [0] * (n - 2)
    slope = mu0 * mu0 * f[1]
    alpha = [0] * n
    for k in range(1, n):
        residual = _mul(outer, _compose(f, alpha, n), n)
        residual = [r + l for r, l in zip(residual, lam_series)]
        alpha[k] = -residual[k] / slope
    return PowerSeries(tuple(alpha[1:]), start=1)


def invert_a3(f, mu0, order):
    """Coefficients ``c_1..c_N`` of ``alpha(sigma) = sum c_n sigma**n``, ``sigma = lam**(1/2)``.

    Requires ``f(0) = f'(0) = 0`` and ``f''(0) < 0``; the leading coefficient
    is ``(-mu0**2 f''(0) / 2)**(-1/2)``, the positive branch.
    """
    f = _dense(f)
    _check_vanishing(f, 2, "f")
    if len(f) < 3 or not f[2] < 0:
        raise ValueError("invert_a3 requires f''(0) < 0")
    if order < 1:
        raise ValueError("order must be >= 1")
    a2 = f[2]
    n = order + 2
    lam_series = [0, 0, 1] + [0] * (n - 3)
    outer = [mu0 * mu0, 0, mu0] + [0] * (n - 3)
    lead = (-(mu0 * mu0) * a2) ** -0.5 if not isinstance(a2, Fraction) else _fraction_rsqrt(-(mu0 * mu0) * a2)
    alpha = [0, lead] + [0] * (n - 2)
    slope = 2 * mu0 * mu0 * a2 * lead
    for k in range(2, n - 1):
        residual = _mul(outer, _compose(f, alpha, n), n)
        residual = [r + l for r, l in zip(residual, lam_series)]
        alpha[k] = -residual[k + 1] / slope
    return PowerSeries(tuple(alpha[1:n - 1]), start=1)


def _fraction_rsqrt(x: Fraction):
    num, den = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if num * num == x.numerator and den * den == x.denominator:
        return Fraction(den, num)
    return float(x) ** -0.5


def leading_a2_a4(f, g, mu0, case="A2"):
    """Leading coefficient for the logarithmic equation ``lam = -(mu0 lam + mu0**2)(f + g ln alpha)``.

    ``case="A2"``: hypotheses ``f(0) = g(0) = 0``, ``g'(0) > 0``; returns the
    coefficient of ``sigma = lam / (-ln lam)``, ``1 / (mu0**2 g'(0))``.

    ``case="A4"``: hypotheses ``f(0) = f'(0) = 0``, ``f''(0) < 0`` and ``g``
    vanishing to third order; returns the coefficient of ``sigma = lam**(1/2)``,
    ``(-mu0**2 f''(0) / 2)**(-1/2)``.
    """
    f, g = _dense(f), _dense(g)
    if case == "A2":
        _check_vanishing(f, 1, "f")
        _check_vanishing(g, 1, "g")
        if len(g) < 2 or not g[1] > 0:
            raise ValueError("case A2 requires g'(0) > 0")
        return 1 / (mu0 * mu0 * g[1])
    if case == "A4":
        _check_vanishing(f, 2, "f")
        _check_vanishing(g, 3, "g")
        if len(f) < 3 or not f[2] < 0:
            raise ValueError("case A4 requires f''(0) < 0")
        return (-(mu0 * mu0) * f[2]) ** -0.5
    raise ValueError(f"unknown case {case!r}")


def i_s(gamma, theta, s):
    """``int_0^gamma r**s / (r**2 - theta) dr`` for ``theta < 0`` in closed form.

    Uses ``I_s = gamma**(s-1) / (s-1) + theta I_{s-2}`` from
    ``I_0 = arctan(gamma / sqrt(-theta)) / sqrt(-theta)`` and
    ``I_1 = log((gamma**2 - theta) / (-theta)) / 2``.
    """
    if not theta < 0:
        raise DomainError("i_s requires theta < 0")
    if not gamma > 0:
        raise DomainError("i_s requires gamma > 0")
    if s < 0 or int(s) != s:
        raise ValueError("s must be a nonnegative integer")
    root = math.sqrt(-theta)
    value = math.atan(gamma / root) / root if s % 2 == 0 else 0.5 * math.log1p(gamma * gamma / -theta)
    for k in range(2 + s % 2, s + 1, 2):
        value = gamma ** (k - 1) / (k - 1) + theta * value
    return value


def i_s_singular(theta, s):
    """Non-analytic part of ``I_s`` at ``theta -> 0-``.

    ``-theta**m log(-theta) / 2`` for ``s = 2m + 1`` and
    ``pi theta**m / (2 sqrt(-theta))`` for ``s = 2m``.
    """
    m = s // 2
    if s % 2:
        return -0.5 * theta ** m * math.log(-theta)
    return 0.5 * math.pi * theta ** m / math.sqrt(-theta)


def wallis(n: int) -> float:
    """``int_{-pi/2}^{pi/2} cos(t)**n dt`` via ``a_n = (n-1)/n a_{n-2}``, ``a_0 = pi``, ``a_1 = 2``."""
    coeff, pi_power = wallis_exact(n)
    return float(coeff) * math.pi ** pi_power


def wallis_exact(n: int):
    """Wallis integral as ``(Fraction, pi_power)`` with value ``coeff * pi**pi_power``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    coeff = Fraction(1) if n % 2 == 0 else Fraction(2)
    for k in range(2 + n % 2, n + 1, 2):
        coeff *= Fraction(k - 1, k)
    return coeff, 1 - n % 2


def double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def as_series(coefficients: Sequence, start: int = 0) -> PowerSeries:
    return PowerSeries(tuple(coefficients), start)
