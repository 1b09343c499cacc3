r"""Birman-Schwinger integral of the rank-one two-particle problem.

Everything here is measured from the upper band edge. Writing
:math:`z = E_{max}(K) + s` and :math:`x_j = q_j - π`,

.. math:: ν(K, z) = ∫_{T^d} \frac{dq}{s + \sum_j c_j (1 - \cos x_j)}

with unnormalized Lebesgue measure on :math:`(-π, π]^d`. The evaluator
uses :math:`1/a = ∫_0^∞ e^{-ta} dt` and factorizes the torus integral axis
by axis,

.. math:: ν(K, z) = (2π)^d ∫_0^∞ e^{-st} \prod_j e^{-c_j t} I_0(c_j t)\, dt,

so that a nearly singular d-dimensional integral becomes a smooth 1-D one.
Its integrand decays like :math:`t^{-d_{eff}/2}`, which is exactly why the
edge value exists iff at least three weights are nonzero. The 1-D integral
is split at ``T``: composite Gauss-Legendre panels in ``log t`` on
``[0, T]`` and the large-argument Bessel series integrated term by term
(generalized exponential integrals) on ``[T, inf)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import erfc, exp1, i0e, i1e

from .dispersion import as_quasimomentum
from .errors import ConvergenceError, DomainError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy and cost knobs for the integral evaluators.

    Parameters
    ----------
    points_per_axis : int
        Base grid size ``N`` of the tensor-product oracle (must be even).
    levels : int
        Refinement levels: panel halvings for the Laplace evaluator, grid
        doublings for the tensor oracle.
    rel_tol : float
        Relative error accepted from the Laplace evaluator's estimate.
    laplace_nodes : int
        Gauss-Legendre nodes per panel (even; half of them give the
        comparison rule for the error estimate).
    laplace_cutoff : float
        The tail starts where ``min_j c_j t`` reaches this value.
    panel_width : float
        Panel width in ``log t``.
    tail_terms : int
        Terms kept from the large-argument Bessel series.
    """

    points_per_axis: int = 64
    levels: int = 3
    rel_tol: float = 1e-8
    laplace_nodes: int = 16
    laplace_cutoff: float = 60.0
    panel_width: float = 1.0
    tail_terms: int = 12

    def __post_init__(self):
        if self.points_per_axis <= 0 or self.points_per_axis % 2:
            raise ValueError("points_per_axis must be a positive even integer")
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError("rel_tol must lie in (0, 1)")
        if self.laplace_nodes < 2 or self.laplace_nodes % 2:
            raise ValueError("laplace_nodes must be an even integer >= 2")
        if self.laplace_cutoff < 30.0:
            raise ValueError("laplace_cutoff below 30 leaves the Bessel series inaccurate")


DEFAULT_SPEC = QuadratureSpec()


def scaled_bessel_i0(x):
    """Exponentially scaled modified Bessel function ``exp(-x) I_0(x)``.

    Parameters
    ----------
    x : float or array_like
        Nonnegative argument.

    Returns
    -------
    float or ndarray
        Values in ``(0, 1]``, strictly decreasing in ``x``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("scaled_bessel_i0 requires x >= 0")
    out = i0e(x)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=None)
def _bessel_series(order: int, n: int) -> tuple:
    # exp(-x) I_order(x) ~ (2 pi x)^{-1/2} sum_k a_k x^{-k}
    mu = 4 * order * order
    a = [1.0]
    for k in range(1, n):
        a.append(a[-1] * -(mu - (2 * k - 1) ** 2) / (8.0 * k))
    return tuple(a)


def _axis_value(kind, x):
    if kind == "i0":
        return i0e(x)
    return i1e(x) - i0e(x)  # d/dx [exp(-x) I_0(x)]


def _axis_series(kind, n):
    a0 = np.array(_bessel_series(0, n))
    if kind == "i0":
        return a0
    return np.array(_bessel_series(1, n)) - a0


@lru_cache(maxsize=8)
def _legendre(n):
    return np.polynomial.legendre.leggauss(n)


def _expint_ladder(p0, count, x):
    """``E_p(x)`` for ``p = p0, p0 + 1, ...``; ``p0`` is an integer or half-integer."""
    if p0 <= 0.0:
        raise ValueError("exponential-integral ladder needs p0 > 0")
    out = np.empty(count)
    if x == 0.0:
        for k in range(count):
            p = p0 + k
            out[k] = 1.0 / (p - 1.0) if p > 1.0 else math.inf
        return out
    if x > 700.0:
        out[:] = 0.0
        return out
    base = p0 - math.floor(p0)
    if base == 0.5:
        e, p = math.sqrt(math.pi / x) * erfc(math.sqrt(x)), 0.5
    else:
        e, p = math.exp(-x) / x, 0.0
    ex = math.exp(-x)
    k = 0
    while k < count:
        if p >= p0 - 1e-12:
            out[k] = e
            k += 1
        e = exp1(x) if p == 0.0 else (ex - x * e) / p
        p += 1.0
    return out


def _laplace(c, s, mode, spec, power=0, deriv_axis=None):
    """``(2 pi)^d  int_0^inf kernel(t) t^power prod_j phi_j(c_j t) dt``.

    ``mode`` selects the kernel: ``"value"`` is ``exp(-st)``, ``"gap"`` is
    ``1 - exp(-st)`` and ``"edge"`` is 1. ``phi_j`` is ``exp(-x) I_0(x)``
    except on ``deriv_axis`` where it is its derivative.
    Returns ``(value, relative_error_estimate)``.
    """
    c = np.asarray(c, dtype=float)
    d = len(c)
    kinds = ["di0" if j == deriv_axis else "i0" for j in range(d)]
    live = [j for j in range(d) if c[j] > 0.0]
    const = 1.0
    for j in range(d):
        if c[j] == 0.0:
            const *= float(_axis_value(kinds[j], 0.0))
    prefactor = TWO_PI ** d * const
    deff = len(live)

    if deff == 0:
        if mode != "value":
            raise DomainError("edge integral diverges (d_eff < 3)")
        return prefactor * math.factorial(power) / s ** (power + 1), 0.0

    # tail series in powers of 1/t: amp * t^{-deff/2 + power} * sum_k P_k t^{-k}
    nt = spec.tail_terms
    series = np.array([1.0])
    amp = 1.0
    for j in live:
        axis = _axis_series(kinds[j], nt) / c[j] ** np.arange(nt)
        series = np.convolve(series, axis)[:nt]
        amp /= math.sqrt(TWO_PI * c[j])
    p0 = 0.5 * deff - power
    nonzero = np.nonzero(series)[0]
    if mode != "value" and p0 + nonzero[0] <= 1.0:
        raise DomainError("edge integral diverges")

    T = spec.laplace_cutoff / c[live].min()
    x = s * T
    if mode == "value":
        terms = _expint_ladder(p0, nt, x)
    else:
        ladder = _expint_ladder(p0, nt, x) if mode == "gap" else np.zeros(nt)
        ps = p0 + np.arange(nt)
        with np.errstate(divide="ignore"):
            terms = np.where(series != 0.0, 1.0 / (ps - 1.0) - ladder, 0.0)
    tail_terms = series * T ** (1.0 - (p0 + np.arange(nt))) * np.where(series != 0.0, terms, 0.0)
    tail = amp * float(np.sum(tail_terms))
    tail_err = amp * abs(tail_terms[-1])

    y_hi = math.log(T)
    y_lo = -math.log(s + float(c.sum()) + 1.0) - 38.0
    width = spec.panel_width
    for _ in range(spec.levels):
        npan = int(math.ceil((y_hi - y_lo) / width))
        mids = y_hi - width * (np.arange(npan)[::-1] + 0.5)
        hi_val = _panels(mids, width, spec.laplace_nodes, c, kinds, live, s, mode, power)
        lo_val = _panels(mids, width, spec.laplace_nodes // 2, c, kinds, live, s, mode, power)
        total = hi_val + tail
        err = (abs(hi_val - lo_val) + tail_err) / abs(total) if total != 0.0 else math.inf
        if err <= spec.rel_tol:
            return prefactor * total, err
        width *= 0.5
    raise ConvergenceError(f"Laplace quadrature reached only {err:.3g} relative error", err)


def _panels(mids, width, n, c, kinds, live, s, mode, power):
    xg, wg = _legendre(n)
    y = (mids[:, None] + 0.5 * width * xg[None, :]).ravel()
    t = np.exp(y)
    f = t ** (power + 1)
    if mode == "value":
        f = f * np.exp(-s * t)
    elif mode == "gap":
        f = f * -np.expm1(-s * t)
    for j in live:
        f = f * _axis_value(kinds[j], c[j] * t)
    w = np.tile(0.5 * width * wg, len(mids))
    return float(np.dot(w, f))


def _check_offset(s):
    s = float(s)
    if not s > 0.0:
        raise DomainError(f"edge distance s must be positive, got {s!r}")
    return s


def nu(K, s, spec=None, *, full_output=False):
    """Birman-Schwinger integral ``nu(K, E_max(K) + s)``.

    Parameters
    ----------
    K : Quasimomentum or sequence of float
        Total quasimomentum.
    s : float
        Distance above the upper band edge, ``s > 0``.
    spec : QuadratureSpec, optional
    full_output : bool
        Also return the relative error estimate.

    Returns
    -------
    float or (float, float)

    Raises
    ------
    ConvergenceError
        If the estimate exceeds ``spec.rel_tol`` after all refinements.
    """
    K = as_quasimomentum(K)
    s = _check_offset(s)
    value, err = _laplace(K.weights, s, "value", spec or DEFAULT_SPEC)
    return (value, err) if full_output else value


def _require_edge(K, min_deff, what):
    if K.d_eff < min_deff:
        raise DomainError(f"{what} diverges (d_eff < {min_deff})")


def nu_edge(K, spec=None, *, full_output=False):
    """Edge value ``nu(K) = lim_{s -> 0+} nu(K, E_max(K) + s)``; needs ``d_eff >= 3``."""
    K = as_quasimomentum(K)
    _require_edge(K, 3, "edge integral")
    value, err = _laplace(K.weights, 0.0, "edge", spec or DEFAULT_SPEC)
    return (value, err) if full_output else value


def nu_gap(K, s, spec=None):
    """``nu(K) - nu(K, E_max(K) + s)`` evaluated without cancellation.

    The kernel ``1 - exp(-st)`` is integrated directly, so the difference
    keeps full relative accuracy even when it is many orders of magnitude
    below the edge value.
    """
    K = as_quasimomentum(K)
    _require_edge(K, 3, "edge integral")
    s = _check_offset(s)
    return _laplace(K.weights, s, "gap", spec or DEFAULT_SPEC)[0]


def mu0(K, spec=None):
    """Coupling-constant threshold ``mu0(K) = 1 / nu(K)``."""
    return 1.0 / nu_edge(K, spec)


def determinant(mu, K, s, spec=None):
    """Fredholm determinant ``1 - mu nu(K, E_max(K) + s)``."""
    if not mu > 0:
        raise DomainError("coupling must be positive")
    return 1.0 - mu * nu(K, s, spec)


def dnu_dz_edge(K, spec=None):
    """``d nu / dz`` at the upper edge: ``-int dq / (E_max - E_K(q))^2``; needs ``d_eff >= 5``."""
    K = as_quasimomentum(K)
    _require_edge(K, 5, "edge derivative")
    return -_laplace(K.weights, 0.0, "edge", spec or DEFAULT_SPEC, power=1)[0]


def dnu_dc_edge(K, axis, spec=None):
    """Partial derivative of the edge value with respect to the weight ``c_axis``."""
    K = as_quasimomentum(K)
    _require_edge(K, 3, "edge integral")
    if K.weights[axis] == 0.0:
        raise DomainError("weight derivative undefined on a pi component")
    return _laplace(K.weights, 0.0, "edge", spec or DEFAULT_SPEC, power=1, deriv_axis=axis)[0]


def curvature_under_integral(d, spec=None):
    """``d^2 nu(K) / dK_1^2`` at ``K = 0`` by differentiating under the integral.

    Since ``c_1 = 2 cos(K_1/2)`` has zero slope and curvature ``-1/2`` at the
    origin, the second derivative equals ``-dnu/dc_1 / 2``.
    """
    if d < 3:
        raise DomainError("edge integral diverges (d_eff < 3)")
    return -0.5 * dnu_dc_edge((0.0,) * d, 0, spec)


def a2_curvature(d, spec=None, h=1e-2):
    """``d^2 nu(K) / dK_1^2`` at ``K = 0`` from central differences.

    Uses steps ``h`` and ``h/2`` and one Richardson level. The edge value is
    even in ``K_1``, so each difference quotient is ``2 (nu(h) - nu(0)) / h^2``.
    """
    if d < 3:
        raise DomainError("edge integral diverges (d_eff < 3)")
    base = nu_edge((0.0,) * d, spec)

    def quotient(step):
        K = (step,) + (0.0,) * (d - 1)
        return 2.0 * (nu_edge(K, spec) - base) / step ** 2

    coarse, fine = quotient(h), quotient(0.5 * h)
    return (4.0 * fine - coarse) / 3.0
