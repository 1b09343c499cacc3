"""Bound state above the band as the zero of the Fredholm determinant.

The determinant ``1 - mu nu(K, E_max + s)`` increases strictly in ``s``,
so the eigenvalue is unique whenever it exists. Roots are bracketed and
refined in ``u = ln s`` because near threshold they can sit many decades
below the band width.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .dispersion import as_quasimomentum, spectral_window
from .errors import ConvergenceError, DomainError, NoBoundState
from .green import DEFAULT_SPEC, TWO_PI, nu, nu_edge, nu_gap

DEFAULT_TOL = 1e-12
_S_FLOOR = 1e-300


@dataclass(frozen=True)
class BoundState:
    """Solved eigenvalue ``z = E_max(K) + s`` with solver diagnostics.

    ``bracket`` holds the final pair of ``s`` values straddling the root and
    ``residual`` is ``|1 - mu nu(K, z)|`` at the returned root.
    """

    z: float
    s: float
    residual: float
    bracket: tuple
    iterations: int
    mu: float


def coupling_of_offset(K, s, spec=None):
    """Coupling ``mu(s) = 1 / nu(K, E_max(K) + s)`` whose eigenvalue sits at offset ``s``."""
    return 1.0 / nu(K, s, spec)


def threshold_offset(K, s, spec=None):
    """``mu(s) - mu0(K)`` computed as ``(nu(K) - nu(K, s)) / (nu(K) nu(K, s))``.

    The edge gap is integrated directly, so tiny offsets keep full relative
    accuracy instead of being the difference of two nearly equal couplings.
    """
    K = as_quasimomentum(K)
    spec = spec or DEFAULT_SPEC
    return nu_gap(K, s, spec) / (nu_edge(K, spec) * nu(K, s, spec))


def solve(mu, K, spec=None, tol=DEFAULT_TOL):
    """Unique eigenvalue of ``H_mu(K)`` above the essential spectrum.

    Parameters
    ----------
    mu : float
        Coupling, ``mu > 0``.
    K : Quasimomentum or sequence of float
    spec : QuadratureSpec, optional
    tol : float
        Bound on ``|1 - mu nu(K, z)|`` at the returned root.

    Returns
    -------
    BoundState

    Raises
    ------
    NoBoundState
        If ``d_eff >= 3`` and ``mu <= mu0(K)``.
    ConvergenceError
        If no bracket is found or the residual stays above ``tol``.
    """
    mu = float(mu)
    if not mu > 0.0:
        raise DomainError("coupling must be positive")
    K = as_quasimomentum(K)
    spec = spec or DEFAULT_SPEC
    if K.d_eff >= 3:
        edge = nu_edge(K, spec)
        lam = mu - 1.0 / edge
        if lam <= 0.0:
            raise NoBoundState(mu, 1.0 / edge)
        return _solve_near_edge(mu, lam, edge, K, spec, tol)

    def det(s):
        return 1.0 - mu * nu(K, s, spec)

    return _bracketed_root(det, mu, K, tol)


def solve_offset(lam, K, spec=None, tol=DEFAULT_TOL):
    """Eigenvalue at coupling ``mu0(K) + lam``, with ``lam > 0`` given directly.

    Passing the excess coupling avoids the rounding of ``mu0 + lam`` when
    ``lam`` is many orders below ``mu0``.
    """
    lam = float(lam)
    K = as_quasimomentum(K)
    spec = spec or DEFAULT_SPEC
    if K.d_eff < 3:
        raise DomainError("threshold is zero when d_eff < 3; use solve()")
    edge = nu_edge(K, spec)
    if not lam > 0.0:
        raise NoBoundState(1.0 / edge + lam, 1.0 / edge)
    return _solve_near_edge(1.0 / edge + lam, lam, edge, K, spec, tol)


def _solve_near_edge(mu, lam, edge, K, spec, tol):
    # 1 - mu nu(s) = mu (nu(K) - nu(s)) - lam nu(K), free of cancellation near s = 0
    def det(s):
        return mu * nu_gap(K, s, spec) - lam * edge

    return _bracketed_root(det, mu, K, tol)


def _bracketed_root(det, mu, K, tol, max_iter=200):
    # nu(s) <= (2 pi)^d / s, so the determinant is >= 1/2 at s_hi
    s_hi = 2.0 * mu * TWO_PI ** K.d
    f_hi = det(s_hi)
    s_lo = s_hi
    f_lo = f_hi
    while f_lo >= 0.0:
        s_lo *= 1e-3
        if s_lo < _S_FLOOR:
            raise ConvergenceError("no sign change of the determinant above the band edge")
        s_hi, f_hi = s_lo * 1e3, f_lo
        f_lo = det(s_lo)
    if f_lo == 0.0:
        return _state(K, s_lo, 0.0, (s_lo, s_lo), 0, mu)
    if f_hi == 0.0:
        return _state(K, s_hi, 0.0, (s_hi, s_hi), 0, mu)

    # Illinois-modified regula falsi in u = ln s with bisection safeguard
    u_lo, u_hi = math.log(s_lo), math.log(s_hi)
    g_lo, g_hi = f_lo, f_hi
    side = 0
    for it in range(1, max_iter + 1):
        u = (u_lo * g_hi - u_hi * g_lo) / (g_hi - g_lo)
        if not u_lo < u < u_hi or it % 8 == 0:
            u = 0.5 * (u_lo + u_hi)
        f = det(math.exp(u))
        if f == 0.0:
            return _state(K, math.exp(u), 0.0, (math.exp(u_lo), math.exp(u_hi)), it, mu)
        if f < 0.0:
            u_lo, f_lo, g_lo = u, f, f
            if side == -1:
                g_hi *= 0.5
            side = -1
        else:
            u_hi, f_hi, g_hi = u, f, f
            if side == 1:
                g_lo *= 0.5
            side = 1
        if min(-f_lo, f_hi) <= 1e-3 * tol or u_hi - u_lo <= 4e-16 * max(1.0, abs(u)):
            break
    u, residual = (u_lo, -f_lo) if -f_lo < f_hi else (u_hi, f_hi)
    if residual > tol:
        raise ConvergenceError(f"determinant residual {residual:.3g} exceeds tol {tol:.3g}", residual)
    return _state(K, math.exp(u), residual, (math.exp(u_lo), math.exp(u_hi)), it, mu)


def _state(K, s, residual, bracket, iterations, mu):
    return BoundState(z=spectral_window(K).e_max + s, s=s, residual=residual,
                      bracket=bracket, iterations=iterations, mu=mu)
