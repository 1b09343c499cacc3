"""Finite momentum lattice: brute-force ground truth.

On the half-cell shifted grid ``q_i = -pi + 2 pi (i + 1/2) / N`` the operator
becomes ``diag(E_K(q_i)) + mu h^d 11^T`` with ``h = 2 pi / N``. Its top
eigenvalue solves the secular equation ``1 = mu nu_N(z)``, where ``nu_N`` is
the midpoint Riemann sum of the torus integral. No node ever sits on
``q = pi``, so every denominator stays positive.

Sums run over the half grid ``q_i > 0`` with weight 2 per axis (the band is
even in every coordinate), block by block along the first axis, and the
block totals are combined with ``math.fsum`` in a fixed order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .dispersion import as_quasimomentum, spectral_window

DENSE_MAX = 4096


@dataclass(frozen=True)
class FiniteGrid:
    N: int

    def __post_init__(self):
        if self.N <= 0 or self.N % 2:
            raise ValueError("grid size N must be a positive even integer")

    @property
    def h(self) -> float:
        return 2.0 * math.pi / self.N

    @property
    def nodes(self) -> np.ndarray:
        return -math.pi + self.h * (np.arange(self.N) + 0.5)

    def half_nodes(self) -> np.ndarray:
        return self.nodes[self.N // 2:]


def _as_grid(grid):
    return grid if isinstance(grid, FiniteGrid) else FiniteGrid(int(grid))


def _axis_gaps(K, grid):
    # per-axis values of c_j (1 + cos q) on the positive half grid
    c = K.weights
    return [cj * (1.0 + np.cos(grid.half_nodes())) for cj in c]


def _resolvent_sum(K, shift, grid, power=1):
    """``h^d sum_i (shift + E_max - E_K(q_i))^{-power}`` over the full grid."""
    gaps = _axis_gaps(K, grid)
    d = len(gaps)
    weight = (2.0 * grid.h) ** d
    if d == 1:
        return weight * math.fsum(np.power(shift + gaps[0], -power))
    rest = gaps[1]
    for g in gaps[2:]:
        rest = np.add.outer(rest, g)
    blocks = [float(np.sum(np.power(shift + g0 + rest, -power))) for g0 in gaps[0]]
    return weight * math.fsum(blocks)


def top_gap(K, grid) -> float:
    """``E_max(K) - max_i E_K(q_i)``: distance from the band edge to the top node."""
    K = as_quasimomentum(K)
    grid = _as_grid(grid)
    return float(sum(g.min() for g in _axis_gaps(K, grid)))


def nu_discrete(K, s, grid) -> float:
    """Riemann sum ``nu_N(K, E_max(K) + s)`` on the shifted grid."""
    K = as_quasimomentum(K)
    grid = _as_grid(grid)
    if not s > 0:
        raise ValueError("edge distance s must be positive")
    return _resolvent_sum(K, float(s), grid)


def secular_eigenvalue(mu, K, grid) -> float:
    """Top eigenvalue of the finite-lattice operator from ``1 = mu nu_N(z)``.

    The root lies above the top node, so it is bracketed in the distance
    ``t`` from that node; ``nu_N <= (2 pi)^d / t`` gives the upper bracket.
    """
    if not mu > 0:
        raise ValueError("coupling must be positive")
    K = as_quasimomentum(K)
    grid = _as_grid(grid)
    gap = top_gap(K, grid)

    def f(u):
        return 1.0 - mu * _resolvent_sum(K, math.exp(u) - gap, grid)

    u_hi = math.log(2.0 * mu * (2.0 * math.pi) ** K.d)
    u_lo = u_hi
    while f(u_lo) >= 0.0:
        u_lo -= 10.0
    u = optimize.brentq(f, u_lo, u_hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return spectral_window(K).e_max - gap + math.exp(u)


def dense_top_eigenvalue(mu, K, grid) -> float:
    """Largest eigenvalue of the explicit ``N^d x N^d`` matrix (small grids only)."""
    K = as_quasimomentum(K)
    grid = _as_grid(grid)
    n = grid.N ** K.d
    if n > DENSE_MAX:
        raise ValueError(f"dense check capped at {DENSE_MAX} nodes, got {n}")
    axes = np.meshgrid(*([grid.nodes] * K.d), indexing="ij")
    q = np.stack([a.ravel() for a in axes], axis=-1)
    c = K.weights
    energies = np.sum(2.0 - c * np.cos(q), axis=-1)
    matrix = np.diag(energies) + mu * grid.h ** K.d * np.ones((n, n))
    return float(np.linalg.eigvalsh(matrix)[-1])


def richardson(coarse, fine, ratio=2.0, order=2):
    """One Richardson step for an error ``~ N^{-order}`` with ``N_fine = ratio N_coarse``."""
    f = ratio ** order
    return (f * fine - coarse) / (f - 1.0)


def extrapolate_sequence(values, ratio=2.0, order=2):
    """Guarded Richardson extrapolation of a refinement sequence.

    Periodic analytic integrands converge geometrically in ``N``; extrapolating
    such a sequence as if it were algebraic makes it worse. The step is
    applied only when the last two differences shrink by ``ratio**order``
    within a factor ``1.5``; otherwise the finest value is returned.

    Returns
    -------
    (float, float)
        Estimate and the absolute size of the last difference.
    """
    values = [float(v) for v in values]
    if len(values) < 2:
        return values[-1], math.inf
    last = values[-1] - values[-2]
    if len(values) >= 3:
        prev = values[-2] - values[-3]
        target = ratio ** order
        if last != 0.0 and target / 1.5 <= prev / last <= target * 1.5:
            return richardson(values[-2], values[-1], ratio, order), abs(last)
    return values[-1], abs(last)


def nu_tensor(K, s, N=64, levels=3):
    """Tensor midpoint estimate of ``nu(K, E_max + s)`` on ``N, 2N, ...`` points per axis.

    Returns ``(value, error_estimate)`` after guarded Richardson extrapolation.
    """
    values = [nu_discrete(K, s, N * 2 ** k) for k in range(levels)]
    return extrapolate_sequence(values)


def extrapolated_eigenvalue(mu, K, sizes=(32, 64, 128)):
    """Secular-equation eigenvalue extrapolated over increasing grids.

    Returns ``(z, error_estimate)``.
    """
    roots = [secular_eigenvalue(mu, K, n) for n in sizes]
    return extrapolate_sequence(roots)


def watson_w3(epsabs=1e-14):
    r"""Watson's simple-cubic integral by nested adaptive quadrature.

    .. math:: W_3 = \frac{1}{π^3} ∫_{[0,π]^3} \frac{dq}{3 - \cos q_1 - \cos q_2 - \cos q_3}

    The innermost axis is done in closed form,
    :math:`∫_0^π dz / (A - \cos z) = π / \sqrt{A^2 - 1}`, and the remaining
    square is covered in polar coordinates about the origin, where the
    ``1/r`` singularity cancels against the Jacobian.
    """

    def integrand(r, phi):
        x, y = r * math.cos(phi), r * math.sin(phi)
        lower = 2.0 * (math.sin(0.5 * x) ** 2 + math.sin(0.5 * y) ** 2)  # A - 1
        if lower == 0.0:
            return 1.0 / math.sqrt(2.0)  # r / sqrt((A-1)(A+1)) -> 1/sqrt(2)
        return r / math.sqrt(lower * (lower + 2.0))

    val, _ = integrate.dblquad(integrand, 0.0, math.pi / 4,
                               0.0, lambda phi: math.pi / math.cos(phi),
                               epsabs=epsabs, epsrel=1e-13)
    return 2.0 * val / math.pi ** 2
