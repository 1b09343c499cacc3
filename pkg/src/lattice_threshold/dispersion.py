r"""Kinetic energy of two identical particles on the cubic lattice.

With unit mass, a pair with total quasimomentum :math:`K` and relative
momentum :math:`q` has the band function

.. math:: E_K(q) = ε(K/2 - q) + ε(K/2 + q) = \sum_j [2 - c_j \cos q_j],

where :math:`ε(q) = \sum_i (1 - \cos q_i)` and :math:`c_j = 2\cos(K_j/2)`.
The band fills :math:`[E_{min}(K), E_{max}(K)]` with
:math:`E_{min} = \sum_j (2 - c_j)` and :math:`E_{max} = \sum_j (2 + c_j)`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

MAX_DIM = 8


def canonical_angle(x: float) -> float:
    """Wrap an angle into ``(-pi, pi]``; odd multiples of pi map to pi exactly."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite quasimomentum component {x!r}")
    if -math.pi < x <= math.pi:
        return x
    return math.pi - (math.pi - x) % (2 * math.pi)


@dataclass(frozen=True)
class Quasimomentum:
    """Total quasimomentum ``K`` on the torus ``(-pi, pi]^d``.

    Components are canonicalized on construction. A component equal to pi
    is detected by exact comparison and gets weight ``c_j = 0``.
    """

    components: tuple

    def __post_init__(self):
        comps = tuple(canonical_angle(k) for k in self.components)
        if not 1 <= len(comps) <= MAX_DIM:
            raise ValueError(f"dimension must be in 1..{MAX_DIM}, got {len(comps)}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def zero(cls, d: int) -> "Quasimomentum":
        return cls((0.0,) * d)

    @property
    def d(self) -> int:
        return len(self.components)

    @property
    def weights(self) -> np.ndarray:
        """Per-axis weights ``c_j = 2 cos(K_j / 2)``, exactly zero at pi."""
        return np.array([0.0 if k == math.pi else 2.0 * math.cos(0.5 * k)
                         for k in self.components])

    @property
    def d_eff(self) -> int:
        return self.d - pi_class(self)

    def as_array(self) -> np.ndarray:
        return np.array(self.components)


def as_quasimomentum(K) -> Quasimomentum:
    if isinstance(K, Quasimomentum):
        return K
    if np.isscalar(K):
        K = (K,)
    return Quasimomentum(tuple(float(k) for k in K))


class SpectralWindow(NamedTuple):
    e_min: float
    e_max: float


def epsilon(q) -> float:
    """Single-particle dispersion ``sum_i (1 - cos q_i)``."""
    q = np.asarray(q, dtype=float)
    return float(np.sum(1.0 - np.cos(q)))


def band(K, q):
    """Two-particle band function ``E_K(q) = sum_j (2 - c_j cos q_j)``.

    ``q`` may carry extra leading axes; the last axis runs over coordinates.
    """
    c = as_quasimomentum(K).weights
    q = np.asarray(q, dtype=float)
    if q.shape[-1] != len(c):
        raise ValueError(f"q has {q.shape[-1]} coordinates, K has {len(c)}")
    out = np.sum(2.0 - c * np.cos(q), axis=-1)
    return float(out) if out.ndim == 0 else out


def spectral_window(K) -> SpectralWindow:
    """Edges of the essential spectrum, attained at ``q = 0`` and ``q = pi``."""
    c = as_quasimomentum(K).weights
    return SpectralWindow(float(np.sum(2.0 - c)), float(np.sum(2.0 + c)))


def pi_class(K) -> int:
    """Number of components exactly equal to pi, i.e. ``n`` with ``K`` in ``Pi_n \\ Pi_{n-1}``."""
    comps = K.components if isinstance(K, Quasimomentum) else as_quasimomentum(K).components
    return sum(1 for k in comps if k == math.pi)


def effective_dimension(K) -> int:
    return as_quasimomentum(K).d_eff


def edge_gap(K, q):
    """``E_max(K) - E_K(q) = sum_j c_j (1 + cos q_j)``, nonnegative without cancellation."""
    c = as_quasimomentum(K).weights
    q = np.asarray(q, dtype=float)
    return np.sum(c * (1.0 + np.cos(q)), axis=-1)


def unit_direction(v: Iterable[float]) -> np.ndarray:
    v = np.asarray(list(v), dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("direction must be nonzero")
    return v / norm
