import math

import mpmath
import numpy as np
import pytest
from scipy import integrate, special

from lattice_threshold.asymptotics import phi0
from lattice_threshold.errors import ConvergenceError, DomainError
from lattice_threshold.green import (QuadratureSpec, a2_curvature, curvature_under_integral,
                                     determinant, dnu_dc_edge, dnu_dz_edge, mu0, nu, nu_edge, nu_gap,
                                     scaled_bessel_i0)
from lattice_threshold.lattice_oracle import FiniteGrid, _resolvent_sum, extrapolate_sequence
from lattice_threshold.dispersion import as_quasimomentum

# frozen oracle value: mpmath 30-digit series for exp(-1) I0(1)
I0E_AT_ONE = 0.46575960759364043


def log_t_oracle(c, s=0.0, power=0, deriv=None):
    """Laplace integral by adaptive quadrature in ``y = ln t`` (independent of the panel code)."""
    c = np.asarray(c, dtype=float)

    def f(y):
        t = math.exp(y)
        fac = special.i0e(c * t)
        if deriv is not None:
            fac[deriv] = (special.i1e(c[deriv] * t) - special.i0e(c[deriv] * t)) * t
        return t ** (1 + power) * math.exp(-s * t) * np.prod(fac)

    val, _ = integrate.quad(f, -60, 250, limit=2000, epsabs=0, epsrel=1e-13)
    return (2 * math.pi) ** len(c) * val


def test_i0e_frozen_value_matches_series():
    with mpmath.workdps(30):
        series = mpmath.nsum(lambda k: (mpmath.mpf(1) / 2) ** (2 * k) / mpmath.factorial(k) ** 2, [0, mpmath.inf])
        assert float(series * mpmath.exp(-1)) == pytest.approx(I0E_AT_ONE, rel=1e-15)
    assert scaled_bessel_i0(1.0) == pytest.approx(I0E_AT_ONE, rel=1e-15)


def test_i0e_limits():
    assert scaled_bessel_i0(0.0) == 1.0
    assert scaled_bessel_i0(1e4) == pytest.approx(1 / math.sqrt(2 * math.pi * 1e4), rel=1e-4)
    x = np.linspace(0, 50, 200)
    assert np.all(np.diff(scaled_bessel_i0(x)) < 0)
    with pytest.raises(DomainError):
        scaled_bessel_i0(-1.0)


def test_d1_example():
    assert nu([0.0], 1.0) == pytest.approx(2 * math.pi / math.sqrt(5), rel=1e-12)


@pytest.mark.parametrize("K", [[0.0], [1.0]])
@pytest.mark.parametrize("s", np.logspace(-6, 1, 8))
def test_d1_closed_form(K, s):
    c = 2 * math.cos(K[0] / 2)
    assert nu(K, s) == pytest.approx(2 * math.pi / math.sqrt(s * s + 2 * s * c), rel=1e-10)


def test_d1_determinant_zero():
    assert determinant(1 / math.pi, [0.0], 2 * math.sqrt(2) - 2) == pytest.approx(0, abs=1e-14)


def test_determinant_limits():
    K = [0.0, 0.0, 0.0]
    assert determinant(1e-300, K, 0.5) == pytest.approx(1.0)
    assert determinant(mu0(K), K, 1e-14) == pytest.approx(0, abs=1e-5)
    assert determinant(1.0, K, 1e12) == pytest.approx(1, abs=1e-9)
    s = np.logspace(-6, 2, 30)
    assert np.all(np.diff([determinant(0.05, K, x) for x in s]) > 0)


@pytest.mark.parametrize("K", [[0.0, 0.0], [0.4, 0.2, 0.0], [0.3, 1.2, 2.0, 0.5]])
def test_strictly_decreasing(K):
    values = [nu(K, s) for s in np.logspace(-6, 3, 40)]
    assert np.all(np.diff(values) < 0)


def test_exact_symmetry():
    s = 0.037
    base = nu([0.3, -1.1, 2.0, 0.6], s)
    assert nu([-0.3, 1.1, -2.0, 0.6], s) == base
    assert nu([0.6, 2.0, 0.3, -1.1], s) == base


@pytest.mark.parametrize("d", [2, 3, 5])
def test_large_s_tail(d):
    assert 1e6 * nu([0.1] * d, 1e6) == pytest.approx((2 * math.pi) ** d, rel=1e-4)


def test_watson_edge_value():
    assert nu_edge([0, 0, 0]) == pytest.approx(62.68998093895, rel=1e-10)
    assert mu0([0, 0, 0]) == pytest.approx(1.5951512e-2, rel=1e-7)
    assert nu([0, 0, 0], 1e-6) < nu_edge([0, 0, 0])


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_edge_value_log_t_oracle(d):
    K = [0.2 * j for j in range(d)]
    c = as_quasimomentum(K).weights
    assert nu_edge(K) == pytest.approx(log_t_oracle(c), rel=1e-10)


def test_edge_value_tensor_oracle_d5():
    K = as_quasimomentum([0.0] * 5)
    # singular part of the midpoint error is O(h^3)
    values = [_resolvent_sum(K, 0.0, FiniteGrid(n)) for n in (12, 24, 48)]
    estimate, _ = extrapolate_sequence(values, 2, 3)
    assert estimate == pytest.approx(nu_edge(K), rel=1e-6)


def test_edge_requires_three_axes():
    with pytest.raises(DomainError, match="edge integral diverges"):
        nu_edge([math.pi, 0.2, 0.1])
    with pytest.raises(DomainError):
        nu_gap([0, 0], 0.1)


def test_edge_is_limit():
    K = [0.1, 0.2, 0.3]
    edge = nu_edge(K)
    for s in [1e-6, 1e-10, 1e-14]:
        assert nu(K, s) == pytest.approx(edge - nu_gap(K, s), rel=1e-13)
    assert nu(K, 1e-16) == pytest.approx(edge, rel=1e-6)


def test_pi_component_reduces_dimension():
    # a pi axis carries weight 0 and only contributes the factor 2 pi
    assert nu([math.pi, 0.2, 0.1, 0.4], 0.3) == pytest.approx(2 * math.pi * nu([0.2, 0.1, 0.4], 0.3), rel=1e-13)
    assert nu_edge([math.pi, 0, 0, 0]) == pytest.approx(2 * math.pi * nu_edge([0, 0, 0]), rel=1e-13)


@pytest.mark.parametrize("d", [5, 6])
def test_dnu_dz_dual_oracle(d):
    K = [0.0] * d
    value = dnu_dz_edge(K)
    assert value < 0
    assert value == pytest.approx(-log_t_oracle([2.0] * d, power=1), rel=1e-6)


def test_dnu_dz_domain():
    with pytest.raises(DomainError, match="edge derivative diverges"):
        dnu_dz_edge([0, 0, 0])
    with pytest.raises(DomainError):
        dnu_dz_edge([math.pi, 0, 0, 0, 0])


def test_dnu_dc_matches_oracle():
    assert dnu_dc_edge([0.0] * 5, 0) == pytest.approx(log_t_oracle([2.0] * 5, deriv=0), rel=1e-9)


@pytest.mark.parametrize("d", [3, 5])
def test_a2_curvature_dual(d):
    fd = a2_curvature(d)
    assert fd > 0
    assert fd == pytest.approx(curvature_under_integral(d), rel=1e-5)


def test_a2_permutation_symmetry():
    h = 1e-2
    base = nu_edge([0.0] * 4)
    quotients = [2 * (nu_edge([h if j == i else 0.0 for j in range(4)]) - base) / h ** 2 for i in range(4)]
    assert max(quotients) == min(quotients)


@pytest.mark.parametrize("d,K,target", [
    (3, [0.0] * 3, None),
    (3, [0.4, 0.2, 0.1], None),
])
def test_edge_law_d3(d, K, target):
    goal = math.pi * phi0(K) / 2
    devs = [abs(nu_gap(K, s) / math.sqrt(s) / goal - 1) for s in (1e-4, 1e-6, 1e-8)]
    assert devs[-1] < 0.01 and devs[0] > devs[1] > devs[2]


def test_edge_law_d4_next_order():
    # the leading s ln(1/s) law is approached only as 1/ln(1/s): the next term is exactly
    # linear in s, so (ratio - 1) ln(1/s) is constant
    K = [0.0] * 4
    goal = phi0(K) / 2
    s_values = (1e-4, 1e-6, 1e-8, 1e-10)
    devs = [nu_gap(K, s) / (s * -math.log(s)) / goal - 1 for s in s_values]
    assert devs[0] > devs[1] > devs[2] > devs[3] > 0
    scaled = [dev * -math.log(s) for dev, s in zip(devs, s_values)]
    assert max(scaled) - min(scaled) < 1e-4 * scaled[-1]


def test_edge_law_d5():
    K = [0.0] * 5
    goal = -dnu_dz_edge(K)
    devs = [abs(nu_gap(K, s) / s / goal - 1) for s in (1e-4, 1e-6, 1e-8)]
    assert devs[-1] < 0.01 and devs[0] > devs[1] > devs[2]


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(points_per_axis=63)
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=1.5)


def test_convergence_error_carries_estimate():
    tight = QuadratureSpec(rel_tol=1e-30, levels=1)
    with pytest.raises(ConvergenceError) as info:
        nu([0.0, 0.0, 0.0], 0.5, tight)
    assert info.value.estimate is not None and info.value.estimate > 0


def test_full_output_reports_error():
    value, err = nu([0.0, 0.0, 0.0], 0.5, full_output=True)
    assert 0 <= err < 1e-8 and value > 0
