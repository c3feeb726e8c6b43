import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from singlab import hermitian as h
from singlab.errors import InsufficientDataError, PoorFitWarning, PreconditionError, SingularityError
from singlab.grid import GridFunction
from singlab.model import ModelParams
from singlab.quad import DEFAULT_SPEC, OSCILLATORY, integrate_semi_infinite
from singlab.scattering import phase_shift

P = ModelParams(1.0, -0.1)
AMP = math.sqrt(2.0 / math.pi)


def j_by_kprime(d, x, y):
    """Direct k' quadrature of int sin(k'x) sin(k'y) / sqrt(k'^2 + d^2) dk'."""
    spec = DEFAULT_SPEC.replace(truncation=OSCILLATORY, abs_tol=1e-12, rel_tol=1e-12)
    out = 0.0
    for sign, u in ((1.0, abs(x - y)), (-1.0, x + y)):
        val = integrate_semi_infinite(lambda q, u=u: np.cos(q * u) / np.sqrt(q * q + d * d),
                                      0.0, spec, omega=u).value
        out += 0.5 * sign * val
    return out


# --- kernels --------------------------------------------------------------

def test_kernel_J_symmetric_positive_decaying():
    x, y = 1.3, np.array([0.2, 2.0, 7.5])
    assert np.allclose(h.kernel_J(P, x, y), h.kernel_J(P, y, x), rtol=0, atol=0)
    assert np.all(h.kernel_J(P, x, y) > 0)
    assert h.kernel_J(P, 1.0, 600.0) < 1e-20


def test_kernel_J_independent_of_b():
    assert h.kernel_J(ModelParams(1.0, -0.3), 0.7, 2.1) == h.kernel_J(ModelParams(5.0, -0.3), 0.7, 2.1)


def test_kernel_J_errors():
    with pytest.raises(SingularityError):
        h.kernel_J(P, 1.0, 1.0)
    with pytest.raises(PreconditionError):
        h.kernel_J(ModelParams(1.0, 0.0), 1.0, 2.0)


@pytest.mark.parametrize("d,x,y", [(-0.1, 1.0, 2.5), (-0.5, 0.3, 4.0), (-1.0, 2.0, 2.2)])
def test_kernel_J_matches_kprime_integral(d, x, y):
    ref = j_by_kprime(d, x, y)
    assert abs(h.kernel_J(ModelParams(1.0, d), x, y) - ref) < 1e-8


def test_kernel_A():
    b = 0.8
    assert abs(h.kernel_A(b, 1.0, 2.0) - np.exp(1j * b) * math.log(3) / math.pi) < 1e-15
    assert abs(h.kernel_A(b, 2.0, 1.0) - np.conj(h.kernel_A(b, 1.0, 2.0))) < 1e-15
    assert abs(abs(h.kernel_A(3.0, 0.4, 1.7)) - abs(h.kernel_A(0.2, 0.4, 1.7))) < 1e-15
    with pytest.raises(SingularityError):
        h.kernel_A(b, 1.0, 1.0)


# --- integral route -------------------------------------------------------

def test_far_field_window_40_60():
    xs = np.linspace(40.0, 60.0, 201)
    phi = h.phi_cap_k_numeric(P, 1.0, xs)
    fit = h.extract_phase_shift(phi, 1.0, min_periods=3)
    assert h.phase_difference(fit.delta, 0.760419) < 1e-3
    assert abs(fit.amplitude - AMP) < 1e-3


def test_far_field_default_window_tight():
    lo, hi = h.asymptotic_window(P, 2.0)
    assert lo >= 3.0 / abs(P.d)
    phi = h.phi_cap_k_numeric(P, 2.0, np.linspace(lo, hi, 257))
    fit = h.extract_phase_shift(phi, 2.0, (lo, hi))
    assert h.phase_difference(fit.delta, phase_shift(P, 2.0)) < 1e-8
    assert abs(fit.amplitude - AMP) < 1e-8


def test_route_equivalence():
    p = ModelParams(1.0, -0.3)
    xs = np.linspace(0.0, 10.0, 21)
    a = h.phi_cap_k_numeric(p, 0.5, xs).values
    s = h.phi_cap_k_spectral(p, 0.5, xs).values
    assert np.max(np.abs(a - s)) < 1e-8


def test_stencil_matches_parts():
    xs = np.array([0.5, 2.0, 5.0])
    a = h.phi_cap_k_numeric(P, 1.0, xs).values
    s = h.phi_cap_k_numeric(P, 1.0, xs, derivative="stencil").values
    assert np.max(np.abs(a - s)) < 1e-6
    with pytest.raises(ValueError):
        h.phi_cap_k_numeric(P, 1.0, xs, derivative="spline")


def test_integral_route_preconditions():
    with pytest.raises(PreconditionError):
        h.phi_cap_k_numeric(ModelParams(1.0, 0.1), 1.0, [1.0])
    with pytest.raises(PreconditionError):
        h.phi_cap_k_numeric(P, 0.0, [1.0])
    with pytest.raises(PreconditionError):
        h.phi_cap_k_spectral(P, 1.0, [1.0])


def test_mirror_contribution_decays():
    p = ModelParams(1.0, -0.5)
    xs = np.array([10.0, 15.0, 20.0]) / abs(p.d)
    i1, i2 = h.integral_I(p, 1.0, xs, split=True)
    ratio = np.abs(i2) / np.abs(i1 - i2)
    assert ratio[0] < 1e-5
    assert ratio[2] < 1e-8
    assert np.all(np.diff(ratio) < 0)


def test_phi_vanishes_nowhere_special_at_origin():
    # Phi_k(0) is finite and both routes agree there
    a = h.phi_cap_k_numeric(P, 0.7, [0.0]).values[0]
    s = h.phi_cap_k_spectral(P, 0.7, [0.0]).values[0]
    assert np.isfinite(a) and abs(a - s) < 1e-8


# --- phase extraction -----------------------------------------------------

def _samples(k, f, lo=0.0, periods=10, n=400):
    x = np.linspace(lo, lo + 2 * math.pi * periods / k, n)
    return GridFunction(x, f(x).astype(complex))


def test_fit_pure_sine():
    fit = h.extract_phase_shift(_samples(1.3, lambda x: np.sin(1.3 * x)), 1.3)
    assert abs(fit.delta) < 1e-13 and abs(fit.amplitude - 1) < 1e-13
    assert fit.residual < 1e-13


def test_fit_offset():
    fit = h.extract_phase_shift(_samples(2.0, lambda x: np.sin(2.0 * x + 0.5)), 2.0)
    assert abs(fit.delta - 0.5) < 1e-13


@given(st.floats(0.2, 5), st.floats(-1.5, 1.5), st.floats(0.1, 3), st.floats(-math.pi, math.pi))
@settings(max_examples=60, deadline=None)
def test_fit_recovers_complex_prefactor(k, delta, amp, theta):
    s = _samples(k, lambda x: amp * np.exp(1j * theta) * np.sin(k * x + delta), lo=3.0)
    fit = h.extract_phase_shift(s, k)
    assert h.phase_difference(fit.delta, delta) < 1e-10
    assert abs(fit.amplitude - amp) < 1e-10 * (1 + amp)
    model = fit.amplitude * fit.prefactor * np.sin(k * s.grid + fit.delta)
    assert np.max(np.abs(model - s.values)) < 1e-9
    assert -math.pi / 2 < fit.delta <= math.pi / 2


def test_fit_insufficient_data():
    with pytest.raises(InsufficientDataError):
        h.extract_phase_shift(_samples(1.0, np.sin, periods=5), 1.0)


def test_fit_poor_warning(rng):
    s = _samples(1.0, lambda x: np.sin(x) + rng.normal(0, 0.5, x.size))
    with pytest.warns(PoorFitWarning):
        h.extract_phase_shift(s, 1.0)


def test_wrap_phase():
    assert abs(h.wrap_phase(0.5 + math.pi) - 0.5) < 1e-15
    assert h.wrap_phase(-math.pi / 2) == pytest.approx(math.pi / 2)
    assert h.phase_difference(0.1, 0.1 + 2 * math.pi) < 1e-15


# --- d = 0 ----------------------------------------------------------------

def test_singular_sign_jump():
    b, x, eps = 1.0, 1.7, 1e-7
    jump = h.phi_cap_k_singular(b, b - eps, x) - h.phi_cap_k_singular(b, b + eps, x)
    assert abs(jump - 2 / math.sqrt(2 * math.pi) * np.exp(-1j * b * x)) < 1e-5


def test_singular_closed_vs_quadrature():
    for b, k, x in ((1.0, 0.5, 2.0), (2.0, 0.7, 0.3), (0.5, 3.0, 5.0)):
        ref = h.phi_cap_k_singular_quadrature(b, k, x)
        assert abs(h.phi_cap_k_singular(b, k, x) - ref) < 1e-10


def test_singular_origin():
    b, k = 1.0, 0.5
    val = h.phi_cap_k_singular(b, k, 0.0)
    expected = (math.sqrt(2 / math.pi ** 3) * 1j * (math.log(0.5 / 1.5) + 0.5j * math.pi)
                + 1 / math.sqrt(2 * math.pi))
    assert abs(val - expected) < 1e-14
    assert abs(val - h.phi_cap_k_singular(b, k, 1e-9)) < 1e-7
    assert abs(val - h.phi_cap_k_singular_quadrature(b, k, 0.0)) < 1e-8


def test_singular_negative_b_conjugates():
    x = np.array([0.5, 2.0])
    assert np.allclose(h.phi_cap_k_singular(-1.0, 0.4, x), np.conj(h.phi_cap_k_singular(1.0, 0.4, x)))
    ref = h.phi_cap_k_singular_quadrature(-1.0, 0.4, 2.0)
    assert abs(h.phi_cap_k_singular(-1.0, 0.4, 2.0) - ref) < 1e-10


def test_singular_errors():
    with pytest.raises(SingularityError):
        h.phi_cap_k_singular(1.0, 1.0, 2.0)
    with pytest.raises(SingularityError):
        h.phi_cap_k_singular_quadrature(1.0, 1.0, 2.0)
    with pytest.raises(PreconditionError):
        h.phi_cap_k_singular(0.0, 1.0, 2.0)
    with pytest.raises(PreconditionError):
        h.phi_cap_k_singular(1.0, -1.0, 2.0)


def test_spectral_route_at_d_zero_matches_closed_form():
    p = ModelParams(1.0, 0.0)
    xs = np.array([0.5, 2.0, 4.0])
    s = h.phi_cap_k_spectral(p, 0.5, xs).values
    assert np.max(np.abs(s - h.phi_cap_k_singular(1.0, 0.5, xs))) < 1e-8


def test_singular_divergence_grows():
    vals = h.singular_divergence(1.0, 1.0)
    assert np.all(np.diff(vals) > 0)
    # logarithmic: successive doublings add roughly equal increments
    inc = np.diff(vals)
    assert np.all(inc > 0.2 * inc[0])
