import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from singlab.errors import PoleError, PreconditionError, SingularityError
from singlab.grid import gauss_legendre_grid
from singlab.model import (SQRT_2_OVER_PI, ModelParams, SpectrumKind, classify_spectrum,
                           jost_function, jost_zero, normalization, phi_k, resolvent_kernel)
from singlab.quad import integrate_finite

P = ModelParams(1.0, -0.1)


def test_params_validation():
    with pytest.raises(PreconditionError):
        ModelParams(0.0, -0.1)
    with pytest.raises(PreconditionError):
        ModelParams(1.0, math.inf)


def test_classification_by_sign():
    assert ModelParams(1, -0.1).kind is SpectrumKind.REGULAR
    assert ModelParams(1, 0).kind is SpectrumKind.SPECTRAL_SINGULARITY
    assert ModelParams(1, 0.1).kind is SpectrumKind.BOUND_STATE


def test_phi_at_origin():
    k = 0.7
    ref = -SQRT_2_OVER_PI * k / cmath.sqrt(k * k + P.robin ** 2)
    assert abs(phi_k(P, k, 0.0) - ref) < 1e-15


def test_phi_boundary_condition_exact():
    for k in (0.1, 1.0, 3.3):
        assert abs(phi_k(P, k, 0.0, 1) + P.robin * phi_k(P, k, 0.0)) < 1e-15


def test_phi_matches_high_precision():
    b, d, k, x = 1, mp.mpf("-0.1"), 1, 1
    w = d + 1j * b
    ref = mp.sqrt(2 / mp.pi) / mp.sqrt(k * k + w * w) * (w * mp.sin(k * x) - k * mp.cos(k * x))
    assert abs(phi_k(P, 1.0, 1.0) - complex(ref)) < 1e-14


def test_phi_eigen_residual(rng):
    for _ in range(50):
        k, x = rng.uniform(0.05, 8), rng.uniform(0, 20)
        assert abs(-phi_k(P, k, x, 2) - k * k * phi_k(P, k, x)) < 1e-13


def test_phi_derivatives_against_finite_differences():
    x, h = 1.3, 1e-4
    for n in range(4):
        fd = (phi_k(P, 2.0, x + h, n) - phi_k(P, 2.0, x - h, n)) / (2 * h)
        assert abs(fd - phi_k(P, 2.0, x, n + 1)) < 1e-6


def test_phi_requires_positive_k():
    with pytest.raises(PreconditionError):
        phi_k(P, 0.0, 1.0)


def test_singular_normalization():
    with pytest.raises(SingularityError):
        normalization(ModelParams(1.0, 0.0), 1.0)


def test_jost_examples():
    assert jost_function(P, 1.0) == pytest.approx(-0.1 + 2j)
    assert jost_function(ModelParams(1.0, 0.0), -1.0) == 0
    for b, d in [(1, -0.1), (2.5, 0.3), (-1, 0.7)]:
        p = ModelParams(b, d)
        assert abs(jost_function(p, jost_zero(p))) < 1e-15
        assert jost_zero(p) == complex(-b, d)


def test_jost_never_vanishes_on_real_axis():
    ks = np.linspace(0.01, 10, 5000)
    for d in (-0.5, -0.01, 0.01, 0.4):
        p = ModelParams(1.0, d)
        w = np.abs([jost_function(p, k) for k in ks])
        assert w.min() >= abs(d)


@given(st.floats(0, 10), st.floats(0, 10), st.floats(-5, 5), st.floats(0.05, 5))
@settings(max_examples=80, deadline=None)
def test_resolvent_symmetric(x, xi, re, im):
    lam = complex(re, im)
    assert resolvent_kernel(P, x, xi, lam) == pytest.approx(resolvent_kernel(P, xi, x, lam),
                                                            rel=1e-12, abs=1e-300)


def test_resolvent_pole_errors():
    with pytest.raises(PoleError):
        resolvent_kernel(P, 1.0, 2.0, 2.0)
    p = ModelParams(1.0, 0.3)
    lam0 = -p.robin ** 2
    with pytest.raises(PoleError) as exc:
        resolvent_kernel(p, 1.0, 2.0, lam0)
    assert exc.value.abs_w is not None


def test_resolvent_blowup_near_jost_zero():
    # the Jost zero is on the physical sheet only for d > 0
    p = ModelParams(1.0, 0.3)
    lam0 = -p.robin ** 2
    prods = []
    for eps in (1e-2, 1e-3, 1e-4, 1e-5):
        lam = lam0 + eps * cmath.exp(0.4j)
        r = resolvent_kernel(p, 0.5, 0.8, lam)
        k = cmath.sqrt(lam)
        k = k if k.imag > 0 else -k
        prods.append(abs(r) * abs(jost_function(p, k)))
        assert abs(r) > 1.0 / eps * 1e-2
    # |R| |W| stays bounded: R ~ 1/W
    assert max(prods) / min(prods) < 1.1


def test_resolvent_solves_ode():
    # phi e / W with W = phi e' - phi' e is the kernel of (lambda - H)^-1
    lam = complex(-0.5, 0.8)

    def bump(xi):
        return np.where((xi > 1) & (xi < 3), np.sin(np.pi * (xi - 1) / 2) ** 4, 0.0)

    def g(x):
        f = lambda xi: np.array([resolvent_kernel(P, x, s, lam) for s in xi]) * bump(xi)
        spec_pts = tuple(sorted({1.0, 3.0, min(max(x, 1.0), 3.0)}))
        out = 0j
        for a, b in zip(spec_pts, spec_pts[1:]):
            if b > a:
                out += integrate_finite(f, a, b).value
        return out

    h = 1e-3
    for x in (0.5, 2.0, 2.7, 4.0):
        gm, g0, gp = g(x - h), g(x), g(x + h)
        res = (gp - 2 * g0 + gm) / h ** 2 + lam * g0 - bump(np.array([x]))[0]
        assert abs(res) < 1e-5


def test_classify_examples():
    assert classify_spectrum(ModelParams(1, -0.1)).kind is SpectrumKind.REGULAR
    s = classify_spectrum(ModelParams(1, 0))
    assert s.kind is SpectrumKind.SPECTRAL_SINGULARITY
    assert s.singular_k == 1 and s.singular_energy == 1
    s = classify_spectrum(ModelParams(1, 0.1))
    assert s.kind is SpectrumKind.BOUND_STATE and s.jost_zero.imag > 0
    assert s.bound_energy == pytest.approx(complex(-1, 0.1) ** 2)
    assert classify_spectrum(ModelParams(1, -0.1)).singular_k is None


def test_biorthonormality_packets():
    # H-dagger eigenfunctions are conj(phi_k), so <phi*_k|phi_k'> is the
    # bilinear integral of phi_k phi_k'
    k0a, k0c, s = 2.0, 2.3, 0.3
    a = lambda k: np.exp(-(k - k0a) ** 2 / (2 * s * s))
    c = lambda k: np.exp(-(k - k0c) ** 2 / (2 * s * s)) * (1 + 0.5j * (k - k0c))
    x, wx = gauss_legendre_grid(0.0, 80.0, 160, 20)
    kq, wk = gauss_legendre_grid(0.01, 5.0, 40, 20)
    phi = np.array([phi_k(P, k, x) for k in kq])
    g = (wk * a(kq)) @ phi
    h = (wk * c(kq)) @ phi
    x_space = np.sum(wx * g * h)
    k_space = np.sum(wk * a(kq) * c(kq))
    assert abs(x_space - k_space) < 1e-6
