import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from singlab.errors import ConvergenceError, DivergenceError
from singlab.quad import (DEFAULT_SPEC, EXPONENTIAL, OSCILLATORY, QuadratureSpec,
                          integrate_finite, integrate_semi_infinite, wynn_epsilon)
from singlab.specfun import bessel_k0


def test_default_spec():
    assert (DEFAULT_SPEC.abs_tol, DEFAULT_SPEC.rel_tol, DEFAULT_SPEC.max_subdivisions) == (
        1e-10, 1e-10, 2000)


@pytest.mark.parametrize("kw", [dict(abs_tol=0), dict(rel_tol=-1), dict(max_subdivisions=0),
                                dict(truncation="none")])
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        QuadratureSpec(**kw)


def test_constant():
    assert integrate_finite(lambda x: np.ones_like(x), 0.0, 1.0).value == pytest.approx(1.0)


def test_log_singularity():
    spec = DEFAULT_SPEC.replace(singular_points=(0.0,))
    res = integrate_finite(lambda x: np.log(1 / x), 0.0, 1.0, spec)
    assert abs(res.value - 1.0) < 1e-10
    assert res.error <= max(spec.abs_tol, spec.rel_tol)


def test_k0_interior_singularity():
    spec = DEFAULT_SPEC.replace(singular_points=(1.0,))
    res = integrate_finite(lambda x: bessel_k0(np.abs(x - 1.0)), 0.0, 2.0, spec)
    oracle = 2 * mp.quad(lambda t: mp.besselk(0, t), [0, 0.5, 1])
    assert abs(res.value - float(oracle)) < 1e-10


def test_singular_points_never_evaluated():
    seen = []

    def f(x):
        seen.append(x.copy())
        return np.log(np.abs(x - 0.3))

    integrate_finite(f, 0.0, 1.0, DEFAULT_SPEC.replace(singular_points=(0.3, 1.0)))
    pts = np.concatenate(seen)
    assert not np.any(pts == 0.3) and not np.any(pts == 1.0)


def test_convergence_error_carries_estimate():
    spec = DEFAULT_SPEC.replace(max_subdivisions=4, abs_tol=1e-14, rel_tol=1e-14)
    with pytest.raises(ConvergenceError) as exc:
        integrate_finite(lambda x: np.sin(200 * x), 0.0, 10.0, spec)
    assert exc.value.estimate is not None


def test_exp_decay():
    res = integrate_semi_infinite(lambda x: np.exp(-x), 0.0,
                                  DEFAULT_SPEC.replace(truncation=EXPONENTIAL))
    assert abs(res.value - 1.0) < 1e-10


def test_sin_exp():
    res = integrate_semi_infinite(lambda y: np.sin(y) * np.exp(-y), 0.0)
    assert abs(res.value - 0.5) < 1e-10


def test_k0_cos_closed_form():
    spec = DEFAULT_SPEC.replace(truncation=EXPONENTIAL, singular_points=(0.0,))
    res = integrate_semi_infinite(lambda x: bessel_k0(x) * np.cos(x), 0.0, spec)
    assert abs(res.value - 1.110720734539592) < 1e-10


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 2.0])
def test_k0_cos_identity(alpha):
    spec = DEFAULT_SPEC.replace(truncation=EXPONENTIAL, singular_points=(0.0,))
    res = integrate_semi_infinite(lambda x: bessel_k0(x) * np.cos(alpha * x), 0.0, spec)
    assert abs(res.value - math.pi / (2 * math.sqrt(1 + alpha * alpha))) < 1e-8


def test_oscillatory_tail_acceleration():
    spec = DEFAULT_SPEC.replace(truncation=OSCILLATORY)
    res = integrate_semi_infinite(lambda x: np.sin(x) / x, 1.0, spec, omega=1.0)
    ref = math.pi / 2 - float(mp.si(1))
    assert abs(res.value - ref) < 1e-9


def test_oscillatory_algebraic_mapping():
    spec = DEFAULT_SPEC.replace(truncation=OSCILLATORY)
    res = integrate_semi_infinite(lambda x: 1.0 / x ** 3, 1.0, spec)
    assert abs(res.value - 0.5) < 1e-10


def test_divergent_tail_detected():
    with pytest.raises(DivergenceError):
        integrate_semi_infinite(lambda x: np.ones_like(x), 0.0,
                                DEFAULT_SPEC.replace(truncation=EXPONENTIAL))


def test_vector_valued_integrand():
    w = np.array([1.0, 2.0, 3.0])
    res = integrate_finite(lambda x: np.cos(w[:, None] * x[None, :]), 0.0, 1.0)
    assert np.allclose(res.value, np.sin(w) / w, atol=1e-12)


def test_wynn_epsilon_alternating_series():
    partial = np.cumsum([(-1) ** n / (n + 1) for n in range(20)])
    est, _ = wynn_epsilon(list(partial))
    assert abs(est - math.log(2)) < 1e-10
    assert isinstance(est, float)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.1, 4), st.floats(0.1, 4))
@settings(max_examples=40, deadline=None)
def test_linearity(alpha, beta, p, q):
    f = lambda x: np.exp(-p * x) * np.cos(q * x)
    g = lambda x: np.sin(p * x) / (1 + q * x * x)
    a, b = 0.0, 3.0
    lhs = integrate_finite(lambda x: alpha * f(x) + beta * g(x), a, b).value
    rhs = alpha * integrate_finite(f, a, b).value + beta * integrate_finite(g, a, b).value
    assert abs(lhs - rhs) < 1e-9 * (1 + abs(alpha) + abs(beta))


def test_refinement_monotonicity():
    cases = [
        (lambda x: np.log(1 / x), 0.0, 1.0, (0.0,), 1.0),
        (lambda x: np.exp(-x) * np.cos(5 * x), 0.0, 4.0, (), float(
            mp.quad(lambda t: mp.exp(-t) * mp.cos(5 * t), [0, 4]))),
        (lambda x: np.sqrt(x), 0.0, 2.0, (0.0,), 2 / 3 * 2 ** 1.5),
    ]
    for f, a, b, sing, ref in cases:
        errs = []
        for tol in (1e-4, 5e-5, 2.5e-5, 1.25e-5, 6e-6):
            spec = QuadratureSpec(abs_tol=tol, rel_tol=tol, singular_points=sing)
            errs.append(abs(integrate_finite(f, a, b, spec).value - ref))
        # the achieved discrepancy never grows when tolerances are halved
        # (allowing rounding-level noise)
        assert all(e2 <= e1 + 1e-15 for e1, e2 in zip(errs, errs[1:])), errs


def test_wynn_epsilon_stalled_sequence():
    # repeated partial sums must not turn into a spurious huge estimate
    seq = [1.0, 0.5, 0.75, 0.75, 0.75, 0.75, 0.75]
    est, _ = wynn_epsilon(seq)
    assert abs(est - 0.75) < 1e-15


def test_oscillatory_slow_frequency_k0():
    from singlab.specfun import bessel_k0
    spec = DEFAULT_SPEC.replace(truncation=OSCILLATORY, abs_tol=1e-12, rel_tol=1e-12)
    r = integrate_semi_infinite(lambda q: np.cos(0.2 * q) / np.sqrt(q * q + 1), 0.0, spec,
                                omega=0.2)
    assert abs(r.value - bessel_k0(0.2)) < 1e-10
