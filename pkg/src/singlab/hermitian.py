"""Eigenfunctions Phi_k of the Hermitian Hamiltonian h = eta^(1/2) H eta^(-1/2).

Three constructions are provided:

* integral route (d < 0): Phi_k = (2/pi)^(3/2) L e^{-ibx} I(x) with
  I(x) = int dy e^{iby} sin(ky) J(x, y) and the closed-form K0 kernel J;
* spectral route: Phi_k expanded in the eta eigenbasis Psi_k', whose
  coefficient is a sum of delta and principal-value terms;
* d = 0 closed form in Ci/Si, with a direct log-kernel quadrature oracle.
"""

from __future__ import annotations

import dataclasses
import functools
import math
import warnings

import numpy as np
from scipy.optimize import brentq

from .errors import (InsufficientDataError, PoorFitWarning, PreconditionError,
                     SingularityError)
from .grid import GridFunction
from .metric import psi_k
from .model import SQRT_2_OVER_PI, ModelParams
from .quad import (DEFAULT_SPEC, EXPONENTIAL, OSCILLATORY, QuadratureSpec,
                   integrate_finite, integrate_semi_infinite)
from .specfun import (bessel_k0, cosine_integral_ci, cosine_integral_ci_principal,
                      sine_integral_si)

NORM_32 = (2.0 / math.pi) ** 1.5
# K0(40) ~ 1e-18: beyond |d| * distance = 40 the kernel is dropped
KERNEL_REACH = 40.0


# ---------------------------------------------------------------------------
# kernels

def kernel_J(params: ModelParams, x, y):
    """J(x, y) = K0(|d||y-x|)/2 - K0(|d|(y+x))/2."""
    if params.d == 0:
        raise PreconditionError("kernel_J requires d != 0")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x == y):
        raise SingularityError("kernel_J has a logarithmic singularity at x = y")
    a = abs(params.d)
    return 0.5 * bessel_k0(a * np.abs(y - x)) - 0.5 * bessel_k0(a * (x + y))


def kernel_A(b: float, x, y):
    """A(x, y) = e^{ib(y-x)} log|(x+y)/(x-y)| / pi, the d = 0 kernel."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x == y):
        raise SingularityError("kernel_A has a logarithmic singularity at x = y")
    return np.exp(1j * b * (y - x)) * np.log(np.abs((x + y) / (x - y))) / math.pi


# ---------------------------------------------------------------------------
# integral route

def _oscillation_cuts(lo, hi, omega):
    n = int(math.ceil((hi - lo) * omega / math.pi))
    return np.linspace(lo, hi, max(n, 1) + 1)[1:-1]


def kernel_transform(params: ModelParams, h, xs, omega: float,
                     spec: QuadratureSpec = DEFAULT_SPEC):
    """Return (T1, T2) with T1(x) = int h(y) K0(|d||y-x|) dy / 2 and
    T2(x) = int h(y) K0(|d|(x+y)) dy / 2 over y in [0, inf), for all x.

    ``h`` must be vectorized and oscillate at most with angular frequency
    ``omega``. The coincident-point singularity is moved to a common
    abscissa (t = 0 in y = x +- t) so all x are integrated together.
    """
    a = abs(params.d)
    xs = np.asarray(xs, dtype=float)
    reach = KERNEL_REACH / a

    def right(t):
        return 0.5 * h(xs[:, None] + t[None, :]) * bessel_k0(a * t)[None, :]

    span = np.minimum(xs, reach)

    def left(s):
        u = span[:, None] * s[None, :]
        k0 = np.zeros_like(u)
        pos = u > 0
        k0[pos] = bessel_k0(a * u[pos])
        return 0.5 * span[:, None] * h(xs[:, None] - u) * k0

    def mirror(y):
        return 0.5 * h(y[None, :]) * bessel_k0(a * (xs[:, None] + y[None, :]))

    sing = spec.replace(singular_points=(0.0,))
    t1 = integrate_finite(right, 0.0, reach, sing,
                          breakpoints=_oscillation_cuts(0.0, reach, omega)).value
    if np.any(span > 0):
        s_cuts = _oscillation_cuts(0.0, 1.0, omega * float(span.max()))
        t1 = t1 + integrate_finite(left, 0.0, 1.0, sing, breakpoints=s_cuts).value
    mspec = sing if np.any(xs == 0) else spec
    t2 = integrate_finite(mirror, 0.0, reach, mspec,
                          breakpoints=_oscillation_cuts(0.0, reach, omega)).value
    return t1, t2


def integral_I(params: ModelParams, k: float, xs, spec: QuadratureSpec = DEFAULT_SPEC,
               split: bool = False):
    """I(x) = int_0^inf e^{iby} sin(ky) J(x, y) dy.

    With ``split`` returns the direct and mirror contributions (I1, I2),
    I = I1 - I2.
    """
    b = params.b

    def g(y):
        return np.exp(1j * b * y) * np.sin(k * y)

    i1, i2 = kernel_transform(params, g, xs, abs(b) + k, spec)
    return (i1, i2) if split else i1 - i2


def integral_I_prime(params: ModelParams, k: float, xs, spec: QuadratureSpec = DEFAULT_SPEC):
    """dI/dx, moved onto the integrand by parts (g(0) = 0 kills the
    boundary term): I' = int g'(y) [K0(|d||y-x|) + K0(|d|(x+y))] dy / 2."""
    b = params.b

    def dg(y):
        return np.exp(1j * b * y) * (1j * b * np.sin(k * y) + k * np.cos(k * y))

    i1, i2 = kernel_transform(params, dg, xs, abs(b) + k, spec)
    return i1 + i2


def _stencil_derivative(params, k, xs, spec):
    h = min(0.05, 0.02 / k)
    xs = np.asarray(xs, dtype=float)
    central = xs >= 2 * h
    offsets = np.where(central[:, None], np.arange(-2, 3)[None, :],
                       np.arange(0, 5)[None, :]) * h
    pts = (xs[:, None] + offsets).ravel()
    vals = integral_I(params, k, pts, spec).reshape(xs.size, 5)
    cen = (vals[:, 0] - 8 * vals[:, 1] + 8 * vals[:, 3] - vals[:, 4]) / (12 * h)
    fwd = (-25 * vals[:, 0] + 48 * vals[:, 1] - 36 * vals[:, 2]
           + 16 * vals[:, 3] - 3 * vals[:, 4]) / (12 * h)
    mid = np.where(central, vals[:, 2], vals[:, 0])
    return mid, np.where(central, cen, fwd)


def phi_cap_k_numeric(params: ModelParams, k: float, grid,
                      spec: QuadratureSpec = DEFAULT_SPEC,
                      derivative: str = "parts") -> GridFunction:
    """Phi_k on ``grid`` by the integral route (requires d < 0).

    ``derivative`` selects how L's d/dx acts on I: "parts" integrates the
    exact derivative kernel, "stencil" differentiates I with a 5-point
    rule of step min(0.05, 0.02/k).
    """
    if not params.d < 0:
        raise PreconditionError("the integral route requires d < 0")
    if not k > 0:
        raise PreconditionError("k must be positive")
    grid = np.asarray(grid, dtype=float)
    if derivative == "parts":
        val = integral_I(params, k, grid, spec)
        der = integral_I_prime(params, k, grid, spec)
    elif derivative == "stencil":
        val, der = _stencil_derivative(params, k, grid, spec)
    else:
        raise ValueError(f"unknown derivative mode {derivative!r}")
    phi = NORM_32 * np.exp(-1j * params.b * grid) * (params.d * val - der)
    return GridFunction(grid, phi, {"params": params, "k": k, "route": "integral",
                                    "derivative": derivative})


# ---------------------------------------------------------------------------
# spectral route

def _spectral_poles(params, k):
    b = params.b
    poles = np.array([k - b, k + b, -b - k, b - k])
    if np.any(np.abs(poles) < 1e-9 * (1.0 + k)):
        raise PreconditionError("k = |b| puts a spectral pole at k' = 0")
    return poles


def phi_cap_k_spectral(params: ModelParams, k: float, grid,
                       spec: QuadratureSpec = DEFAULT_SPEC) -> GridFunction:
    """Phi_k = int_0^inf dk' Psi_k'(x) C(k') on ``grid``.

    C(k') carries half-weight deltas at k' = |k -+ b| plus the principal
    value (i/2pi) [1/(k'-p1) - 1/(k'-p2) - 1/(k'-p3) + 1/(k'-p4)]. Each pole
    on the path is folded symmetrically; the k'^-3 tail is summed per x.
    Valid for every d, including d = 0.
    """
    if not k > 0:
        raise PreconditionError("k must be positive")
    grid = np.asarray(grid, dtype=float)
    poles = _spectral_poles(params, k)
    pv_sign = np.array([1.0, -1.0, -1.0, 1.0])
    delta_sign = np.array([1.0, 1.0, -1.0, -1.0])

    def rational(kp):
        return sum(s / (kp - p) for s, p in zip(pv_sign, poles))

    def F(kp, xs=grid):
        return psi_k(params, kp[None, :], xs[:, None]) * rational(kp)[None, :]

    on_path = np.sort(poles[poles > 0])
    half = []
    for i, p in enumerate(on_path):
        gaps = [p]
        if i > 0:
            gaps.append(p - on_path[i - 1])
        if i + 1 < on_path.size:
            gaps.append(on_path[i + 1] - p)
        half.append(0.5 * min(gaps))
    k_head = 2.0 * (k + abs(params.b)) + 10.0

    total = np.zeros(grid.shape, dtype=complex)
    lo = 0.0
    for p, w in zip(on_path, half):
        if p - w > lo:
            total += integrate_finite(F, lo, p - w, spec).value

        def fold(t, p=p):
            return F(p + t) + F(p - t)

        total += integrate_finite(fold, 0.0, w, spec).value
        lo = p + w
    total += integrate_finite(F, lo, k_head, spec,
                              breakpoints=_oscillation_cuts(lo, k_head, float(grid.max(initial=0.0)))
                              ).value
    tail_spec = spec.replace(truncation=OSCILLATORY)
    for i, x in enumerate(grid):
        xs = np.array([x])

        def fx(kp, xs=xs):
            return F(np.atleast_1d(kp), xs)[0]

        omega = x if x > 0 else None
        total[i] += integrate_semi_infinite(fx, k_head, tail_spec, omega=omega).value

    phi = 1j / (2.0 * math.pi) * total
    for s, p in zip(delta_sign, poles):
        if p > 0:
            phi = phi + 0.5 * s * psi_k(params, p, grid)
    return GridFunction(grid, phi, {"params": params, "k": k, "route": "spectral"})


# ---------------------------------------------------------------------------
# far field and phase extraction

@dataclasses.dataclass(frozen=True)
class PhaseExtraction:
    delta: float
    amplitude: float
    prefactor: complex
    fit_window: tuple
    residual: float


@functools.lru_cache(maxsize=16)
def _mirror_reach(fraction: float) -> float:
    """z with int_z^inf K0 = fraction * pi/2."""
    spec = DEFAULT_SPEC.replace(truncation=EXPONENTIAL, abs_tol=1e-14)

    def excess(z):
        tail = integrate_semi_infinite(bessel_k0, z, spec).value
        return math.log(tail / (fraction * 0.5 * math.pi))

    return brentq(excess, 1e-3, 60.0, xtol=1e-10)


def asymptotic_window(params: ModelParams, k: float, fraction: float = 1e-6,
                      periods: int = 8):
    """Fit window [x_a, x_a + 2 pi periods / k]: past x_a the mirror kernel
    K0(|d|(x+y)) has lost all but ``fraction`` of its mass."""
    if params.d == 0:
        raise PreconditionError("the far-field window requires d != 0")
    x_a = _mirror_reach(fraction) / abs(params.d)
    return x_a, x_a + 2.0 * math.pi * periods / k


def extract_phase_shift(samples: GridFunction, k: float, window=None,
                        min_periods: float = 8.0) -> PhaseExtraction:
    """Fit samples ~ c e^{i theta} A sin(kx + delta) on ``window``.

    The fit is linear in the complex pair (alpha, beta) of
    alpha sin(kx) + beta cos(kx); theta makes e^{-i theta}(alpha, beta)
    real, after which A and delta follow. delta is reduced to (-pi/2, pi/2].
    """
    if window is None:
        window = (float(samples.grid[0]), float(samples.grid[-1]))
    lo, hi = window
    if (hi - lo) * k / (2.0 * math.pi) < min_periods - 1e-9:
        raise InsufficientDataError(
            f"window [{lo}, {hi}] holds {(hi - lo) * k / (2 * math.pi):.2f} periods, "
            f"need {min_periods}")
    part = samples.window(lo, hi)
    x, y = part.grid, part.values
    if x.size < 8:
        raise InsufficientDataError("too few samples in the fit window")
    basis = np.stack([np.sin(k * x), np.cos(k * x)], axis=1).astype(complex)
    (alpha, beta), *_ = np.linalg.lstsq(basis, y, rcond=None)
    theta = 0.5 * np.angle(alpha * alpha + beta * beta)
    va, vb = (alpha * np.exp(-1j * theta)).real, (beta * np.exp(-1j * theta)).real
    delta = math.atan2(vb, va)
    prefactor = np.exp(1j * theta)
    # fold into (-pi/2, pi/2], absorbing the sign into the prefactor
    if delta > 0.5 * math.pi:
        delta -= math.pi
        prefactor = -prefactor
    elif delta <= -0.5 * math.pi:
        delta += math.pi
        prefactor = -prefactor
    amp = math.hypot(va, vb)
    model = amp * prefactor * np.sin(k * x + delta)
    residual = float(np.sqrt(np.mean(np.abs(y - model) ** 2)))
    if residual > 0.05 * amp:
        warnings.warn(f"phase fit residual {residual:.3g} exceeds 5% of amplitude",
                      PoorFitWarning, stacklevel=2)
    return PhaseExtraction(delta, amp, complex(prefactor), (lo, hi), residual)


def wrap_phase(delta: float) -> float:
    """Reduce a phase modulo pi into (-pi/2, pi/2]."""
    r = math.remainder(delta, math.pi)
    return r if r > -0.5 * math.pi else r + math.pi


def phase_difference(a: float, b: float) -> float:
    """Distance between two phases defined modulo pi."""
    return abs(math.remainder(a - b, math.pi))


# ---------------------------------------------------------------------------
# d = 0

def _check_singular_k(b, k):
    if not k > 0:
        raise PreconditionError("k must be positive")
    if k == abs(b):
        raise SingularityError("Phi_k is undefined at spectral singularity k = |b|")


def phi_cap_k_singular(b: float, k: float, x):
    """Closed form of Phi_k at d = 0 (k != |b|).

    Ci of negative argument is continued on the principal branch,
    Ci(-z) = Ci(z) + i pi. b < 0 is mapped to b > 0 by Phi(-b) = conj Phi(b).
    """
    if b == 0:
        raise PreconditionError("b must be nonzero")
    _check_singular_k(b, k)
    if b < 0:
        return np.conj(phi_cap_k_singular(-b, k, x))
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    z1, z2 = (b - k) * x, (b + k) * x
    out = np.empty(x.shape, dtype=complex)
    e = np.exp(-1j * b * x)
    regular = SQRT_2_OVER_PI * e * np.sin(b * x) * np.sin(k * x) \
        + math.copysign(1.0, b - k) / math.sqrt(2 * math.pi) * e * np.cos(z1)
    nz = x > 0
    grp = np.zeros(x.shape, dtype=complex)
    if np.any(nz):
        # (Ci(z1) + Ci(-z1)) / 2 = Ci(|z1|) + i pi/2 on the principal branch
        ci_pair = 0.5 * (cosine_integral_ci_principal(z1[nz])
                         + cosine_integral_ci_principal(-z1[nz]))
        grp[nz] = (np.cos(z1[nz]) * ci_pair
                   - np.cos(z2[nz]) * cosine_integral_ci(z2[nz])
                   + np.sin(z1[nz]) * sine_integral_si(z1[nz])
                   - np.sin(z2[nz]) * sine_integral_si(z2[nz]))
    # at x = 0 the log terms cancel: cos z1 Ci(|z1|) - cos z2 Ci(z2) -> ln|b-k|/(b+k)
    z = ~nz
    if np.any(z):
        grp[z] = math.log(abs(b - k) / (b + k)) + 0.5j * math.pi
    out[:] = math.sqrt(2.0 / math.pi ** 3) * e * 1j * grp + regular
    return complex(out[0]) if scalar else out


def _half_line_exp(omega, lo, x, spec):
    """int_lo^inf e^{i omega y} 2y/(y^2 - x^2) dy, lo > x."""
    def f(y):
        return np.exp(1j * omega * y) * 2.0 * y / (y * y - x * x)
    return integrate_semi_infinite(f, lo, spec.replace(truncation=OSCILLATORY),
                                   omega=abs(omega)).value


def phi_cap_k_singular_quadrature(b: float, k: float, x: float,
                                  spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    """Phi_k at d = 0 as L applied to int A(x, y) psi_k(y) dy, by quadrature.

    With U(x) = int g(y) log|(x+y)/(x-y)| dy sqrt(2/pi)/pi and
    g = e^{iby} sin ky, Phi_k = -e^{-ibx} U'(x). U' is the principal value
    int g(y) [1/(y-x) + 1/(y+x)] dy, split as a subtracted PV on [0, 2x],
    a regular piece on [2x, 2x+1] and two oscillatory exponential tails.
    """
    if b == 0:
        raise PreconditionError("b must be nonzero")
    _check_singular_k(b, k)
    x = float(x)
    if x < 0:
        raise PreconditionError("x must be nonnegative")
    c = SQRT_2_OVER_PI / math.pi

    def g(y):
        return np.exp(1j * b * y) * np.sin(k * y)

    omega = abs(b) + k
    total = 0j
    if x > 0:
        gx = complex(g(x))

        def sub(y):
            return (g(y) - gx) / (y - x) + g(y) / (x + y)

        total += integrate_finite(sub, 0.0, 2 * x, spec.replace(singular_points=(x,)),
                                  breakpoints=_oscillation_cuts(0, 2 * x, omega)).value
    cut = 2 * x + 1.0

    def mid(y):
        return g(y) * 2.0 * y / (y * y - x * x)

    total += integrate_finite(mid, 2 * x, cut, spec).value
    # g = (e^{i(b+k)y} - e^{i(b-k)y}) / 2i
    total += (_half_line_exp(b + k, cut, x, spec) - _half_line_exp(b - k, cut, x, spec)) / 2j
    return complex(-np.exp(-1j * b * x) * c * total)


def singular_truncated_integral(b: float, x: float, radius: float,
                                spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    """int_0^radius A(x, y) psi_b(y) dy at k = |b|, the integral inside L.

    After removing the phase e^{-ibx}, its imaginary part is the positive
    sin^2(by) log|(x+y)/(x-y)| mass, growing like x log(radius).
    """
    if x <= 0:
        raise PreconditionError("x must be positive")
    k = abs(b)

    def f(y):
        return (np.exp(1j * b * (y - x)) * SQRT_2_OVER_PI * np.sin(k * y)
                * np.log(np.abs((x + y) / (x - y))) / math.pi)

    cuts = _oscillation_cuts(0.0, radius, 2 * k)
    inner = integrate_finite(f, 0.0, radius,
                             spec.replace(singular_points=(x,) if x < radius else (),
                                          max_subdivisions=max(spec.max_subdivisions, 20000)),
                             breakpoints=cuts).value
    return complex(inner)


def singular_divergence(b: float, x: float, radii=(50.0, 100.0, 200.0, 400.0),
                        spec: QuadratureSpec = DEFAULT_SPEC):
    """Im of int_0^R e^{iby} psi_b(y) log|(x+y)/(x-y)| dy / pi for each R.

    The phase e^{-ibx} of A is left out so the imaginary part is the
    positive sin^2 mass; returns the array of values (increasing in R).
    """
    vals = []
    for r in radii:
        vals.append((np.exp(1j * b * x) * singular_truncated_integral(b, x, r, spec)).imag)
    return np.array(vals)
