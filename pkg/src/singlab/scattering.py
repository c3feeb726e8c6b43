"""Scattering observables of h: phase shift, S-matrix, cross sections and
Breit-Wigner resonance fits.

Everything follows from N(k) = b^2 + d^2 - k^2 - 2idk:
S_BW = N / conj(N), S = N / |N| (the root of S_BW that is +1 at k -> 0),
delta = arg(N) / 2.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
from scipy.optimize import curve_fit, minimize_scalar

from .errors import NoResonanceError, PreconditionError, SingularityError
from .model import ModelParams
from .specfun import track_sqrt


def _numerator(params: ModelParams, k):
    k = np.asarray(k, dtype=float)
    b, d = params.b, params.d
    n = b * b + d * d - k * k - 2j * d * k
    if np.any(n == 0):
        raise SingularityError("S-matrix is undefined at the spectral singularity k = |b|")
    return n


def _out(v):
    return v.item() if np.ndim(v) == 0 else v


def phase_shift(params: ModelParams, k):
    """delta(k) = arg(N)/2 in (-pi/2, pi/2].

    For d != 0, N stays in one open half plane, so the principal argument
    is continuous in k; delta -> 0 as k -> 0 and delta -> -sign(d) pi/2 at
    large k.
    """
    n = _numerator(params, k)
    return _out(0.5 * np.angle(n))


def s_matrix(params: ModelParams, k):
    """S = N/|N| = e^{2 i delta}, unimodular for real k."""
    n = _numerator(params, k)
    return _out(n / np.abs(n))


def s_bw(params: ModelParams, k):
    """S_BW = [b^2 + (d - ik)^2] / [b^2 + (d + ik)^2] = S^2."""
    k = np.asarray(k, dtype=float)
    b, d = params.b, params.d
    num = b * b + (d - 1j * k) ** 2
    den = b * b + (d + 1j * k) ** 2
    if np.any(den == 0):
        raise SingularityError("S_BW is undefined at the spectral singularity k = |b|")
    return _out(num / den)


def s_matrix_tracked(params: ModelParams, ks):
    """S along an increasing k-scan as the continuous square root of S_BW,
    anchored at S = +1 on the small-k side."""
    ks = np.asarray(ks, dtype=float)
    if np.any(np.diff(ks) <= 0):
        raise ValueError("ks must be strictly increasing")
    return track_sqrt(np.atleast_1d(s_bw(params, ks)), anchor=1.0)


def sigma(params: ModelParams, k):
    """sigma(k) = (2 pi/k^2) [1 + (k^2-b^2-d^2)/sqrt((k^2+d^2-b^2)^2 + 4 b^2 d^2)].

    Evaluated without cancellation: with c = b^2+d^2-k^2 and r the root,
    1 - c/r = 4 d^2 k^2 / (r (r + c)) when c > 0. At d = 0 this is the step
    0 (k < |b|), 4 pi/k^2 (k > |b|).
    """
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0):
        raise PreconditionError("sigma requires k > 0")
    b, d = params.b, params.d
    c = b * b + d * d - k * k
    r = np.sqrt((k * k + d * d - b * b) ** 2 + 4 * b * b * d * d)
    if np.any(r == 0):
        raise SingularityError("sigma is undefined at the spectral singularity k = |b|")
    with np.errstate(invalid="ignore", divide="ignore"):
        stable = 8.0 * math.pi * d * d / (r * (r + c))
        direct = 2.0 * math.pi / (k * k) * (r - c) / r
    return _out(np.where(c > 0, stable, direct))


def sigma_zero_limit(params: ModelParams) -> float:
    """sigma(0+) = 4 pi d^2 / (b^2 + d^2)^2."""
    b, d = params.b, params.d
    return 4.0 * math.pi * d * d / (b * b + d * d) ** 2


def resonance_parameters(params: ModelParams):
    """(E0, |Gamma|) = (b^2 - d^2, 4|b d|)."""
    b, d = params.b, params.d
    return b * b - d * d, 4.0 * abs(b * d)


def sigma_bw(params: ModelParams, energy):
    """Lorentzian (4 pi/b^2) (Gamma/2)^2 / ((E-E0)^2 + (Gamma/2)^2)."""
    e = np.asarray(energy, dtype=float)
    e0, gamma = resonance_parameters(params)
    hw2 = (0.5 * gamma) ** 2
    if hw2 == 0:
        raise PreconditionError("sigma_bw is degenerate at d = 0")
    return _out(4.0 * math.pi / params.b ** 2 * hw2 / ((e - e0) ** 2 + hw2))


def sigma_s2(params: ModelParams, k):
    """Cross section carried by S_BW = S^2: (4 pi/k^2) sin^2(2 delta),
    computed as 16 pi d^2 / |N|^2. Equals sigma_bw(k^2) identically."""
    n = _numerator(params, k)
    return _out(16.0 * math.pi * params.d ** 2 / np.abs(n) ** 2)


@dataclasses.dataclass(frozen=True)
class ScatteringPoint:
    k: float
    delta: float
    s_value: complex
    sigma: float


def scattering_point(params: ModelParams, k: float) -> ScatteringPoint:
    return ScatteringPoint(float(k), float(phase_shift(params, k)),
                           complex(s_matrix(params, k)), float(sigma(params, k)))


@dataclasses.dataclass(frozen=True)
class ResonanceFit:
    e0: float
    gamma: float
    peak_sigma: float
    fit_residual: float
    k_peak: float
    e_peak: float
    amplitude: float


def _lorentzian(e, e0, gamma, height):
    hw2 = (0.5 * gamma) ** 2
    return height * hw2 / ((e - e0) ** 2 + hw2)


def find_resonance(params: ModelParams, k_range=None, n_points: int = 10000) -> ResonanceFit:
    """Locate the resonance produced by the Jost zero near the real axis.

    sigma is scanned on ``n_points`` k-values and its interior maximum
    refined by golden-section search (``peak_sigma``, ``k_peak``). sigma
    itself is not Lorentzian; the Lorentzian (e0, gamma) is fitted by
    least squares to the S^2 cross section near its peak, in E = k^2.
    """
    b, d = abs(params.b), params.d
    if d == 0:
        raise PreconditionError("find_resonance requires d != 0")
    if not abs(d) < b / math.sqrt(2.0):
        raise PreconditionError("find_resonance requires |d| < |b|/sqrt(2)")
    k_res = math.sqrt(b * b - d * d)
    if k_range is None:
        k_range = (0.02 * k_res, 2.0 * k_res)
    k_lo, k_hi = map(float, k_range)
    if not (0 < k_lo < k_res < k_hi):
        raise PreconditionError("k_range must bracket sqrt(b^2 - d^2)")
    if n_points < 16:
        raise PreconditionError("n_points must be at least 16")
    ks = np.linspace(k_lo, k_hi, n_points)
    sig = sigma(params, ks)
    i = int(np.argmax(sig))
    if i == 0 or i == ks.size - 1:
        raise NoResonanceError("cross section has no interior maximum in k_range")
    opt = minimize_scalar(lambda k: -sigma(params, k), bracket=(ks[i - 1], ks[i], ks[i + 1]),
                          method="golden", tol=1e-12)
    k_peak = float(opt.x)
    peak = float(sigma(params, k_peak))

    # the S^2 cross section is sampled on the same scan; fit within a few
    # half-widths of its own maximum
    es = ks * ks
    s2 = sigma_s2(params, ks)
    j = int(np.argmax(s2))
    half = 0.5 * s2[j]
    above = np.nonzero(s2 >= half)[0]
    width = max(es[above[-1]] - es[above[0]], es[min(j + 1, es.size - 1)] - es[j])
    sel = np.abs(es - es[j]) <= 2.0 * width
    if np.count_nonzero(sel) < 8:
        raise NoResonanceError("resonance is not resolved by the scan")
    p0 = (es[j], width, s2[j])
    popt, _ = curve_fit(_lorentzian, es[sel], s2[sel], p0=p0, maxfev=20000)
    e0, gamma, height = float(popt[0]), abs(float(popt[1])), float(popt[2])
    model = _lorentzian(es[sel], e0, gamma, height)
    resid = float(np.sqrt(np.mean((model - s2[sel]) ** 2)) / height)
    if not (es[0] <= e0 <= es[-1]):
        raise NoResonanceError("fitted resonance energy lies outside the scan")
    return ResonanceFit(e0, gamma, peak, resid, k_peak, k_peak * k_peak, height)
