"""Special functions: K0, sine/cosine integrals, branch-controlled sqrt/log.

All real functions accept scalars or numpy arrays and return the same shape
(a Python float for scalar input).
"""

from __future__ import annotations

import cmath
import enum
import math

import numpy as np

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061

_K0_SERIES_MAX = 2.0
_CISI_SERIES_MAX = 2.0
_EPS = 1e-17


class BranchChoice(enum.Enum):
    PRINCIPAL = "principal"
    POSITIVE_DEFINITE_ROOT = "positive-definite-root"


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _k0_series(x):
    # K0 = -(ln(x/2) + gamma) I0 + sum (x^2/4)^k / (k!)^2 H_k
    q = 0.25 * x * x
    term = np.ones_like(x)
    i0 = np.ones_like(x)
    tail = np.zeros_like(x)
    harmonic = 0.0
    for k in range(1, 30):
        term = term * q / (k * k)
        harmonic += 1.0 / k
        i0 = i0 + term
        tail = tail + term * harmonic
        if np.all(term * harmonic <= _EPS * np.abs(tail)):
            break
    return -(np.log(0.5 * x) + EULER_GAMMA) * i0 + tail


def _k0_cf2(x):
    # Steed's continued fraction CF2 (Temme normalization), order zero.
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    a1 = 0.25
    q = np.full_like(x, a1)
    c = np.full_like(x, a1)
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, 200):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = h + delh
        dels = q * delh
        s = s + dels
        if np.all(np.abs(dels) <= _EPS * np.abs(s)):
            break
    return np.sqrt(np.pi / (2.0 * x)) * np.exp(-x) / s


def bessel_k0(x):
    """Modified Bessel function of the second kind, order zero.

    Power series with the logarithmic term for ``x <= 2`` and Steed's
    continued fraction above. Raises :class:`DomainError` for ``x <= 0``.
    """
    arr, scalar = _as_array(x)
    if np.any(~(arr > 0)):
        raise DomainError("bessel_k0 requires x > 0")
    out = np.empty_like(arr)
    small = arr <= _K0_SERIES_MAX
    if np.any(small):
        out[small] = _k0_series(arr[small])
    big = ~small
    if np.any(big):
        out[big] = _k0_cf2(arr[big])
    return float(out) if scalar else out


def _cisi_series(x):
    # x > 0, small: Si = sum (-1)^n x^(2n+1)/((2n+1)(2n+1)!),
    # Ci = gamma + ln x + sum (-1)^n x^(2n)/(2n (2n)!)
    si = x.copy()
    cs = np.zeros_like(x)
    fact = x.copy()  # x^m / m! with sign folded in
    for m in range(2, 60):
        fact = fact * x / m
        if m % 2 == 0:
            t = fact / m * (1 if (m // 2) % 2 == 0 else -1)
            cs = cs + t
        else:
            t = fact / m * (1 if ((m - 1) // 2) % 2 == 0 else -1)
            si = si + t
        if np.all(np.abs(fact) / m <= _EPS * np.maximum(np.abs(si), 1e-300)):
            break
    return EULER_GAMMA + np.log(x) + cs, si


def _cisi_cf(x):
    # Lentz evaluation of E1(ix); Ci = -Re E1(ix), Si = pi/2 + Im E1(ix).
    b = 1.0 + 1j * x
    c = np.full(x.shape, 1e300, dtype=complex)
    d = 1.0 / b
    h = d.copy()
    for i in range(2, 400):
        a = -float((i - 1) * (i - 1))
        b = b + 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h = h * delta
        if np.all(np.abs(delta - 1.0) <= 1e-16):
            break
    e1 = h * (np.cos(x) - 1j * np.sin(x))
    return -e1.real, 0.5 * np.pi + e1.imag


def _cisi(z):
    ci = np.empty_like(z)
    si = np.empty_like(z)
    small = z <= _CISI_SERIES_MAX
    if np.any(small):
        ci[small], si[small] = _cisi_series(z[small])
    big = ~small
    if np.any(big):
        ci[big], si[big] = _cisi_cf(z[big])
    return ci, si


def sine_integral_si(z):
    """Si(z) = integral of sin(t)/t from 0 to z (odd in z)."""
    arr, scalar = _as_array(z)
    a = np.abs(arr)
    out = np.zeros_like(arr)
    nz = a > 0
    if np.any(nz):
        out[nz] = _cisi(a[nz])[1] * np.sign(arr[nz])
    return float(out) if scalar else out


def cosine_integral_ci(z):
    """Ci(z) = -integral of cos(t)/t from z to infinity, for z > 0."""
    arr, scalar = _as_array(z)
    if np.any(~(arr > 0)):
        raise DomainError("cosine_integral_ci requires z > 0")
    out = _cisi(arr)[0]
    return float(out) if scalar else out


def cosine_integral_ci_principal(z):
    """Principal-branch continuation of Ci to the real line.

    For negative arguments ``Ci(-z) = Ci(z) + i*pi``; returns complex.
    """
    arr, scalar = _as_array(z)
    if np.any(arr == 0):
        raise DomainError("Ci has a logarithmic singularity at 0")
    out = _cisi(np.abs(arr))[0] + np.where(arr < 0, 1j * np.pi, 0.0)
    return complex(out) if scalar else out


def complex_sqrt(z, branch=BranchChoice.PRINCIPAL, reference=1.0):
    """Square root with an explicit branch.

    In principal mode this is ``cmath.sqrt``. In positive-definite-root mode
    the root closest to ``reference`` is returned; pass the previous value
    along a path (or the path's anchor) to get a continuous root.
    """
    z = complex(z)
    r = cmath.sqrt(z)
    if branch is BranchChoice.PRINCIPAL:
        return r
    return r if abs(r - reference) <= abs(-r - reference) else -r


def complex_log(z, branch=BranchChoice.PRINCIPAL, reference=0.0):
    """Logarithm with an explicit branch.

    Principal mode: imaginary part in (-pi, pi]. Positive-definite-root mode:
    the branch whose imaginary part is closest to ``reference.imag``.
    """
    z = complex(z)
    if z == 0:
        raise DomainError("log(0)")
    w = cmath.log(z)
    if w.imag == -math.pi:
        w = complex(w.real, math.pi)
    if branch is BranchChoice.PRINCIPAL:
        return w
    turns = round((complex(reference).imag - w.imag) / (2 * math.pi))
    return w + 2j * math.pi * turns


def track_sqrt(values, anchor=1.0):
    """Continuous square root along a sampled path starting near ``anchor``."""
    out = np.empty(len(values), dtype=complex)
    ref = complex(anchor)
    for i, v in enumerate(values):
        ref = complex_sqrt(v, BranchChoice.POSITIVE_DEFINITE_ROOT, ref)
        out[i] = ref
    return out
