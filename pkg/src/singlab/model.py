"""The half-line Hamiltonian H = -d^2/dx^2 with the complex Robin condition
phi'(0) + (d + ib) phi(0) = 0: eigenfunctions, Jost function, resolvent and
spectrum classification."""

from __future__ import annotations

import cmath
import dataclasses
import enum
import math

import numpy as np

from .errors import PoleError, PreconditionError, SingularityError

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


class SpectrumKind(enum.Enum):
    REGULAR = "regular"
    SPECTRAL_SINGULARITY = "spectral_singularity"
    BOUND_STATE = "bound_state"


@dataclasses.dataclass(frozen=True)
class ModelParams:
    b: float
    d: float

    def __post_init__(self):
        b, d = float(self.b), float(self.d)
        if not (math.isfinite(b) and math.isfinite(d)):
            raise PreconditionError("b and d must be finite")
        if b == 0.0:
            raise PreconditionError("b = 0 makes H Hermitian; b must be nonzero")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    @property
    def robin(self) -> complex:
        """The boundary coefficient d + ib."""
        return complex(self.d, self.b)

    @property
    def kind(self) -> SpectrumKind:
        if self.d < 0:
            return SpectrumKind.REGULAR
        if self.d == 0:
            return SpectrumKind.SPECTRAL_SINGULARITY
        return SpectrumKind.BOUND_STATE


@dataclasses.dataclass(frozen=True)
class SpectrumClass:
    kind: SpectrumKind
    jost_zero: complex
    singular_k: float | None = None
    singular_energy: float | None = None
    bound_energy: complex | None = None


def normalization(params: ModelParams, k: float) -> complex:
    """Principal root [k^2 + (d+ib)^2]^(1/2) used to normalize phi_k."""
    q = k * k + params.robin ** 2
    if q == 0:
        raise SingularityError(
            f"k^2 + (d+ib)^2 = 0 at k = {k}: normalization is singular "
            "(spectral singularity)")
    return cmath.sqrt(q)


def phi_k(params: ModelParams, k: float, x, deriv: int = 0):
    """Continuum eigenfunction phi_k of H (or its ``deriv``-th derivative)."""
    if not k > 0:
        raise PreconditionError("phi_k requires k > 0")
    x = np.asarray(x, dtype=float)
    c = SQRT_2_OVER_PI / normalization(params, k)
    w = params.robin
    s, co = np.sin(k * x), np.cos(k * x)
    # derivatives of w sin(kx) - k cos(kx) cycle through four forms
    forms = (w * s - k * co, k * (w * co + k * s),
             -k * k * (w * s - k * co), -k ** 3 * (w * co + k * s))
    return c * forms[deriv % 4] * k ** (4 * (deriv // 4))


def jost_function(params: ModelParams, k: complex) -> complex:
    """W(k^2) = ik + d + ib."""
    return 1j * complex(k) + params.robin


def jost_zero(params: ModelParams) -> complex:
    """The unique zero k = -b + id of the Jost function."""
    return complex(-params.b, params.d)


def _upper_root(lam: complex) -> complex:
    k = cmath.sqrt(lam)
    return k if k.imag > 0 else -k


def resolvent_kernel(params: ModelParams, x: float, xi: float, lam: complex) -> complex:
    """Kernel R(x, xi, lambda) = phi(x_<, lambda) e(x_>, k) / W(lambda) of
    (lambda - H)^{-1}.

    ``phi(x, lambda) = cos(kx) - (d+ib) sin(kx)/k`` and ``e(x, k) = exp(ikx)``
    with ``Im k > 0``.
    """
    lam = complex(lam)
    if lam.imag == 0 and lam.real >= 0:
        raise PoleError(f"lambda = {lam} lies on the continuous spectrum [0, inf)")
    k = _upper_root(lam)
    w = jost_function(params, k)
    if abs(w) <= 1e-14 * (1.0 + abs(k)):
        raise PoleError(f"lambda = {lam} is a zero of the Jost function", abs_w=abs(w))
    lo, hi = (x, xi) if x <= xi else (xi, x)
    kl = k * lo
    reg = cmath.cos(kl) - params.robin * (cmath.sin(kl) / k)
    return reg * cmath.exp(1j * k * hi) / w


def classify_spectrum(params: ModelParams) -> SpectrumClass:
    """Classify H(b, d) by the sign of d.

    The Jost zero ``k0 = -b + id`` lies on the physical sheet only for
    ``d > 0``; its energy ``k0^2`` is complex in general.
    """
    k0 = jost_zero(params)
    kind = params.kind
    if kind is SpectrumKind.SPECTRAL_SINGULARITY:
        sk = abs(params.b)
        return SpectrumClass(kind, k0, singular_k=sk, singular_energy=sk * sk)
    if kind is SpectrumKind.BOUND_STATE:
        return SpectrumClass(kind, k0, bound_energy=k0 * k0)
    return SpectrumClass(kind, k0)
