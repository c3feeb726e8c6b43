"""The metric operator eta = -d^2/dx^2 - 2ib d/dx + d^2 + b^2, its SUSY
factorization eta = L L^dagger, the partner eta~ = L^dagger L, and powers of
eta by spectral integration over its eigenbasis Psi_k."""

from __future__ import annotations

import dataclasses
import math
import warnings
from typing import Callable

import numpy as np

from .errors import PreconditionError, SingularityError
from .grid import GridFunction, grid_integral
from .model import SQRT_2_OVER_PI, ModelParams
from .quad import DEFAULT_SPEC, QuadratureSpec, integrate_finite

D_H = "D_H"
D_H_DAGGER = "D_H_dagger"
DIRICHLET = "dirichlet"
NO_BC = "none"


class UnboundedInverseWarning(RuntimeWarning):
    """Negative power of eta requested at d = 0, where eta^-1 is unbounded."""


# ---------------------------------------------------------------------------
# test functions with exact derivatives

@dataclasses.dataclass(frozen=True)
class AnalyticTestFunction:
    """exp(carrier x) times a finite sum of terms P(x) exp(Q(x)) with complex
    polynomials P, Q.

    Polynomial coefficients are stored highest degree first (``np.polyval``
    order). Closed under differentiation, so first-order operators map test
    functions to test functions. Keeping a common oscillating factor in
    ``carrier`` rounds its phase the same way closed forms do.
    """

    terms: tuple
    decay: float
    bc_class: str = NO_BC
    name: str = ""
    carrier: complex = 0j

    def __call__(self, x, n: int = 0):
        f = self
        for _ in range(n):
            f = f.derivative()
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for p, q in f.terms:
            out = out + np.polyval(p, x) * np.exp(np.polyval(q, x))
        if f.carrier:
            out = out * np.exp(f.carrier * x)
        return out

    @property
    def cutoff(self) -> float:
        """Abscissa beyond which the function is negligible (< ~1e-17)."""
        return 45.0 / self.decay

    def derivative(self) -> "AnalyticTestFunction":
        c = self.carrier
        terms = tuple((np.polyadd(np.polyadd(np.polyder(p), np.polymul(np.polyder(q), p)),
                                  c * np.asarray(p, dtype=complex)), q)
                      for p, q in self.terms)
        return dataclasses.replace(self, terms=terms, bc_class=NO_BC,
                                   name=f"({self.name})'")

    def combine(self, coeffs, name="") -> "AnalyticTestFunction":
        """Return sum_n coeffs[n] * f^(n) as a new test function."""
        terms = []
        g = self
        for n in range(len(coeffs)):
            if coeffs[n] != 0:
                terms.extend((np.asarray(p, dtype=complex) * coeffs[n], q)
                             for p, q in g.terms)
            g = g.derivative()
        return AnalyticTestFunction(tuple(terms), self.decay, NO_BC, name, self.carrier)

    def boundary_defect(self, params: ModelParams, bc_class: str) -> complex:
        """Residual of the boundary condition of ``bc_class`` at x = 0."""
        f0, f1 = complex(self(0.0)), complex(self(0.0, 1))
        if bc_class == D_H:
            return f1 + params.robin * f0
        if bc_class == D_H_DAGGER:
            return f1 + params.robin.conjugate() * f0
        if bc_class == DIRICHLET:
            return f0
        return 0j


def _exp_term(coef, rate):
    """coef * exp(rate * x)."""
    return (np.array([coef], dtype=complex), np.array([rate, 0.0], dtype=complex))


def exp_poly(poly, rate, decay, bc_class=NO_BC, name=""):
    return AnalyticTestFunction(((np.asarray(poly, dtype=complex),
                                  np.array([rate, 0.0], dtype=complex)),),
                                decay, bc_class, name)


def catalog(params: ModelParams, alphas=(0.5, 1.0, 2.0)):
    """Exponential-polynomial test functions for each boundary class."""
    w = params.robin
    out = []
    for a in alphas:
        out.append(exp_poly([a - w, 1.0], -a, a, D_H, f"(1+(a-w)x)e^-ax a={a}"))
        out.append(exp_poly([a - w.conjugate(), 1.0], -a, a, D_H_DAGGER,
                            f"(1+(a-w*)x)e^-ax a={a}"))
        out.append(exp_poly([1.0, 0.0], -a, a, DIRICHLET, f"x e^-ax a={a}"))
        out.append(exp_poly([1.0], -a, a, NO_BC, f"e^-ax a={a}"))
    return out


def gaussian_packet(params: ModelParams, x0=8.0, width=1.0, k0=0.0,
                    bc_class=D_H) -> AnalyticTestFunction:
    """exp(-(x-x0)^2/(2 width^2) + i k0 x) plus a tiny x e^-x correction that
    enforces the boundary condition of ``bc_class`` exactly."""
    s2 = 2.0 * width * width
    gauss = (np.array([1.0], dtype=complex),
             np.array([-1.0 / s2, 2.0 * x0 / s2 + 1j * k0, -x0 * x0 / s2], dtype=complex))
    g = AnalyticTestFunction((gauss,), 1.0, NO_BC)
    g0, g1 = complex(g(0.0)), complex(g(0.0, 1))
    # h = x e^-x has h(0) = 0, h'(0) = 1
    if bc_class == D_H:
        c = -(g1 + params.robin * g0)
    elif bc_class == D_H_DAGGER:
        c = -(g1 + params.robin.conjugate() * g0)
    elif bc_class == DIRICHLET:
        raise PreconditionError("use a Dirichlet-class correction explicitly")
    else:
        c = 0.0
    corr = (np.array([c, 0.0], dtype=complex), np.array([-1.0, 0.0], dtype=complex))
    # the correction decays like e^-x but its size is ~exp(-x0^2/2w^2)
    decay = 45.0 / (x0 + 9.0 * width)
    return AnalyticTestFunction((gauss, corr), decay, bc_class,
                                f"gauss x0={x0} w={width} k0={k0}")


# ---------------------------------------------------------------------------
# differential operators

def eta_op(params: ModelParams, f: AnalyticTestFunction) -> AnalyticTestFunction:
    b, d = params.b, params.d
    return f.combine((d * d + b * b, -2j * b, -1.0), "eta f")


def L_op(params, f):
    return f.combine((complex(params.d, -params.b), -1.0), "L f")


def Ldag_op(params, f):
    return f.combine((params.robin, 1.0), "Ldag f")


def Lstar_op(params, f):
    return f.combine((params.robin, -1.0), "L* f")


def H_op(params, f):
    return f.combine((0.0, 0.0, -1.0), "H f")


def apply_eta(params: ModelParams, f: AnalyticTestFunction, x):
    """-f'' - 2ib f' + (d^2 + b^2) f evaluated at x."""
    b, d = params.b, params.d
    return -f(x, 2) - 2j * b * f(x, 1) + (d * d + b * b) * f(x)


def apply_L(params: ModelParams, f: AnalyticTestFunction, x):
    return -f(x, 1) + complex(params.d, -params.b) * f(x)


def apply_Ldag(params: ModelParams, f: AnalyticTestFunction, x):
    return f(x, 1) + params.robin * f(x)


def apply_Lstar(params: ModelParams, f: AnalyticTestFunction, x):
    return -f(x, 1) + params.robin * f(x)


# ---------------------------------------------------------------------------
# eigenfunctions

def psi_k(params: ModelParams, k, x):
    """Eigenfunction of eta with eigenvalue k^2 + d^2 (broadcasts k and x)."""
    k = np.asarray(k, dtype=float)
    x = np.asarray(x, dtype=float)
    d = params.d
    n2 = k * k + d * d
    if np.any(n2 == 0):
        raise SingularityError("Psi_k has zero norm at k = d = 0")
    return (SQRT_2_OVER_PI / np.sqrt(n2) * np.exp(-1j * params.b * x)
            * (d * np.sin(k * x) - k * np.cos(k * x)))


def psi_tilde_k(params: ModelParams, k, x):
    """Eigenfunction of eta~ = L^dagger L; Dirichlet at the origin."""
    k = np.asarray(k, dtype=float)
    x = np.asarray(x, dtype=float)
    return SQRT_2_OVER_PI * np.exp(-1j * params.b * x) * np.sin(k * x)


def psi_small_k(k, x):
    """sqrt(2/pi) sin(kx), eigenfunction of L^dagger L* = -d^2/dx^2 + (d+ib)^2."""
    return SQRT_2_OVER_PI * np.sin(k * np.asarray(x, dtype=float))


def _trig_function(params, cs, cc, rate, name, bc_class=NO_BC):
    """e^{-ibx} (cs sin kx + cc cos kx) as a test function; ``rate`` = k."""
    b = params.b
    # sin = (e^{ikx} - e^{-ikx})/2i, cos = (e^{ikx} + e^{-ikx})/2
    plus = cs / 2j + cc / 2
    minus = -cs / 2j + cc / 2
    terms = (_exp_term(plus, 1j * rate), _exp_term(minus, -1j * rate))
    return AnalyticTestFunction(terms, 1e-3, bc_class, name, -1j * b)


def psi_k_function(params: ModelParams, k: float) -> AnalyticTestFunction:
    c = SQRT_2_OVER_PI / math.sqrt(k * k + params.d ** 2)
    return _trig_function(params, c * params.d, -c * k, k, f"Psi_{k}", D_H)


def psi_tilde_k_function(params: ModelParams, k: float) -> AnalyticTestFunction:
    return _trig_function(params, SQRT_2_OVER_PI, 0.0, k, f"Psi~_{k}", DIRICHLET)


def psi_small_k_function(params: ModelParams, k: float) -> AnalyticTestFunction:
    terms = (_exp_term(SQRT_2_OVER_PI / 2j, 1j * k), _exp_term(-SQRT_2_OVER_PI / 2j, -1j * k))
    return AnalyticTestFunction(terms, 1e-3, DIRICHLET, f"psi_{k}")


# ---------------------------------------------------------------------------
# intertwining checks

INTERTWININGS = {
    "etaH_vs_Hdag_eta": D_H,
    "Ldag_eta_vs_etatilde_Ldag": D_H,
    "eta_L_vs_L_etatilde": DIRICHLET,
}


@dataclasses.dataclass(frozen=True)
class IntertwiningReport:
    which: str
    residual: float
    interior_residual: float
    boundary_residual: float
    lhs_sup: float
    rhs_sup: float


def _sides(params, f, which):
    if which == "etaH_vs_Hdag_eta":
        return eta_op(params, H_op(params, f)), H_op(params, eta_op(params, f))
    if which == "Ldag_eta_vs_etatilde_Ldag":
        # eta~ has the same differential expression as eta; composed as L^dag L
        lhs = Ldag_op(params, eta_op(params, f))
        rhs = Ldag_op(params, L_op(params, Ldag_op(params, f)))
        return lhs, rhs
    if which == "eta_L_vs_L_etatilde":
        lhs = eta_op(params, L_op(params, f))
        rhs = L_op(params, Ldag_op(params, L_op(params, f)))
        return lhs, rhs
    raise ValueError(f"unknown intertwining relation {which!r}")


def verify_intertwining(params: ModelParams, f: AnalyticTestFunction, which: str,
                        grid=None, enforce_domain: bool = True) -> IntertwiningReport:
    """Sup-norm residual of an intertwining relation, relative to sup |f|.

    The interior residual compares both sides as differential expressions on
    ``grid``; the boundary residual is the defect of the boundary condition
    the relation's domain requires of ``f``.
    """
    need = INTERTWININGS.get(which)
    if need is None:
        raise ValueError(f"unknown intertwining relation {which!r}")
    if enforce_domain and f.bc_class != need:
        raise PreconditionError(f"{which} requires a function of class {need}, "
                                f"got {f.bc_class}")
    if grid is None:
        grid = np.linspace(0.0, 20.0, 401)
    lhs, rhs = _sides(params, f, which)
    lv, rv = lhs(grid), rhs(grid)
    scale = float(np.max(np.abs(f(grid))))
    interior = float(np.max(np.abs(lv - rv))) / scale
    boundary = abs(f.boundary_defect(params, need)) / scale
    return IntertwiningReport(which, max(interior, boundary), interior, boundary,
                              float(np.max(np.abs(lv))), float(np.max(np.abs(rv))))


# ---------------------------------------------------------------------------
# spectral powers of eta

def packet_coefficients(params: ModelParams, g, k, x_max: float | None = None,
                        spec: QuadratureSpec = DEFAULT_SPEC):
    """<Psi_k | g> for an array of k.

    ``g`` is either a vectorized callable, integrated adaptively over
    [0, x_max], or a :class:`GridFunction`, integrated with its grid weights.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if isinstance(g, GridFunction):
        return grid_integral(g, np.conj(psi_k(params, k[:, None], g.grid[None, :]))
                             * g.values[None, :])

    def integrand(x):
        return np.conj(psi_k(params, k[:, None], x[None, :])) * g(x)[None, :]

    return integrate_finite(integrand, 0.0, x_max, spec).value


def zero_mode(params: ModelParams, x):
    """Normalized kernel element sqrt(2d) e^{-(d+ib)x} of eta (d > 0 only).

    It obeys the D_H boundary condition and is orthogonal to every Psi_k.
    """
    if not params.d > 0:
        raise PreconditionError("the zero mode is normalizable only for d > 0")
    return math.sqrt(2.0 * params.d) * np.exp(-params.robin * np.asarray(x, dtype=float))


def zero_mode_coefficient(params: ModelParams, g, x_max=None, spec=DEFAULT_SPEC) -> complex:
    if isinstance(g, GridFunction):
        return complex(grid_integral(g, np.conj(zero_mode(params, g.grid)) * g.values))
    return complex(integrate_finite(lambda x: np.conj(zero_mode(params, x)) * g(x),
                                    0.0, x_max, spec).value)


def spectral_cutoff(params: ModelParams, g: Callable, x_max: float, power: float,
                    threshold: float, step: float = 0.25, spec=DEFAULT_SPEC) -> float:
    """First K beyond the spectral peak where (k^2+d^2)^power |<Psi_k|g>|
    drops below threshold.

    The scan stops at the first crossing: further out the coefficients sit
    at the rounding floor, which a positive power would amplify.
    """
    ks = np.arange(1, 801) * step
    if isinstance(g, GridFunction):
        # beyond the sampling resolution the coefficients are aliases
        ks = ks[ks <= 0.5 * math.pi / float(np.max(np.diff(g.grid)))]
    c = np.abs(packet_coefficients(params, g, ks, x_max,
                                   spec.replace(rel_tol=1e-13, abs_tol=1e-16)))
    weighted = (ks * ks + params.d ** 2) ** power * c
    peak = int(np.argmax(weighted))
    below = np.nonzero(weighted[peak:] < threshold)[0]
    if below.size == 0:
        raise PreconditionError(
            f"packet coefficients do not decay within k <= {ks[-1]:.4g}")
    return float(ks[peak + below[0]] + 4 * step)


def rho_apply(params: ModelParams, g: Callable, grid, power: float,
              spec: QuadratureSpec = DEFAULT_SPEC, x_max: float | None = None,
              k_max: float | None = None) -> GridFunction:
    """eta^power g = int dk (k^2+d^2)^power Psi_k <Psi_k|g>, sampled on grid.

    ``g`` is a vectorized callable (an :class:`AnalyticTestFunction` works)
    whose numerical support is bounded by ``x_max``, or a
    :class:`GridFunction` (see :func:`packet_coefficients`). Both integrals
    are adaptive; the k-integral is truncated where the weighted
    coefficients drop below ``spec.abs_tol * 1e-2``.

    For d > 0 the normalizable zero mode of :func:`zero_mode` completes the
    basis; it contributes only at power 0, and negative powers do not exist.
    """
    if power < 0 and params.d == 0:
        warnings.warn("eta^-1 is unbounded at d = 0", UnboundedInverseWarning,
                      stacklevel=2)
    if power < 0 and params.d > 0:
        raise PreconditionError("eta has a zero eigenvalue for d > 0; negative powers "
                                "are undefined")
    if x_max is None and not isinstance(g, GridFunction):
        x_max = getattr(g, "cutoff", None)
        if x_max is None:
            raise ValueError("x_max is required for plain callables")
    grid = np.asarray(grid, dtype=float)
    if k_max is None:
        k_max = spectral_cutoff(params, g, x_max, power, spec.abs_tol * 1e-2, spec=spec)
    inner = spec.replace(rel_tol=min(spec.rel_tol, 1e-11), abs_tol=spec.abs_tol * 1e-2)

    def integrand(k):
        c = packet_coefficients(params, g, k, x_max, inner)
        weight = (k * k + params.d ** 2) ** power
        return psi_k(params, k[None, :], grid[:, None]) * (weight * c)[None, :]

    res = integrate_finite(integrand, 0.0, k_max, spec)
    value = res.value
    if params.d > 0 and power == 0:
        value = value + zero_mode(params, grid) * zero_mode_coefficient(params, g, x_max, inner)
    return GridFunction(grid, value,
                        {"params": params, "power": power, "k_max": k_max,
                         "route": "spectral", "error": res.error})
