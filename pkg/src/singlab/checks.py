"""Named numerical checks grouped into suites (used by ``singlab verify``)."""

from __future__ import annotations

import dataclasses
import math
import warnings

import numpy as np

from . import hermitian, metric, scattering
from .errors import PreconditionError, SingularityError
from .model import ModelParams
from .quad import DEFAULT_SPEC, QuadratureSpec, integrate_finite

SUITES = ("metric", "susy", "asymptotics", "singular")


@dataclasses.dataclass(frozen=True)
class Check:
    name: str
    target: str
    achieved: float | str
    passed: bool

    def to_dict(self):
        achieved = self.achieved
        if isinstance(achieved, float):
            achieved = float(f"{achieved:.14e}") if math.isfinite(achieved) else str(achieved)
        return {"name": self.name, "target": self.target, "achieved": achieved,
                "pass": bool(self.passed)}


def _below(name, value, tol):
    return Check(name, f"< {tol:g}", float(value), bool(value < tol))


def _rng():
    return np.random.default_rng(20240607)


# ---------------------------------------------------------------------------

def susy_checks(params: ModelParams, grid=None):
    if grid is None:
        grid = np.linspace(0.0, 20.0, 401)
    cat = metric.catalog(params)
    fact, fact_t = 0.0, 0.0
    inter = {w: 0.0 for w in metric.INTERTWININGS}
    for f in cat:
        scale = np.max(np.abs(f(grid)))
        eta = metric.apply_eta(params, f, grid)
        fact = max(fact, np.max(np.abs(metric.apply_L(params, metric.Ldag_op(params, f), grid)
                                       - eta)) / scale)
        # eta~ = L^dag L acts by the same differential expression as eta
        fact_t = max(fact_t, np.max(np.abs(metric.apply_Ldag(params, metric.L_op(params, f), grid)
                                           - eta)) / scale)
        for which, cls in metric.INTERTWININGS.items():
            if f.bc_class == cls:
                inter[which] = max(inter[which],
                                   metric.verify_intertwining(params, f, which, grid).residual)
    out = [_below("eta = L Ldag", fact, 1e-12), _below("etatilde = Ldag L", fact_t, 1e-12)]
    out += [_below(which, r, 1e-12) for which, r in inter.items()]

    worst = 0.0
    for k in (0.3, 1.0, 2.5):
        if k * k + params.d ** 2 == 0:
            continue
        n = math.sqrt(k * k + params.d ** 2)
        psi = metric.psi_k_function(params, k)
        tilde = metric.psi_tilde_k(params, k, grid)
        fwd = metric.apply_Ldag(params, psi, grid) / n
        back = metric.apply_L(params, metric.Ldag_op(params, psi), grid) / (n * n)
        worst = max(worst, np.max(np.abs(fwd - tilde)),
                    np.max(np.abs(back - metric.psi_k(params, k, grid))))
    out.append(_below("Ldag Psi_k = sqrt(k^2+d^2) Psi~_k and back", worst, 1e-13))

    bad = metric.exp_poly([1.0], -1.0, 1.0, metric.D_H, "e^-x outside D_H")
    rep = metric.verify_intertwining(params, bad, "etaH_vs_Hdag_eta", grid)
    out.append(Check("negative control: boundary residual outside D_H", "> 1e-3",
                     float(rep.boundary_residual), bool(rep.boundary_residual > 1e-3)))
    return out


def metric_checks(params: ModelParams, spec: QuadratureSpec = DEFAULT_SPEC):
    rng = _rng()
    ks = rng.uniform(0.05, 10.0, 100)
    xs = rng.uniform(0.0, 20.0, 100)
    b, d = params.b, params.d
    worst = 0.0
    for k, x in zip(ks, xs):
        psi = metric.psi_k_function(params, k)
        lhs = metric.apply_eta(params, psi, x)
        worst = max(worst, abs(lhs - (k * k + d * d) * metric.psi_k(params, k, x)))
        tl = metric.psi_tilde_k_function(params, k)
        lt = metric.apply_Ldag(params, metric.L_op(params, tl), x)
        worst = max(worst, abs(lt - (k * k + d * d) * metric.psi_tilde_k(params, k, x)))
        small = metric.psi_small_k_function(params, k)
        ls = metric.apply_Ldag(params, metric.Lstar_op(params, small), x)
        worst = max(worst, abs(ls - (k * k + params.robin ** 2) * metric.psi_small_k(k, x)))
    out = [_below("eigen-relations (100 random k, x)", worst, 1e-13)]

    g = metric.gaussian_packet(params)
    grid = np.linspace(0.0, 20.0, 401)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", metric.UnboundedInverseWarning)
        rec = metric.rho_apply(params, g, grid, 0.0, spec)
    err = math.sqrt(np.trapezoid(np.abs(rec.values - g(grid)) ** 2, grid))
    out.append(_below("resolution of identity (L2)", err, 1e-6))

    one = metric.rho_apply(params, g, grid, 1.0, spec)
    out.append(_below("rho^1 vs eta (sup)",
                      np.max(np.abs(one.values - metric.apply_eta(params, g, grid))), 1e-6))

    cat = [f for f in metric.catalog(params) if f.bc_class == metric.D_H]
    herm = 0.0
    for f in cat:
        for h in cat:
            x_max = max(f.cutoff, h.cutoff)
            ef, eh = metric.eta_op(params, f), metric.eta_op(params, h)
            a = integrate_finite(lambda x: np.conj(f(x)) * eh(x), 0.0, x_max, spec).value
            c = integrate_finite(lambda x: np.conj(ef(x)) * h(x), 0.0, x_max, spec).value
            herm = max(herm, abs(a - c))
    out.append(_below("<g|eta h> = <eta g|h> on D_H", herm, 1e-8))
    return out


def asymptotics_checks(params: ModelParams, spec: QuadratureSpec = DEFAULT_SPEC,
                       ks=(0.5, 1.0, 2.0)):
    if not params.d < 0:
        raise PreconditionError("the asymptotics suite requires d < 0")
    out = []
    amp0 = math.sqrt(2.0 / math.pi)
    for k in ks:
        lo, hi = hermitian.asymptotic_window(params, k)
        xs = np.linspace(lo, hi, 257)
        phi = hermitian.phi_cap_k_numeric(params, k, xs, spec)
        fit = hermitian.extract_phase_shift(phi, k, (lo, hi))
        ref = scattering.phase_shift(params, k)
        out.append(_below(f"phase shift k={k:g}", hermitian.phase_difference(fit.delta, ref), 1e-3))
        out.append(_below(f"far-field amplitude k={k:g}", abs(fit.amplitude - amp0), 1e-3))

    kk = 0.5 if abs(abs(params.b) - 0.5) > 1e-3 else 0.7
    grid = np.linspace(0.0, 10.0, 41)
    a = hermitian.phi_cap_k_numeric(params, kk, grid, spec)
    s = hermitian.phi_cap_k_spectral(params, kk, grid, spec)
    out.append(_below(f"integral vs spectral route k={kk:g}", np.max(np.abs(a.values - s.values)),
                      1e-5))
    out.extend(unitarity_checks(params))
    return out


def unitarity_checks(params: ModelParams):
    ks = np.linspace(0.01, 20.0, 2000)
    ks = ks[np.abs(ks - abs(params.b)) > 1e-9] if params.d == 0 else ks
    s = scattering.s_matrix(params, ks)
    delta = scattering.phase_shift(params, ks)
    return [
        _below("||S| - 1|", np.max(np.abs(np.abs(s) - 1.0)), 1e-12),
        _below("|S - exp(2i delta)|", np.max(np.abs(s - np.exp(2j * delta))), 1e-12),
        _below("|S^2 - S_BW|", np.max(np.abs(s * s - scattering.s_bw(params, ks))), 1e-12),
    ]


def singular_checks(params: ModelParams, spec: QuadratureSpec = DEFAULT_SPEC):
    if params.d != 0:
        raise PreconditionError("the singular suite requires d = 0")
    b = params.b
    rng = _rng()
    worst = 0.0
    for _ in range(6):
        k = rng.uniform(0.1, 3.0)
        if abs(k - abs(b)) < 0.05:
            k += 0.1
        x = rng.uniform(0.2, 6.0)
        worst = max(worst, abs(hermitian.phi_cap_k_singular(b, k, x)
                               - hermitian.phi_cap_k_singular_quadrature(b, k, x, spec)))
    out = [_below("closed form vs log-kernel quadrature", worst, 1e-5)]
    try:
        hermitian.phi_cap_k_singular(b, abs(b), 1.0)
        raised = "no error"
    except SingularityError:
        raised = "SingularityError"
    out.append(Check("Phi_k undefined at k = |b|", "SingularityError", raised,
                     raised == "SingularityError"))
    growth = hermitian.singular_divergence(b, 1.0)
    steps = np.diff(growth)
    out.append(Check("Im integral grows with truncation radius (50..400)", "strictly increasing",
                     float(steps.min()), bool(np.all(steps > 0))))
    try:
        scattering.sigma(params, abs(b))
        raised = "no error"
    except SingularityError:
        raised = "SingularityError"
    out.append(Check("sigma undefined at k = |b|", "SingularityError", raised,
                     raised == "SingularityError"))
    out.extend(unitarity_checks(params))
    return out


def applicable_suites(params: ModelParams):
    out = ["metric", "susy"]
    if params.d < 0:
        out.append("asymptotics")
    if params.d == 0:
        out.append("singular")
    return out


def run_suite(params: ModelParams, suite: str, spec: QuadratureSpec = DEFAULT_SPEC) -> dict:
    if suite == "all":
        names = applicable_suites(params)
    elif suite in SUITES:
        names = [suite]
    else:
        raise PreconditionError(f"unknown suite {suite!r}")
    checks = []
    for name in names:
        if name == "metric":
            checks += metric_checks(params, spec)
        elif name == "susy":
            checks += susy_checks(params)
        elif name == "asymptotics":
            checks += asymptotics_checks(params, spec)
        else:
            checks += singular_checks(params, spec)
    return {"suite": suite, "checks": [c.to_dict() for c in checks],
            "pass": all(c.passed for c in checks)}
