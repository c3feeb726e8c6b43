"""Command-line front end: ``singlab {scan,verify,resonance,phi,jost}``.

Exit status: 0 success, 1 computation failure (failed check, singularity,
no convergence), 2 usage or precondition error. Data goes to standard
output (or ``--output``); diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import io
import json
import math
import os
import sys
import warnings

import numpy as np

from . import checks, hermitian, scattering
from .errors import (ConvergenceError, NoResonanceError, PreconditionError,
                     SingularityError)
from .model import ModelParams, SpectrumKind, classify_spectrum, jost_function
from .quad import DEFAULT_SPEC
from .svgplot import write_svg

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
# fixed chunk size keeps quadrature meshes independent of the thread count
PHI_CHUNK = 64


class UsageError(Exception):
    pass


def fmt(v) -> str:
    v = float(v)
    return "nan" if not math.isfinite(v) else f"{v:.14e}"


def _json_num(v):
    v = float(v)
    return float(f"{v:.14e}") if math.isfinite(v) else None


def _diag(msg):
    print(msg, file=sys.stderr)


def worker_count() -> int:
    raw = os.environ.get("SINGLAB_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"SINGLAB_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise UsageError("SINGLAB_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def _params(args) -> ModelParams:
    try:
        return ModelParams(args.b, args.d)
    except PreconditionError as exc:
        raise UsageError(str(exc))


def _spec(args):
    if getattr(args, "tol", None) is None:
        return DEFAULT_SPEC
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    return DEFAULT_SPEC.replace(abs_tol=args.tol, rel_tol=args.tol)


def _emit(text: str, args):
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _note_classification(params):
    cls = classify_spectrum(params)
    if cls.kind is SpectrumKind.BOUND_STATE:
        e = cls.bound_energy
        _diag(f"note: d > 0, bound-state class; Jost zero k0 = {cls.jost_zero.real:g}"
              f"{cls.jost_zero.imag:+g}i, energy {e.real:g}{e.imag:+g}i")
    elif cls.kind is SpectrumKind.SPECTRAL_SINGULARITY:
        _diag(f"note: d = 0, spectral singularity at k = {cls.singular_k:g}")


# ---------------------------------------------------------------------------

def cmd_scan(args) -> int:
    params = _params(args)
    if not (0 < args.kmin < args.kmax):
        raise UsageError("need 0 < --kmin < --kmax")
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    _note_classification(params)
    ks = np.linspace(args.kmin, args.kmax, args.n)
    rows = []
    singular = 0
    for k in ks:
        if params.d == 0 and k == abs(params.b):
            rows.append((k, math.nan, math.nan, math.nan, math.nan, math.nan))
            singular += 1
            continue
        s = scattering.s_matrix(params, k)
        sbw = scattering.sigma_bw(params, k * k) if params.d != 0 else math.nan
        rows.append((k, scattering.phase_shift(params, k), s.real, s.imag,
                     scattering.sigma(params, k), sbw))
    if singular:
        _diag(f"warning: {singular} row(s) at the spectral singularity k = {abs(params.b):g} "
              "emitted as nan")
    header = ("k", "delta", "re_s", "im_s", "sigma", "sigma_bw")
    if args.format == "csv":
        text = _csv(header, rows)
    else:
        text = json.dumps({"columns": list(header),
                           "rows": [[_json_num(v) for v in r] for r in rows]},
                          indent=1) + "\n"
    _emit(text, args)
    if args.plot:
        arr = np.array(rows, dtype=float)
        write_svg(args.plot, arr[:, 0], {"sigma": arr[:, 4], "sigma_bw": arr[:, 5]},
                  title=f"cross section, b={params.b:g} d={params.d:g}", xlabel="k")
    return EXIT_OK


def cmd_verify(args) -> int:
    params = _params(args)
    try:
        report = checks.run_suite(params, args.suite, _spec(args))
    except PreconditionError as exc:
        raise UsageError(str(exc))
    _emit(json.dumps(report, indent=1) + "\n", args)
    failed = [c["name"] for c in report["checks"] if not c["pass"]]
    for name in failed:
        _diag(f"FAIL: {name}")
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_resonance(args) -> int:
    params = _params(args)
    if not params.d < 0:
        raise UsageError("resonance requires d < 0")
    k_range = None
    if args.kmin is not None or args.kmax is not None:
        if args.kmin is None or args.kmax is None:
            raise UsageError("give both --kmin and --kmax")
        k_range = (args.kmin, args.kmax)
    try:
        fit = scattering.find_resonance(params, k_range, args.n)
    except PreconditionError as exc:
        raise UsageError(str(exc))
    out = {"e0": _json_num(fit.e0), "gamma": _json_num(fit.gamma),
           "peak_sigma": _json_num(fit.peak_sigma), "fit_residual": _json_num(fit.fit_residual),
           "k_peak": _json_num(fit.k_peak), "e_peak": _json_num(fit.e_peak)}
    _emit(json.dumps(out, indent=1) + "\n", args)
    return EXIT_OK


def _phi_values(params, k, xs, route, spec):
    if route == "singular":
        return hermitian.phi_cap_k_singular(params.b, k, xs)
    fn = hermitian.phi_cap_k_numeric if route == "integral" else hermitian.phi_cap_k_spectral
    chunks = [xs[i:i + PHI_CHUNK] for i in range(0, xs.size, PHI_CHUNK)]
    workers = min(worker_count(), len(chunks))
    if workers <= 1:
        parts = [fn(params, k, c, spec).values for c in chunks]
    else:
        with concurrent.futures.ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda c: fn(params, k, c, spec).values, chunks))
    return np.concatenate(parts)


def cmd_phi(args) -> int:
    params = _params(args)
    if not args.k > 0:
        raise UsageError("--k must be positive")
    if not args.xmax > 0 or args.n < 2:
        raise UsageError("need --xmax > 0 and --n >= 2")
    if args.route == "singular" and params.d != 0:
        raise UsageError("route singular requires d = 0")
    if args.route == "integral" and not params.d < 0:
        raise UsageError("route integral requires d < 0")
    if args.route == "singular" and args.k == abs(params.b):
        _diag("error: Phi_k undefined at spectral singularity k = |b|")
        return EXIT_FAIL
    if args.route == "spectral" and abs(args.k - abs(params.b)) < 1e-9 * (1 + args.k):
        raise UsageError("route spectral requires k != |b|")
    xs = np.linspace(0.0, args.xmax, args.n)
    vals = _phi_values(params, args.k, xs, args.route, _spec(args))
    _emit(_csv(("x", "re_phi", "im_phi"), zip(xs, vals.real, vals.imag)), args)
    if args.plot:
        write_svg(args.plot, xs, {"Re Phi": vals.real, "Im Phi": vals.imag},
                  title=f"Phi_k, b={params.b:g} d={params.d:g} k={args.k:g} ({args.route})")
    return EXIT_OK


def cmd_jost(args) -> int:
    params = _params(args)
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    re_lo, re_hi = args.re_range
    im_lo, im_hi = args.im_range
    if not (re_lo < re_hi and im_lo < im_hi):
        raise UsageError("ranges must be increasing")
    rows = []
    for ki in np.linspace(im_lo, im_hi, args.n):
        for kr in np.linspace(re_lo, re_hi, args.n):
            w = jost_function(params, complex(kr, ki))
            rows.append((kr, ki, w.real, w.imag, abs(w)))
    _emit(_csv(("re_k", "im_k", "re_w", "im_w", "abs_w"), rows), args)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="singlab",
                                description="Scattering numerics for the complex-Robin "
                                            "half-line Hamiltonian H(b, d).")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, tol=False):
        sp.add_argument("--b", type=float, required=True)
        sp.add_argument("--d", type=float, required=True)
        sp.add_argument("--output", "-o", default=None, help="write data here instead of stdout")
        if tol:
            sp.add_argument("--tol", type=float, default=None,
                            help="absolute and relative quadrature tolerance")

    sp = sub.add_parser("scan", help="delta, S, sigma over a k grid")
    common(sp)
    sp.add_argument("--kmin", type=float, default=0.1)
    sp.add_argument("--kmax", type=float, default=2.0)
    sp.add_argument("--n", type=int, default=256)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--plot", default=None, help="SVG path")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("verify", help="run a check suite, JSON report")
    common(sp, tol=True)
    sp.add_argument("--suite", choices=("all",) + checks.SUITES, default="all")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("resonance", help="fit the resonance, JSON")
    common(sp)
    sp.add_argument("--kmin", type=float, default=None)
    sp.add_argument("--kmax", type=float, default=None)
    sp.add_argument("--n", type=int, default=10000)
    sp.set_defaults(func=cmd_resonance)

    sp = sub.add_parser("phi", help="sample Phi_k(x), CSV")
    common(sp, tol=True)
    sp.add_argument("--k", type=float, required=True)
    sp.add_argument("--xmax", type=float, default=20.0)
    sp.add_argument("--n", type=int, default=401)
    sp.add_argument("--route", choices=("integral", "spectral", "singular"), default="integral")
    sp.add_argument("--plot", default=None, help="SVG path")
    sp.set_defaults(func=cmd_phi)

    sp = sub.add_parser("jost", help="W(k) over a complex-k rectangle, CSV")
    common(sp)
    sp.add_argument("--re-range", type=float, nargs=2, default=(-3.0, 3.0), metavar=("LO", "HI"))
    sp.add_argument("--im-range", type=float, nargs=2, default=(-2.0, 2.0), metavar=("LO", "HI"))
    sp.add_argument("--n", type=int, default=41)
    sp.set_defaults(func=cmd_jost)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except UsageError as exc:
        _diag(f"usage error: {exc}")
        return EXIT_USAGE
    except PreconditionError as exc:
        _diag(f"precondition error: {exc}")
        return EXIT_USAGE
    except SingularityError as exc:
        _diag(f"error: {exc}")
        return EXIT_FAIL
    except (ConvergenceError, NoResonanceError) as exc:
        _diag(f"error: {exc}")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
