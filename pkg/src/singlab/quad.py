"""Vectorized adaptive Gauss-Kronrod quadrature.

Integrands are called with a 1-D array of abscissae and must return an array
whose last axis matches it; leading axes are integrated componentwise, so one
call can integrate many related functions on shared nodes.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, NamedTuple

import numpy as np

from .errors import ConvergenceError, DivergenceError

# Gauss-Kronrod 21 / Gauss 10, nonnegative half of the symmetric rule.
_XK = np.array([
    0.0,
    0.14887433898163121088, 0.29439286270146019813, 0.43339539412924719080,
    0.56275713466860468334, 0.67940956829902440623, 0.78081772658641689706,
    0.86506336668898451073, 0.93015749135570822600, 0.97390652851717172008,
    0.99565716302580808074,
])
_WK = np.array([
    0.14944555400291690566,
    0.14773910490133849137, 0.14277593857706008080, 0.13470921731147332593,
    0.12349197626206585108, 0.10938715880229764190, 0.093125454583697605535,
    0.075039674810919952767, 0.054755896574351996031, 0.032558162307964727479,
    0.011694638867371874278,
])
_WG_ON_XK = np.array([
    0.0,
    0.29552422471475287017, 0.0, 0.26926671930999635509,
    0.0, 0.21908636251598204400, 0.0,
    0.14945134915058059315, 0.0, 0.066671344308688137594,
    0.0,
])

NODES = np.concatenate([-_XK[:0:-1], _XK])
WEIGHTS_K = np.concatenate([_WK[:0:-1], _WK])
WEIGHTS_G = np.concatenate([_WG_ON_XK[:0:-1], _WG_ON_XK])

_TINY = np.finfo(float).tiny
_EPS = np.finfo(float).eps

EXPONENTIAL = "exponential"
OSCILLATORY = "oscillatory"


@dataclasses.dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    truncation: str = EXPONENTIAL
    singular_points: tuple = ()

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.truncation not in (EXPONENTIAL, OSCILLATORY):
            raise ValueError(f"unknown truncation policy {self.truncation!r}")
        object.__setattr__(self, "singular_points",
                           tuple(sorted(float(s) for s in self.singular_points)))

    def replace(self, **changes) -> "QuadratureSpec":
        return dataclasses.replace(self, **changes)

    def tolerance(self, magnitude: float) -> float:
        return max(self.abs_tol, self.rel_tol * magnitude)


DEFAULT_SPEC = QuadratureSpec()


class QuadResult(NamedTuple):
    value: complex | np.ndarray
    error: float
    n_eval: int


def _norm(v) -> float:
    return float(np.max(np.abs(v))) if np.ndim(v) else float(abs(v))


def _gk21(f, a, b):
    """Apply the rule on intervals [a[i], b[i]]. Returns (K, err, L1) with the
    interval axis last."""
    half = 0.5 * (b - a)
    center = 0.5 * (b + a)
    x = center[:, None] + half[:, None] * NODES[None, :]
    fv = np.asarray(f(x.ravel()))
    fv = fv.reshape(fv.shape[:-1] + x.shape)
    k = (fv * WEIGHTS_K).sum(axis=-1) * half
    g = (fv * WEIGHTS_G).sum(axis=-1) * half
    mean = k / (2.0 * half)
    resasc = (np.abs(fv - mean[..., None]) * WEIGHTS_K).sum(axis=-1) * np.abs(half)
    l1 = (np.abs(fv) * WEIGHTS_K).sum(axis=-1) * np.abs(half)
    diff = np.abs(k - g)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(resasc > 0,
                          resasc * np.minimum(1.0, (200.0 * diff / resasc) ** 1.5),
                          diff)
    scaled = np.maximum(scaled, 50.0 * _EPS * l1)
    if scaled.ndim > 1:
        scaled = scaled.reshape(-1, scaled.shape[-1]).max(axis=0)
        l1 = l1.reshape(-1, l1.shape[-1]).max(axis=0)
    return k, scaled, l1


def _adaptive(f, a, b, abs_tol, rel_tol, max_sub, rel_scale=None):
    """Globally adaptive bisection over an initial set of intervals."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    vals, errs, l1 = _gk21(f, a, b)
    n_eval = a.size * NODES.size
    while True:
        total = vals.sum(axis=-1)
        err = float(errs.sum())
        mag = _norm(total) if rel_scale is None else max(_norm(total), rel_scale)
        tol = max(abs_tol, rel_tol * mag)
        if err <= tol:
            return total, err, n_eval, float(l1.sum())
        width = b - a
        splittable = np.abs(width) > 1e3 * _EPS * np.maximum(np.abs(a), np.abs(b)) + 1e-300
        cand = np.where(splittable, errs, -1.0)
        order = np.argsort(cand)[::-1]
        cum = np.cumsum(cand[order])
        n_split = int(np.searchsorted(cum, 0.5 * (err - tol))) + 1
        n_split = min(n_split, int(np.count_nonzero(cand > 0)))
        room = max_sub - a.size
        n_split = min(n_split, room)
        if n_split <= 0:
            raise ConvergenceError(
                f"quadrature did not converge: error {err:.3g} > tol {tol:.3g} "
                f"with {a.size} subintervals", estimate=total, error=err)
        pick = order[:n_split]
        keep = np.ones(a.size, dtype=bool)
        keep[pick] = False
        mid = 0.5 * (a[pick] + b[pick])
        na = np.concatenate([a[pick], mid])
        nb = np.concatenate([mid, b[pick]])
        v2, e2, l2 = _gk21(f, na, nb)
        n_eval += na.size * NODES.size
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        vals = np.concatenate([vals[..., keep], v2], axis=-1)
        errs = np.concatenate([errs[keep], e2])
        l1 = np.concatenate([l1[keep], l2])


def graded_breakpoints(a: float, b: float, singular_points, ratio=0.15, levels=12):
    """Breakpoints for [a, b] including the singular points plus a geometric
    mesh accumulating at each of them."""
    pts = {a, b}
    sing = [s for s in singular_points if a <= s <= b]
    pts.update(sing)
    cuts = sorted(pts)
    out = set(cuts)
    for s in sing:
        i = cuts.index(s)
        for nb in (cuts[i - 1] if i > 0 else None, cuts[i + 1] if i + 1 < len(cuts) else None):
            if nb is None:
                continue
            w = 0.5 * (nb - s)
            for j in range(levels):
                out.add(s + w * ratio ** j)
    return np.array(sorted(out))


def integrate_finite(f: Callable, a: float, b: float,
                     spec: QuadratureSpec = DEFAULT_SPEC, *,
                     breakpoints=()) -> QuadResult:
    """Integrate ``f`` over ``[a, b]``.

    Declared ``spec.singular_points`` become subinterval endpoints (the rule
    is open, so ``f`` is never evaluated there) with geometric grading
    toward each of them. ``breakpoints`` seed the initial mesh without
    grading, e.g. one cut per oscillation. Raises :class:`ConvergenceError` carrying the best
    estimate when ``spec.max_subdivisions`` is exhausted.
    """
    if not a < b:
        raise ValueError("integrate_finite requires a < b")
    pts = graded_breakpoints(a, b, spec.singular_points)
    if len(breakpoints):
        extra = np.asarray(breakpoints, dtype=float)
        pts = np.union1d(pts, extra[(extra > a) & (extra < b)])
    if pts.size - 1 > spec.max_subdivisions:
        raise ValueError("max_subdivisions smaller than the initial mesh")
    val, err, n, _ = _adaptive(f, pts[:-1], pts[1:], spec.abs_tol, spec.rel_tol,
                               spec.max_subdivisions)
    return QuadResult(val, err, n)


def wynn_epsilon(seq):
    """Wynn's epsilon extrapolation of a sequence of partial sums (elementwise
    for array-valued sums). Returns (limit estimate, error estimate)."""
    real = not any(np.iscomplexobj(v) for v in seq)
    best, err = _wynn([np.asarray(v, dtype=complex) for v in seq])
    return (best.real if real else best), err


def _wynn(s):
    n = len(s)
    if n < 3:
        return s[-1], _norm(s[-1] - s[-2]) if n > 1 else math.inf
    prev = [np.zeros_like(s[0])] * (n + 1)
    cur = list(s)
    best = s[-1]
    best_err = _norm(s[-1] - s[-2])
    col = 0
    while len(cur) > 1:
        nxt = []
        for i in range(len(cur) - 1):
            diff = cur[i + 1] - cur[i]
            with np.errstate(divide="ignore", invalid="ignore"):
                # a vanishing difference makes the column degenerate; NaN
                # propagates so those entries never become the estimate
                inv = np.where(np.abs(diff) > _TINY, 1.0 / np.where(diff == 0, 1, diff), np.nan)
            nxt.append(prev[i + 1] + inv)
        prev, cur = cur, nxt
        col += 1
        if col % 2 == 0 and len(cur) >= 2:
            e = _norm(cur[-1] - cur[-2])
            if np.all(np.isfinite(cur[-1])) and np.all(np.isfinite(cur[-2])) and e < best_err:
                best, best_err = cur[-1], e
    return best, best_err


def _panel_batches(start, length, first=16, largest=256):
    n = first
    while True:
        edges = start + length * np.arange(n + 1)
        yield edges
        start = edges[-1]
        n = min(2 * n, largest)


def integrate_semi_infinite(f: Callable, a: float,
                            spec: QuadratureSpec = DEFAULT_SPEC, *,
                            omega: float | None = None,
                            panel: float | None = None,
                            max_panels: int = 20000) -> QuadResult:
    """Integrate ``f`` over ``[a, inf)`` by panel summation.

    ``spec.truncation`` selects the tail treatment:

    * exponential: panels are summed until their L1 mass drops below the
      tolerance;
    * oscillatory: panels of one half-period ``pi/omega`` are summed and the
      partial sums are accelerated with Wynn's epsilon algorithm. Without
      ``omega`` the tail is mapped onto a finite interval instead.

    Singular points are resolved in a finite head section.
    """
    head_end = a
    if spec.singular_points:
        head_end = max(a, max(spec.singular_points))
    if omega is not None and omega > 0:
        plen = math.pi / omega
    else:
        plen = panel if panel is not None else 1.0
    head_end += plen
    head = integrate_finite(f, a, head_end, spec)
    total = np.asarray(head.value)
    err = head.error
    n_eval = head.n_eval
    tail_spec = spec.replace(singular_points=())

    if spec.truncation == OSCILLATORY and not (omega and omega > 0):
        def mapped(t):
            y = head_end + t / (1.0 - t)
            return f(y) / (1.0 - t) ** 2
        tail = integrate_finite(mapped, 0.0, 1.0, tail_spec.replace(
            abs_tol=spec.abs_tol / 2, max_subdivisions=max(spec.max_subdivisions, 4000)))
        return QuadResult(total + tail.value, err + tail.error, n_eval + tail.n_eval)

    history = []
    partial = [total.copy()]
    used = 0
    for edges in _panel_batches(head_end, plen):
        tol = spec.tolerance(_norm(total))
        vals, errs, l1 = _batch(f, edges, tol / 8, spec.max_subdivisions)
        n_eval += (edges.size - 1) * NODES.size
        used += edges.size - 1
        err += float(errs.sum())
        if spec.truncation == EXPONENTIAL:
            total = total + vals.sum(axis=-1)
            history.append(float(l1.sum()))
            if history[-1] <= 0.05 * spec.tolerance(_norm(total)):
                return QuadResult(total, err + history[-1], n_eval)
            if len(history) >= 6 and history[-1] >= 0.9 * history[-4]:
                raise DivergenceError("integrand tail is not decaying",
                                      estimate=total, error=math.inf)
        else:
            cs = np.cumsum(vals, axis=-1)
            for j in range(cs.shape[-1]):
                partial.append(total + cs[..., j])
            total = partial[-1]
            if float(l1.max()) <= 0.01 * spec.tolerance(_norm(total)):
                return QuadResult(total, err + float(l1.sum()), n_eval)
            seq = partial[-min(len(partial), 40):]
            est, e_est = wynn_epsilon(seq)
            if e_est <= 0.1 * spec.tolerance(_norm(est)) and len(partial) > 12:
                return QuadResult(est, err + e_est, n_eval)
        if used >= max_panels:
            raise DivergenceError("semi-infinite quadrature exhausted its panels",
                                  estimate=total, error=math.inf)


def _batch(f, edges, tol, max_sub):
    """Integrate each panel of ``edges`` separately; per-panel values."""
    a = edges[:-1]
    b = edges[1:]
    vals, errs, l1 = _gk21(f, a, b)
    bad = np.nonzero(errs > tol / a.size)[0]
    for i in bad:
        v, e, _, m = _adaptive(f, [a[i]], [b[i]], tol / a.size, _EPS, max_sub)
        vals[..., i] = v
        errs[i] = e
        l1[i] = m
    return vals, errs, l1
