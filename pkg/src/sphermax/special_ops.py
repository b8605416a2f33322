"""One-dimensional averaging operators that dominate the maximal function, and their
power-weight L^p boundedness classification.

    D f(x)   = sup_{0<=a<x<b} (b^2-a^2)^-1 int_a^b z|f|
    L f(x)   = sup_{t<x/2} (2t)^-1 int_{x-t}^{x+t} |f|
    H_eta f  = x^-eta int_0^x z^(eta-1) f
    R f(x)   = sup_{t>2x} (2x)^-1 int_{t-x}^{t+x} |f|
    N_eta f  = sup_{t>x} t^-eta int_0^t z^(eta-1) |f|
    T_eta f  = sup_{t>2x} int_{t/2}^t z^(eta-1) |f| / (t-z+x)^eta
    dual Hardy: int_x^inf |f(z)| / z dz

Suprema are grid maxima (64 log-spaced points, two refinement rounds) and
therefore lower bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError
from .profile import Profile

__all__ = ["OpKind", "OpSpec", "Boundedness", "eval_special", "is_bounded_on", "default_theta"]

N_BASE = 64
N_REFINE = 16
ROUNDS = 2


class OpKind(str, Enum):
    D = "D"
    L = "L"
    H = "H"
    R = "R"
    N = "N"
    T = "T"
    DUAL_HARDY = "DualHardy"


class Boundedness(str, Enum):
    YES = "Yes"
    NO = "No"
    SUFFICIENT_ONLY = "SufficientOnly"


@dataclass(frozen=True)
class OpSpec:
    kind: OpKind
    eta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", OpKind(self.kind))
        if self.kind in (OpKind.H, OpKind.N, OpKind.T):
            if self.eta is None or not math.isfinite(self.eta):
                raise DomainError(f"operator {self.kind.value} needs a finite eta")
            if self.kind is OpKind.N and not self.eta > 0:
                raise DomainError("N needs eta > 0")


def default_theta(nu: float) -> float:
    """theta > 0 with 1/(1+theta) at the midpoint of (max(0, nu), nu + 1/2), capped at 3/4."""
    r = 0.5 * (max(0.0, nu) + nu + 0.5)
    r = min(r, 0.75)
    if not 0 < r < min(1.0, nu + 0.5):
        raise DomainError(f"no admissible theta for alpha+beta = {nu}")
    return 1.0 / r - 1.0


# ---------------------------------------------------------------- evaluation


class _Outward:
    """u -> int between x and u of w |f|, accumulated outward from x.

    Every increment is nonnegative, so int_a^b = I(a) + I(b) for a < x < b
    carries no cancellation even when b - a is tiny.
    """

    def __init__(self, f: Profile, x, weight=None):
        self.f = f
        self.x = float(x)
        self.weight = weight
        self.known = {self.x: 0.0}

    def __call__(self, us):
        us = np.atleast_1d(np.asarray(us, dtype=float))
        for u in sorted(set(float(u) for u in us) - set(self.known), key=lambda u: abs(u - self.x)):
            keys = np.array(sorted(self.known))
            side = keys[keys <= u] if u > self.x else keys[keys >= u]
            base = float(side.max() if u > self.x else side.min())
            lo, hi = min(base, u), max(base, u)
            self.known[u] = self.known[base] + self.f.integral(lo, hi, self.weight)
        return np.array([self.known[float(u)] for u in us])


def _refine_1d(evaluate, params):
    """Grid max of ``evaluate`` over ``params`` (sorted), refined twice around the best point."""
    params = np.asarray(params, dtype=float)
    vals = evaluate(params)
    for _ in range(ROUNDS):
        i = int(np.argmax(vals))
        lo = params[max(i - 1, 0)]
        hi = params[min(i + 1, len(params) - 1)]
        if not lo < hi:
            break
        extra = np.linspace(lo, hi, N_REFINE + 2)[1:-1]
        params = np.concatenate([params, extra])
        vals = np.concatenate([vals, evaluate(extra)])
        order = np.argsort(params)
        params, vals = params[order], vals[order]
    return float(np.max(vals))


def _offsets(x, lo_rel, hi_rel, n=N_BASE):
    return x * np.geomspace(lo_rel, hi_rel, n)


def _with(params, extra, lo, hi):
    """Merge breakpoint-derived candidates inside (lo, hi) into a sorted grid."""
    extra = np.asarray([e for e in extra if lo < e < hi and math.isfinite(e)], dtype=float)
    return np.unique(np.concatenate([params, extra]))


def _support_hi(f: Profile, x):
    hi = f.support()[1]
    return hi if math.isfinite(hi) else max(1e6 * x, 1e6)


def eval_special(spec: OpSpec, f: Profile, x: float, grid=None) -> float:
    """Pointwise value of the operator at x.

    The t grids are built from x, the support and the breakpoints of f; the
    points of an optional ``grid`` (a TGrid) are added as further candidates.
    The (a, b) grid of D ignores ``grid``.
    """
    if not x > 0:
        raise DomainError("x must be positive")
    k = spec.kind
    more = [] if grid is None else list(grid.points())
    if k is OpKind.H:
        eta = spec.eta
        return f.integral(0.0, x, lambda z: z ** (eta - 1), absolute=False) / x ** eta
    if k is OpKind.DUAL_HARDY:
        return f.integral(x, math.inf, lambda z: 1.0 / z)
    if k is OpKind.L:
        G = _Outward(f, x)
        ts = 0.5 * x * np.geomspace(1e-6, 1 - 1e-9, N_BASE)
        ts = _with(ts, more + [abs(x - c) for c in f.breakpoints()], 0.0, 0.5 * x)
        return _refine_1d(lambda t: (G(x + t) + G(x - t)) / (2 * t), ts)
    if k is OpKind.R:
        top = max(_support_hi(f, x), 4 * x)
        ts = 2 * x + _offsets(x, 1e-9, top / x)
        ts = _with(ts, more + [c + s * x for c in f.breakpoints() for s in (-1, 1)], 2 * x, math.inf)
        return _refine_1d(lambda tt: np.array([f.integral(t - x, t + x) for t in tt]) / (2 * x), ts)
    if k is OpKind.N:
        eta = spec.eta
        W = _Outward(f, x, lambda z: z ** (eta - 1))
        below = f.integral(0.0, x, lambda z: z ** (eta - 1))
        top = max(_support_hi(f, x), 2 * x)
        ts = x + _offsets(x, 1e-9, top / x)
        ts = _with(ts, more + f.breakpoints(), x, math.inf)
        return _refine_1d(lambda t: (below + W(t)) / t ** eta, ts)
    if k is OpKind.T:
        eta = spec.eta
        top = max(_support_hi(f, x), 4 * x)
        ts = 2 * x + _offsets(x, 1e-9, 2 * top / x)
        ts = _with(ts, more + [m * c for c in f.breakpoints() for m in (1, 2)], 2 * x, math.inf)

        def ev(tt):
            return np.array([f.integral(0.5 * t, t, lambda z, t=t: z ** (eta - 1) / (t - z + x) ** eta)
                             for t in tt])
        return _refine_1d(ev, ts)
    if k is OpKind.D:
        return _eval_d(f, x)
    raise DomainError(f"unknown operator {k}")


def _eval_d(f: Profile, x):
    C = _Outward(f, x, lambda z: z)
    top = max(_support_hi(f, x), 2 * x)
    a_pts = np.concatenate([[0.0], np.sort(x - _offsets(x, 1e-6, 1.0 - 1e-9, N_BASE // 2))])
    b_pts = x + _offsets(x, 1e-6, top / x, N_BASE // 2)
    a_pts = _with(a_pts, f.breakpoints(), 0.0, x)
    b_pts = _with(b_pts, f.breakpoints(), x, math.inf)

    def table(a, b):
        # b^2 - a^2 = (b - x)(b + x) + (x - a)(x + a) without cancellation
        den = ((b - x) * (b + x))[None, :] + ((x - a) * (x + a))[:, None]
        return (C(b)[None, :] + C(a)[:, None]) / den

    for _ in range(ROUNDS + 1):
        vals = table(a_pts, b_pts)
        i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
        best = float(vals[i, j])
        a_new = np.linspace(a_pts[max(i - 1, 0)], a_pts[min(i + 1, len(a_pts) - 1)], N_REFINE)
        b_new = np.linspace(b_pts[max(j - 1, 0)], b_pts[min(j + 1, len(b_pts) - 1)], N_REFINE)
        a_pts = np.unique(np.concatenate([a_pts, a_new[a_new < x]]))
        b_pts = np.unique(np.concatenate([b_pts, b_new[b_new > x]]))
    return best


# ---------------------------------------------------------------- classification


def is_bounded_on(spec: OpSpec, p: float, gamma: float) -> Boundedness:
    """Boundedness on L^p(x^gamma dx), 1 < p < inf, as far as it is known."""
    if not p > 1:
        raise DomainError("p must exceed 1")
    k = spec.kind
    Y, N, S = Boundedness.YES, Boundedness.NO, Boundedness.SUFFICIENT_ONLY
    if k is OpKind.D:
        return Y if -1 < gamma < 2 * p - 1 else N
    if k is OpKind.L:
        return Y
    if k is OpKind.H:
        return Y if gamma < spec.eta * p - 1 else N
    if k is OpKind.R:
        return Y if gamma >= 0 else N
    if k is OpKind.DUAL_HARDY:
        return Y if gamma > -1 else N
    if k is OpKind.N:
        # only the corrected sufficient range is known
        return Y if -1 < gamma < spec.eta * p - 1 else S
    eta = spec.eta
    if eta > 1:
        ok = gamma >= (eta - 1) * p
    elif eta == 1:
        ok = gamma > 0
    elif eta > 0:
        ok = gamma >= eta - 1
    else:
        ok = gamma > -1
    return Y if ok else S
