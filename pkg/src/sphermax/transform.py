"""Generalized spherical means M_t f(x) of radial profiles and their maximal functions.

Three independent evaluation routes:

* ``mean_via_kernel``: z-quadrature of K_t(x, z) f(z) z^(2 alpha+1), split at
  the region boundaries |x-t|, x+t, t-x and at the profile breakpoints.
* ``mean_via_multiplier``: forward modified Hankel transform of f, times the
  radial multiplier m_(alpha+beta)(t s), inverse transform at x.
* ``mean_beta0_direct``: the classical angular average (beta = 0 only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize
from scipy.special import gamma as sgamma
from scipy.special import jv

from .errors import AccuracyError, DomainError
from .kernel import (
    DEFAULT_QUAD,
    Params,
    QuadSpec,
    _gegenbauer_const,
    _kernel_negint,
    classify_region,
    Region,
    has_exact_kernel,
    kernel_exact,
    kernel_quadrature,
)
from .oscillatory import triple_bessel_integral
from .profile import Piece, Profile
from .quadrature import gauss_jacobi_left, gauss_legendre, tanh_sinh

__all__ = [
    "TGrid",
    "mean_via_kernel",
    "mean_via_multiplier",
    "mean_beta0_direct",
    "maximal_op",
    "truncated_maximal",
    "singular_t_values",
]

BAND_COVERAGE_LIMIT = 0.10


def _check_tx(t, x):
    if not (t > 0 and x > 0):
        raise DomainError(f"t and x must be positive, got t={t}, x={x}")


# ---------------------------------------------------------------- kernel route


def _segments(p: Params, t, x):
    segs = [(abs(x - t), x + t)]
    if t > x and not p.minus_beta_natural:
        segs.append((0.0, t - x))
    return segs


def _band_coverage(t, x, lo, hi, band):
    """Fraction of (lo, hi) where (t, x, z) sits in the singular band."""
    covered = 0.0
    for c in (abs(x - t), x + t, t - x):
        if c <= 0:
            continue
        w = band * (t + x + c) * 1.01
        covered += max(0.0, min(hi, c + w) - max(lo, c - w))
    return covered / (hi - lo)


def _kernel_nodes(p: Params, t, x, lo, hi, q: QuadSpec):
    """Vectorised z -> K_t(x, z) on (lo, hi), fed with exact endpoint distances."""
    a = p.alpha
    A, B = abs(x - t), x + t
    if p.minus_beta_natural and a > -0.5 and lo >= A and hi <= B:
        k_neg = int(round(-p.beta))
        c0 = _gegenbauer_const(a)
        gap_lo, gap_hi = lo - A, B - hi

        def k(z, da, db):
            P = (gap_lo + da) * (z + A) * (gap_hi + db) * (B + z)
            if k_neg == 0:
                return c0 * (t * x * z) ** (-2 * a) * P ** (a - 0.5)
            return _kernel_negint(a, k_neg, t, x, z, P)
        return k
    if has_exact_kernel(p):
        return lambda z, da, db: np.asarray(kernel_exact(p, t, x, z), dtype=float)
    if _band_coverage(t, x, lo, hi, q.singular_band) > BAND_COVERAGE_LIMIT:
        raise AccuracyError("singular-band coverage exceeds 10% of the integration range")

    def k(z, da, db):
        return np.array([kernel_quadrature(p, t, x, zi, q) for zi in np.atleast_1d(z)])
    return k


def _band_edges(t, x, lo, hi, band):
    """Widths to cut at each end of (lo, hi) that touches a singular surface."""
    cuts = []
    for end in (lo, hi):
        w = 0.0
        for c in (abs(x - t), x + t, t - x):
            if c > 0 and abs(end - c) <= 1e-12 * (t + x):
                w = 2.0 * band * (t + x + c)
        cuts.append(w)
    return cuts


def _basis(e0):
    """Local expansion near a singular surface and the exact integrals of its terms."""
    if abs(e0) < 1e-6 or abs(e0 - round(e0)) < 1e-6:
        fns = [np.log, lambda d: np.ones_like(d), lambda d: d * np.log(d), lambda d: d]
        ints = [lambda w: w * math.log(w) - w, lambda w: w,
                lambda w: 0.5 * w * w * math.log(w) - 0.25 * w * w, lambda w: 0.5 * w * w]
    else:
        fns = [lambda d: d ** e0, lambda d: np.ones_like(d), lambda d: d ** (e0 + 1), lambda d: d]
        ints = [lambda w: w ** (e0 + 1) / (e0 + 1), lambda w: w,
                lambda w: w ** (e0 + 2) / (e0 + 2), lambda w: 0.5 * w * w]
    return fns, ints


def _fit_integral(d, v, w, e0):
    fns, ints = _basis(e0)
    A = np.column_stack([fn(d) for fn in fns])
    coef = np.linalg.solve(A, v)
    return float(sum(c * I(w) for c, I in zip(coef, ints)))


def _end_correction(g, lo, hi, w, at_lo, e0):
    """Integral over the band of width w at one end of (lo, hi).

    The integrand is fitted near the end as C d^e0 + D + C1 d^(e0+1) + D1 d
    (logarithmic terms when e0 is an integer), e0 the kernel's exponent at the
    singular surface.  Samples at w..8w give the value, samples at 2w..16w the
    error estimate.
    """
    d = w * 2.0 ** np.arange(5)
    if at_lo:
        v = np.asarray(g(lo + d, d, hi - lo - d), dtype=float)
    else:
        v = np.asarray(g(hi - d, hi - lo - d, d), dtype=float)
    first = _fit_integral(d[:4], v[:4], w, e0)
    second = _fit_integral(d[1:], v[1:], w, e0)
    return first, abs(first - second)


def _origin_part(g, m, alpha, pc: Piece):
    """int_0^m g with Gauss-Jacobi for the weight z^(2 alpha + 1) (times z^p for power pieces)."""
    expo = 2 * alpha + 1
    if pc.kind == "power" and pc.params["shift"] == 0.0:
        expo += pc.params["p"]
    vals = []
    for n in (8, 12):
        y, w = gauss_jacobi_left(n, float(expo))
        z = m * y
        smooth = g(z, z, m - z) / z ** expo
        vals.append(m ** (expo + 1) * float(np.dot(w, smooth)))
    return vals[1], abs(vals[1] - vals[0])


def mean_via_kernel(p: Params, f: Profile, t: float, x: float,
                    q: QuadSpec = DEFAULT_QUAD, return_error: bool = False):
    """M_t f(x) = int K_t(x, z) f(z) z^(2 alpha + 1) dz."""
    _check_tx(t, x)
    slow = not has_exact_kernel(p)
    total, err = 0.0, 0.0
    for seg_lo, seg_hi in _segments(p, t, x):
        for pc in f.pieces:
            lo, hi = max(seg_lo, pc.a), min(seg_hi, pc.b)
            if not lo < hi:
                continue
            kern = _kernel_nodes(p, t, x, lo, hi, q)

            def g(z, da, db, pc=pc, lo=lo, hi=hi, kern=kern):
                with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                    v = kern(z, da, db) * pc.local(z, lo, da) * z ** (2 * p.alpha + 1)
                # closed forms overflow in intermediate powers at nodes within
                # ~1e-100 of the origin; the weighted integrand is integrable there
                tiny = np.asarray(z) < 1e-100 * hi
                return np.where(tiny & ~np.isfinite(v), 0.0, v)

            if slow and lo == 0.0 and seg_hi == t - x:
                # near the origin of F the kernel is analytic in z^2: Gauss-Jacobi
                m = min(hi, 0.5 * (t - x))
                val, est = _origin_part(g, m, p.alpha, pc)
                total += val
                err += est
                lo = m
                if not lo < hi:
                    continue

                def g(z, da, db, g0=g, m=m):
                    return g0(z, da + m, db)
            if slow:
                wl, wr = _band_edges(t, x, lo, hi, q.singular_band)

                def g_cut(z, da, db, g=g, wl=wl, wr=wr):
                    return g(z, da + wl, db + wr)
                val, est = tanh_sinh(g_cut, lo + wl, hi - wr, tol=0.1 * q.abs_tol,
                                     max_level=6, distances=True)
                for w, at_lo in ((wl, True), (wr, False)):
                    if w > 0:
                        cv, ce = _end_correction(g, lo, hi, w, at_lo, p.nu - 0.5)
                        val += cv
                        est += ce
            else:
                val, est = tanh_sinh(g, lo, hi, tol=0.1 * q.abs_tol,
                                     max_level=10, distances=True)
            total += val
            err += est
    if not np.isfinite(total) or err > q.abs_tol * (1.0 + abs(total)):
        raise AccuracyError("kernel-route quadrature did not reach the tolerance",
                            best=total, error=err)
    return (total, err) if return_error else total


# ---------------------------------------------------------------- multiplier route


def _scaled_j(nu, u):
    """J_nu(u) / u^nu, stable at small u."""
    u = np.asarray(u, dtype=float)
    small = u < 1e-4
    out = np.empty_like(u)
    us = u[small]
    out[small] = 0.5 ** nu / sgamma(nu + 1.0) * (1.0 - us * us / (4.0 * (nu + 1.0)))
    ub = u[~small]
    out[~small] = jv(nu, ub) / ub ** nu
    return out


def _gaussian_piece(p: Params, pc: Piece, t, x):
    """Inverse transform for c exp(-z^2/(2 sigma^2)) on (0, inf)."""
    a, nu = p.alpha, p.nu
    c, sig = pc.params["c"], pc.params["sigma"]
    smax = math.sqrt(2.0 * 46.0) / sig
    norm_m = 2.0 ** nu * sgamma(nu + 1.0)

    def g(s):  # everything except s^(2 alpha + 1)
        return np.exp(-0.5 * (sig * s) ** 2) * norm_m * _scaled_j(nu, t * s) * _scaled_j(a, x * s)

    h = min(math.pi / (t + x), smax / 8.0)
    y0, w0 = gauss_jacobi_left(32, 2 * a + 1)
    head = h ** (2 * a + 2) * float(np.dot(w0, g(h * y0)))
    npan = int(math.ceil((smax - h) / h))
    edges = h + h * np.arange(npan + 1)
    xg, wg = gauss_legendre(32)
    hw = 0.5 * h
    pts = edges[:-1, None] + hw * (xg[None, :] + 1.0)
    body = float(((g(pts) * pts ** (2 * a + 1)) * wg[None, :]).sum()) * hw
    return c * sig ** (2 * a + 2) * (head + body), 1e-14 * abs(head + body)


def _indicator_piece(p: Params, pc: Piece, t, x, q: QuadSpec):
    """Inverse transform for a constant c on a bounded (a, b)."""
    al, nu = p.alpha, p.nu
    pref = 2.0 ** nu * sgamma(nu + 1.0) / (t ** nu * x ** al)
    total, err = 0.0, 0.0
    for edge, sign in ((pc.b, 1.0), (pc.a, -1.0)):
        if edge == 0.0:
            continue
        val, e = triple_bessel_integral((al + 1.0, nu, al), (edge, t, x), -nu, q)
        total += sign * edge ** (al + 1.0) * val
        err += edge ** (al + 1.0) * e
    return pc.params["c"] * pref * total, abs(pc.params["c"] * pref) * err


def mean_via_multiplier(p: Params, f: Profile, t: float, x: float,
                        q: QuadSpec = DEFAULT_QUAD, return_error: bool = False):
    """M_t f(x) through the modified Hankel transform and the multiplier m_(alpha+beta)(t s).

    The forward transform is taken in closed form, so pieces must be constants on
    bounded intervals or Gaussians on (0, inf).
    """
    _check_tx(t, x)
    total, err = 0.0, 0.0
    for pc in f.pieces:
        if pc.kind in ("const", "indicator"):
            if math.isinf(pc.b):
                raise DomainError("multiplier route needs decaying f: constant piece on an unbounded interval")
            val, e = _indicator_piece(p, pc, t, x, q)
        elif pc.kind == "gaussian" and pc.a == 0.0 and math.isinf(pc.b):
            val, e = _gaussian_piece(p, pc, t, x)
        else:
            raise DomainError(f"multiplier route has no closed-form transform for a {pc.kind} piece "
                              f"on [{pc.a}, {pc.b}]")
        total += val
        err += e
    return (total, err) if return_error else total


# ---------------------------------------------------------------- direct beta = 0 mean


def mean_beta0_direct(alpha: float, f: Profile, t: float, x: float) -> float:
    """c_alpha int_0^pi f(sqrt(x^2+t^2-2xt cos th)) sin^(2 alpha) th dth."""
    _check_tx(t, x)
    if not alpha > -0.5:
        raise DomainError("direct angular mean needs alpha > -1/2")
    cuts = [0.0, math.pi]
    for c in f.breakpoints():
        cs = (x * x + t * t - c * c) / (2.0 * x * t)
        if -1.0 < cs < 1.0:
            cuts.append(math.acos(cs))
    cuts = sorted(set(cuts))
    ex = 2.0 * alpha
    total = 0.0
    for th0, th1 in zip(cuts, cuts[1:]):
        left, right = th0 == 0.0, th1 == math.pi

        def g(th, left=left, right=right):
            z = math.sqrt(max(x * x + t * t - 2.0 * x * t * math.cos(th), 0.0))
            if z == 0.0:
                z = 1e-300
            return f.value(z) * _sin_ratio(th, left, right) ** ex

        wvar = (ex if left else 0.0, ex if right else 0.0)
        if wvar == (0.0, 0.0):
            val, _ = integrate.quad(g, th0, th1, epsabs=1e-14, epsrel=1e-12, limit=200)
        else:
            val, _ = integrate.quad(g, th0, th1, weight="alg", wvar=wvar,
                                    epsabs=1e-14, epsrel=1e-12, limit=200)
        total += val
    return _gegenbauer_norm(alpha) * total


def _sin_ratio(th, left, right):
    """sin th divided by th and/or (pi - th), finite at the endpoints."""
    if left and right:
        if th < 0.5 * math.pi:
            return np.sinc(th / math.pi) / (math.pi - th)
        return np.sinc((math.pi - th) / math.pi) / th
    if left:
        return np.sinc(th / math.pi)
    if right:
        return np.sinc((math.pi - th) / math.pi)
    return math.sin(th)


def _gegenbauer_norm(alpha):
    return sgamma(alpha + 1.0) / (math.sqrt(math.pi) * sgamma(alpha + 0.5))


# ---------------------------------------------------------------- maximal functions


@dataclass(frozen=True)
class TGrid:
    """Log-spaced t grid; ``refine_factor`` points are added on each side of
    every singular t value, at relative offsets from 1e-1 down to 1e-5."""

    t_min: float
    t_max: float
    n_log: int = 64
    refine_near: tuple = ()
    refine_factor: int = 6

    def __post_init__(self):
        if not (0 < self.t_min < self.t_max):
            raise DomainError("TGrid needs 0 < t_min < t_max")
        if self.n_log < 16:
            raise DomainError("TGrid needs n_log >= 16")
        if self.refine_factor < 0:
            raise DomainError("refine_factor must be non-negative")

    def points(self, extra=()) -> np.ndarray:
        pts = list(np.geomspace(self.t_min, self.t_max, self.n_log))
        offs = np.geomspace(1e-1, 1e-5, self.refine_factor) if self.refine_factor else []
        for c in list(self.refine_near) + list(extra):
            if c <= 0:
                continue
            for o in offs:
                pts += [c * (1 - o), c * (1 + o)]
        pts = np.array(sorted(set(pts)))
        return pts[(pts >= self.t_min) & (pts <= self.t_max)]


def singular_t_values(f: Profile, x: float) -> list[float]:
    """t = |x - c| and x + c for every profile breakpoint c."""
    vals = set()
    for c in f.breakpoints():
        for v in (abs(x - c), x + c):
            if v > 0:
                vals.add(v)
    return sorted(vals)


def _abs_mean(p, f, x, q):
    def h(t):
        return abs(mean_via_kernel(p, f, t, x, q))
    return h


def _refine(h, ts, vals, lo_cap, hi_cap):
    i = int(np.argmax(vals))
    best_t, best = float(ts[i]), float(vals[i])
    a = ts[i - 1] if i > 0 else max(lo_cap, ts[i] * 0.5)
    b = ts[i + 1] if i + 1 < len(ts) else min(hi_cap, ts[i] * 1.5)
    if not a < best_t < b:
        return best, best_t
    try:
        tt = optimize.golden(lambda s: -h(s) if a < s < b else 0.0,
                             brack=(a, best_t, b), tol=1e-6, maxiter=60)
        cand = h(tt)
        if cand > best:
            return cand, float(tt)
    except (ValueError, RuntimeError):
        pass
    return best, best_t


def maximal_op(p: Params, f: Profile, x: float, grid: TGrid, q: QuadSpec = DEFAULT_QUAD):
    """Grid maximum of |M_t f(x)| with golden-section refinement; a lower bound for the sup.

    Returns ``(value, argmax_t)``.
    """
    if not x > 0:
        raise DomainError("x must be positive")
    ts = grid.points(singular_t_values(f, x))
    h = _abs_mean(p, f, x, q)
    vals = np.array([h(t) for t in ts])
    return _refine(h, ts, vals, grid.t_min, grid.t_max)


def truncated_maximal(p: Params, f: Profile, x: float, q: QuadSpec = DEFAULT_QUAD,
                      n_log: int = 64, return_argmax: bool = False):
    """sup over 0 < t < x/2 of |M_t f(x)| (grid plus refinement, a lower bound)."""
    if not x > 0:
        raise DomainError("x must be positive")
    grid = TGrid(x * 1e-6, 0.5 * x * (1 - 1e-9), n_log=n_log)
    val, targ = maximal_op(p, f, x, grid, q)
    return (val, targ) if return_argmax else val
