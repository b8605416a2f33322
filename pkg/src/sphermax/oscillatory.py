"""Semi-infinite integrals of products of three Bessel functions.

    I = int_0^inf J_o1(a1 y) J_o2(a2 y) J_o3(a3 y) y^power dy

The integral converges only conditionally once ``power >= 1/2``, so it is
split at a cutoff ``Y``.  The head ``[0, Y]`` is integrated with Gauss panels
of half the fastest period (Gauss-Jacobi on the first panel to absorb the
``y^(o1+o2+o3+power)`` behaviour at the origin).  Two tail treatments exist:

* ``"asymptotic"``: every Bessel factor is replaced by its Hankel expansion,
  the product is expanded into terms ``y^-s exp(i w y)`` with ``w = a1 +- a2 +- a3``,
  and each term is integrated along a rotated contour (Gauss-Laguerre);
  when ``|w| Y`` is small the stretch up to ``25/|w|`` is done with Gauss
  panels first.
* ``"averaging"``: partial integrals sampled every half period of the slowest
  frequency are repeatedly averaged (Longman-style summation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import jv, roots_laguerre

from .errors import AccuracyError, DomainError
from .quadrature import gauss_jacobi_left, gauss_legendre

__all__ = ["QuadSpec", "DEFAULT_QUAD", "triple_bessel_integral", "frequencies"]


@dataclass(frozen=True)
class QuadSpec:
    """Quadrature controls.

    head_cutoff
        Smallest value of ``y * min(a1, a2, a3)`` at which the tail starts.
    n_periods
        Periods of the slowest oscillation used by the averaging tail.
    singular_band
        Relative distance ``|w| / (a1+a2+a3)`` below which a frequency is
        treated as singular and the evaluation is refused.
    """

    abs_tol: float = 1e-10
    head_cutoff: float = 40.0
    n_periods: int = 8
    singular_band: float = 1e-6
    tail: str = "asymptotic"
    n_gauss: int = 24

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError("abs_tol must be positive")
        if not self.head_cutoff > 0:
            raise DomainError("head_cutoff must be positive")
        if self.n_periods < 4:
            raise DomainError("n_periods must be at least 4")
        if not 0 < self.singular_band < 0.1:
            raise DomainError("singular_band must lie in (0, 0.1)")
        if self.tail not in ("asymptotic", "averaging"):
            raise DomainError(f"unknown tail method {self.tail!r}")


DEFAULT_QUAD = QuadSpec()

_N_LAGUERRE = 60
_LAGUERRE_MIN = 25.0  # |w| y needed before the contour rule is trusted
_MAX_TERMS = 24
_MAX_PANELS = 200_000


@lru_cache(maxsize=None)
def _laguerre():
    return roots_laguerre(_N_LAGUERRE)


def frequencies(scales) -> list[float]:
    a1, a2, a3 = scales
    return [a1 + a2 + a3, a1 + a2 - a3, a1 - a2 + a3, a1 - a2 - a3]


def _hankel_coeffs(order: float, a: float, nterms: int) -> np.ndarray:
    """c_k with J_o(a y) = Re[ y^-1/2 exp(i a y) sum_k c_k y^-k ] asymptotically."""
    mu = 4.0 * order * order
    ak = np.empty(nterms)
    ak[0] = 1.0
    for k in range(1, nterms):
        ak[k] = ak[k - 1] * (mu - (2 * k - 1) ** 2) / (8.0 * k)
    k = np.arange(nterms)
    phase = np.exp(-1j * (0.5 * order + 0.25) * math.pi)
    return math.sqrt(2.0 / (math.pi * a)) * phase * (1j ** k) * ak / a ** k


def _n_terms(orders, scales, Y) -> tuple[int, float]:
    """Hankel terms per factor and the relative size of the first one dropped.

    Each order gets its own count (half-integer orders terminate exactly);
    the largest count is used for all three factors.
    """
    x = min(scales) * Y
    need, worst = 1, 0.0
    for o in orders:
        mu = 4.0 * o * o
        b = 1.0
        k = 1
        while k < _MAX_TERMS:
            b *= abs(mu - (2 * k - 1) ** 2) / (8.0 * k * x)
            if b < 1e-17:
                break
            k += 1
        need = max(need, k)
        worst = max(worst, b)
    return need, worst


def _slow_edges(Y: float, Y2: float, w: float) -> np.ndarray:
    """Panels on [Y, Y2]: at most doubling in y, at most 2 radians of phase."""
    edges = [Y]
    while edges[-1] < Y2:
        edges.append(min(Y2, 2.0 * edges[-1], edges[-1] + 2.0 / abs(w)))
    return np.array(edges)


def _tail_terms(d: np.ndarray, s0: float, w: float, Y: float) -> tuple[complex, float]:
    """sum_m d[m] int_Y^inf y^-(s0+m) exp(i w y) dy and the sum of |terms|.

    When |w| Y is small the slowly turning stretch [Y, 25/|w|] is integrated
    with Gauss panels and the contour rule starts at 25/|w|.
    """
    keep = d != 0
    svals = (s0 + np.arange(len(d)))[keep]
    start = Y
    vals = np.zeros(len(svals), dtype=complex)
    if abs(w) * Y < _LAGUERRE_MIN:
        start = _LAGUERRE_MIN / abs(w)
        edges = _slow_edges(Y, start, w)
        x, wg = gauss_legendre(24)
        hw = 0.5 * np.diff(edges)
        pts = (edges[:-1, None] + hw[:, None] * (x[None, :] + 1.0)).ravel()
        wts = (hw[:, None] * wg[None, :]).ravel() * np.exp(1j * w * pts)
        vals += (pts[:, None] ** (-svals[None, :]) * wts[:, None]).sum(axis=0)
    u, wt = _laguerre()
    base = (start + 1j * u / w)[:, None] ** (-svals[None, :])
    vals += (1j / w) * np.exp(1j * w * start) * (wt @ base)
    parts = d[keep] * vals
    return complex(parts.sum()), float(np.abs(parts).sum())


def _asymptotic_tail(orders, scales, power, Y):
    nterms, dropped = _n_terms(orders, scales, Y)
    c = [_hankel_coeffs(o, a, nterms) for o, a in zip(orders, scales)]
    total = 0.0 + 0.0j
    size = 0.0
    for s2 in (1, -1):
        c2 = c[1] if s2 > 0 else np.conj(c[1])
        for s3 in (1, -1):
            c3 = c[2] if s3 > 0 else np.conj(c[2])
            d = np.convolve(np.convolve(c[0], c2), c3)
            w = scales[0] + s2 * scales[1] + s3 * scales[2]
            val, mag = _tail_terms(d, 1.5 - power, w, Y)
            total += val
            size += mag
    return 0.25 * total.real, 0.25 * size * (3.0 * dropped + 1e-15)


def _integrand(orders, scales, power):
    o1, o2, o3 = orders
    a1, a2, a3 = scales

    def f(y):
        return jv(o1, a1 * y) * jv(o2, a2 * y) * jv(o3, a3 * y) * y ** power

    def g(y):  # f / y^(o1+o2+o3+power), smooth at the origin
        return (jv(o1, a1 * y) / y ** o1) * (jv(o2, a2 * y) / y ** o2) * (jv(o3, a3 * y) / y ** o3)

    return f, g


def _head(orders, scales, power, Y, n):
    f, g = _integrand(orders, scales, power)
    h = math.pi / sum(scales)
    lead = sum(orders) + power
    if lead <= -1:
        raise DomainError("integrand not integrable at the origin")
    y0, w0 = gauss_jacobi_left(n, float(lead))
    first = h ** (lead + 1.0) * float(np.dot(w0, g(h * y0)))
    npan = max(1, int(math.ceil((Y - h) / h)))
    if npan > _MAX_PANELS:
        raise AccuracyError("scale ratio too extreme for the head quadrature")
    edges = h + h * np.arange(npan + 1)
    x, w = gauss_legendre(n)
    hw = 0.5 * h
    pts = edges[:-1, None] + hw * (x[None, :] + 1.0)
    panels = (f(pts) * w[None, :]).sum(axis=1) * hw
    return first, panels, edges[-1]


def triple_bessel_integral(orders, scales, power, q: QuadSpec = DEFAULT_QUAD):
    """Return ``(value, error_estimate)`` of the triple Bessel integral.

    Raises ``DomainError`` when one of the combination frequencies lies in
    the singular band, ``AccuracyError`` when the error estimate exceeds
    ``q.abs_tol``.
    """
    orders = tuple(float(o) for o in orders)
    scales = tuple(float(a) for a in scales)
    if min(scales) <= 0:
        raise DomainError("scales must be positive")
    if power - 1.5 >= 0:
        raise DomainError("integral diverges at infinity")
    total_scale = sum(scales)
    freqs = frequencies(scales)
    wmin = min(abs(w) for w in freqs)
    if wmin < q.singular_band * total_scale:
        raise DomainError("combination frequency inside the singular band")
    numax = max(abs(o) for o in orders)
    Y = max(q.head_cutoff, numax * numax + 30.0) / min(scales)
    first, panels, Y = _head(orders, scales, power, Y, q.n_gauss)
    head = first + math.fsum(panels)
    head_err = 1e-15 * (abs(first) + float(np.abs(panels).sum()))
    if q.tail == "asymptotic":
        tail, tail_err = _asymptotic_tail(orders, scales, power, Y)
    else:
        tail, tail_err = _averaged_tail(orders, scales, power, Y, wmin, q)
    value = head + tail
    err = head_err + tail_err
    if not err <= q.abs_tol * max(1.0, abs(value)):
        raise AccuracyError("triple Bessel tail did not converge", best=value, error=err)
    return value, err


def _averaged_tail(orders, scales, power, Y, wmin, q):
    """Tail from repeated window averages of the partial integral S(y).

    A moving average over one full period of frequency w removes the
    w-oscillation of S; each distinct frequency is filtered ``q.n_periods // 2``
    times, which also removes the slowly varying amplitude corrections.
    """
    f, _ = _integrand(orders, scales, power)
    freqs = sorted({round(abs(w), 14) for w in frequencies(scales)})
    windows = [2.0 * math.pi / w for w in freqs]
    reps = q.n_periods // 2
    span = reps * sum(windows)
    step = math.pi / sum(scales) / 8.0
    npts = int(math.ceil(span / step)) + 4 * reps * len(windows) + 16
    if npts > 5_000_000:
        raise AccuracyError("slowest oscillation too slow for averaging tail")
    edges = Y + step * np.arange(npts + 1)
    x, w = gauss_legendre(8)
    hw = 0.5 * step
    pts = edges[:-1, None] + hw * (x[None, :] + 1.0)
    seg = (f(pts) * w[None, :]).sum(axis=1) * hw
    S = np.concatenate(([0.0], np.cumsum(seg)))
    grid = edges
    errs = []
    for _ in range(reps):
        for L in windows:
            # cumulative integral of S for exact-length window means
            C = np.concatenate(([0.0], np.cumsum(0.5 * (S[1:] + S[:-1]) * step)))
            keep = grid + L <= grid[-1]
            new = (np.interp(grid[keep] + L, grid, C) - C[keep]) / L
            errs.append(abs(new[0] - S[0]))
            S, grid = new, grid[keep]
    return float(S[0]), float(errs[-1]) if errs else math.inf
