"""Counterexample machinery for the necessary conditions.

The positive-kernel operators U/V model the right-hand sides of the kernel
estimates on E and F; the extremal families A1-A3, B1-B2 break one necessary
condition each; ``unboundedness_sweep`` turns a family into empirical norm
ratios ||M_* f|| / ||f|| over growing scales.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .bounds import WeightedLp, necessary_conditions
from .errors import AccuracyError, DivergenceSignal, DomainError
from .kernel import Params, case_id, kernel_value
from .oscillatory import DEFAULT_QUAD, QuadSpec
from .profile import Piece, Profile, diverges
from .quadrature import tanh_sinh
from .specfun import gamma as sgamma
from .transform import TGrid, _abs_mean, _refine, singular_t_values

__all__ = [
    "FamilyId", "Family", "EpsRegionSpec", "EpsRegion", "AuxKind", "SweepRow",
    "eval_aux", "aux_kinds", "beta_integral", "in_eps_region", "find_eps",
    "unboundedness_sweep", "witness_family", "lp_norm", "violated_codes",
]

EPS_CAP = 1.0


class FamilyId(str, Enum):
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    B1 = "B1"
    B2 = "B2"


@dataclass(frozen=True)
class Family:
    """One extremal family; N (A3), delta and p (B1), delta (B2) default to the sweep's."""

    id: FamilyId
    N: float | None = None
    delta: float | None = None
    p: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "id", FamilyId(self.id))
        if self.id is FamilyId.A3 and self.N is not None and not self.N >= 3:
            raise DomainError("A3 needs N >= 3")
        if self.id is FamilyId.B2 and self.delta is not None and not self.delta <= -1:
            raise DomainError("B2 needs delta <= -1")

    def profile(self, params: Params, N: float | None = None, delta: float | None = None,
                p: float | None = None) -> Profile:
        N = self.N if N is None else N
        delta = self.delta if delta is None else delta
        p = self.p if p is None else p
        k = self.id
        if k is FamilyId.A1:
            return Profile.indicator(1.0, 2.0)
        if k is FamilyId.A2:
            return Profile([Piece(1.0, 2.0, "powerlog",
                                  {"p": -(params.nu + 0.5), "shift": 1.0, "q": -1.0, "L": 2.0})])
        if k is FamilyId.A3:
            if N is None or not N >= 3:
                raise DomainError("A3 needs N >= 3")
            return Profile([Piece(N - 1.0, N + 1.0, "power", {"p": params.beta})])
        if delta is None:
            raise DomainError(f"{k.value} needs delta")
        if k is FamilyId.B1:
            if p is None:
                raise DomainError("B1 needs p")
            return Profile([Piece(0.0, 1.0, "powerlog", {"p": -(delta + 1) / p, "q": -1.0, "L": 2.0})])
        if not delta <= -1:
            raise DomainError("B2 needs delta <= -1")
        return Profile([Piece(0.0, 1.0, "power", {"p": -delta})])


WITNESS = {"a1": FamilyId.A1, "a2": FamilyId.A2, "a3": FamilyId.A3, "b1": FamilyId.B1, "b2": FamilyId.B2}


def witness_family(code: str) -> FamilyId:
    return WITNESS[code]


# ---------------------------------------------------------------- beta integral


def beta_integral(gamma: float, A: float, B: float, tol: float = 1e-13):
    """int_A^B ([B^2 - z^2][z^2 - A^2])^gamma z dz by quadrature and in closed form."""
    if not gamma > -1:
        raise DomainError("gamma must exceed -1")
    if not (0 <= A < B):
        raise DomainError("need 0 <= A < B")

    def f(z, da, db):
        return (db * (B + z) * da * (z + A)) ** gamma * z

    numeric, _ = tanh_sinh(f, A, B, tol=tol, distances=True)
    closed = sgamma(gamma + 1) ** 2 / (2 * sgamma(2 * gamma + 2)) * ((B - A) * (B + A)) ** (2 * gamma + 1)
    return numeric, closed


# ---------------------------------------------------------------- auxiliary operators


class AuxKind(str, Enum):
    U1 = "U1"
    U2 = "U2"
    U2LOG = "U2log"
    V1 = "V1"
    V2 = "V2"
    V2LOG = "V2log"


# which auxiliary operator models the E / F part of each kernel case
_E_KIND = {1: AuxKind.U1, 2: AuxKind.U2, 3: AuxKind.U1, 4: AuxKind.U2LOG, 5: AuxKind.U1,
           6: AuxKind.U1, 7: AuxKind.U1, 8: AuxKind.U2}
_F_KIND = {1: None, 2: AuxKind.V2, 3: AuxKind.V1, 4: AuxKind.V2LOG, 5: AuxKind.V1,
           6: AuxKind.V1, 7: AuxKind.V2, 8: AuxKind.V1}


def aux_kinds(p: Params):
    """(E-part kind, F-part kind or None) for the kernel case of p."""
    c = case_id(p)
    return _E_KIND[c], _F_KIND[c]


def eval_aux(kind, p: Params, f: Profile, t: float, x: float) -> float:
    """One of the positive-kernel operators applied to f at (t, x).

    Integrability at the window ends is decided from the exact local orders,
    so log-type divergences raise ``DivergenceSignal`` as well.
    """
    kind = AuxKind(kind)
    if not (t > 0 and x > 0):
        raise DomainError("t and x must be positive")
    a_, b_, nu = p.alpha, p.beta, p.nu
    e = nu - 0.5
    if kind in (AuxKind.U1, AuxKind.U2, AuxKind.U2LOG):
        lo, hi = abs(t - x), t + x
        if kind is AuxKind.U1:
            pref = x ** (-2 * a_ - b_) / t ** (2 * nu)

            def w(z, da, db):
                return (db * (x + t + z) * da * (z + lo)) ** e * z ** (1 - b_)
            ea = 2 * e + 1 - b_ if lo == 0 else e
            order = ((ea, 0.0), (e, 0.0))
        else:
            pref = x ** (-a_ - 0.5) / t ** (2 * nu)

            def left(z, da):
                # t - x + z, exact near the lower end when x > t
                return da if x >= t else (t - x) + z

            def w(z, da, db, left=left):
                out = (left(z, da) * db) ** e * z ** (a_ + 0.5)
                if kind is AuxKind.U2LOG:
                    close = da if t >= x else (x - t) + z
                    out = out * np.log(8 * x * z / (close * (x + z + t)))
                return out
            if x > t:
                ea = e
            elif x == t:
                ea = e + a_ + 0.5
            else:
                ea = 0.0
            qa = 1.0 if (kind is AuxKind.U2LOG and t >= x) else 0.0
            order = ((ea, qa), (e, 0.0))
    else:
        if not x < t:
            return 0.0
        lo, hi = 0.0, t - x
        pref = t ** (-2 * nu)
        if kind is AuxKind.V1:
            def w(z, da, db):
                return ((t - x + z) * (t + x - z)) ** (-a_ - 0.5) * (db * (t + x + z)) ** e * z ** (2 * a_ + 1)
            order = ((2 * a_ + 1, 0.0), (e, 0.0))
        else:
            def w(z, da, db):
                base = (t - x + z) * (t + x - z)
                out = base ** (b_ - 1) * z ** (2 * a_ + 1)
                if kind is AuxKind.V2LOG:
                    out = out * np.log(2 * base / (db * (t + x + z)))
                return out
            order = ((2 * a_ + 1, 0.0), (0.0, 1.0 if kind is AuxKind.V2LOG else 0.0))
    return pref * f.integral(lo, hi, absolute=False, dweight=w, weight_order=order)


# ---------------------------------------------------------------- E_eps / F_eps


@dataclass(frozen=True)
class EpsRegionSpec:
    eps: float

    def __post_init__(self):
        if not 0 < self.eps <= 1:
            raise DomainError("eps must lie in (0, 1]")


class EpsRegion(str, Enum):
    E_EPS = "E_eps"
    F_EPS = "F_eps"
    NEITHER = "Neither"


def in_eps_region(spec: EpsRegionSpec, t: float, x: float, z: float) -> EpsRegion:
    if not (t > 0 and x > 0 and z > 0):
        raise DomainError("t, x, z must be positive")
    r = spec.eps * math.sqrt(x * z)
    if abs(x - z) < t < x + z:
        if t - abs(x - z) < r or x + z - t < r:
            return EpsRegion.E_EPS
    elif t > x + z:
        if t - (x + z) < r or t > math.sqrt(x * z) / spec.eps:
            return EpsRegion.F_EPS
    return EpsRegion.NEITHER


def _eps_samples(n, seed):
    rng = np.random.default_rng(seed)
    xs = np.exp(rng.uniform(math.log(0.1), math.log(10.0), n))
    zs = np.exp(rng.uniform(math.log(0.1), math.log(10.0), n))
    s = rng.uniform(0.02, 0.98, n)
    return xs, zs, s, None


def _signs_constant(p: Params, eps: float, samples, q: QuadSpec) -> bool:
    """No observed sign change on any of the four end pieces of E_eps and F_eps."""
    xs, zs, s, _ = samples
    signs = {}
    for x, z, si in zip(xs, zs, s):
        r = eps * math.sqrt(x * z)
        gap = min(r * si, 0.5 * (x + z - abs(x - z)))
        for piece, t in (("E-", abs(x - z) + gap), ("E+", x + z - gap),
                         ("F-", x + z + r * si), ("F+", math.sqrt(x * z) / (eps * si) + x + z)):
            if in_eps_region(EpsRegionSpec(eps), t, x, z) is EpsRegion.NEITHER:
                continue
            try:
                k = kernel_value(p, t, x, z, q)
            except (DomainError, AccuracyError):
                continue
            if abs(k) > 10 * q.abs_tol:
                signs.setdefault(piece, set()).add(bool(k > 0))
    return all(len(v) == 1 for v in signs.values())


def find_eps(p: Params, cap: float = EPS_CAP, n_samples: int = 48, steps: int = 6,
             seed: int = 7, q: QuadSpec = DEFAULT_QUAD) -> float:
    """Largest eps (bisection, at most ``cap``) with no observed kernel sign change on the
    pieces of E_eps near t = |x-z| and t = x+z, and of F_eps near t = x+z and t = infinity.

    eps = 1 makes E_eps = E and F_eps = F, i.e. no restriction at all.
    """
    samples = _eps_samples(n_samples, seed)
    if _signs_constant(p, cap, samples, q):
        return cap
    lo, hi = 0.0, cap
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if _signs_constant(p, mid, samples, q):
            lo = mid
        else:
            hi = mid
    if lo == 0.0:
        raise AccuracyError("no eps with constant kernel sign found", best=hi, error=hi)
    return lo


# ---------------------------------------------------------------- sweeps


class SweepRow(NamedTuple):
    scale: float
    f_norm: float
    mstar_norm: float
    ratio: float


def lp_norm(f: Profile, w: WeightedLp) -> float:
    """||f||_{L^p(x^delta dx)}; inf when the integral diverges."""
    total = 0.0
    for pc in f.pieces:
        e, q = pc.start_order()
        e, q = e * w.p, q * w.p
        if pc.a == 0.0:
            e += w.delta
        if diverges(e, q):
            return math.inf
        if math.isinf(pc.b):
            raise DomainError("lp_norm needs bounded pieces")

        def g(z, da, db, pc=pc):
            with np.errstate(divide="ignore"):
                # in logs: |f|^p and z^delta overflow separately near 0
                out = np.exp(w.p * np.log(np.abs(pc.local(z, pc.a, da))) + w.delta * np.log(z))
            return out
        val, _ = tanh_sinh(g, pc.a, pc.b, tol=1e-12, distances=True)
        total += val
    return total ** (1 / w.p)


def _x_grid(lo, hi, f, n):
    xs = list(np.geomspace(lo, hi, n))
    offs = np.geomspace(1e-3, 0.3, 8)
    for c in f.breakpoints():
        if c > 0:
            xs += list(c * (1 - offs)) + list(c * (1 + offs))
    xs = np.array(sorted(set(xs)))
    return xs[(xs >= lo) & (xs <= hi)]


def _admissible(spec, t, x, zs):
    return all(in_eps_region(spec, t, x, z) is not EpsRegion.NEITHER or t < abs(x - z) for z in zs)


def _mstar(p, f, x, eps, q, n_log=32):
    """Grid sup of |M_t f(x)| over t whose triples lie in E_eps, F_eps or the null region."""
    a, b = f.support()
    t_lo = max(1e-3 * x, 1e-6)
    t_hi = 4 * (x + b)
    grid = TGrid(t_lo, t_hi, n_log=n_log)
    ts = grid.points(singular_t_values(f, x))
    h = _abs_mean(p, f, x, q)
    if eps < 1:
        spec = EpsRegionSpec(eps)
        zs = np.linspace(max(a, 1e-12), b, 17)
        ok = np.array([_admissible(spec, t, x, zs) for t in ts])
        if not ok.any():
            return 0.0
        ts = ts[ok]
        h0 = h

        def h(t, h0=h0):
            return h0(t) if _admissible(spec, t, x, zs) else 0.0
    vals = np.array([h(t) for t in ts])
    return _refine(h, ts, vals, t_lo, t_hi)[0]


def _diverges_aux(p, fam, f, w):
    """Does the family make the relevant auxiliary integral infinite?"""
    e_kind, f_kind = aux_kinds(p)
    try:
        if fam is FamilyId.A2:
            eval_aux(e_kind, p, f, 9.0, 10.0)
        elif fam is FamilyId.B1 and f_kind is not None:
            eval_aux(f_kind, p, f, 2.0, 1.0)
    except DivergenceSignal:
        return True
    return False


def unboundedness_sweep(p: Params, w: WeightedLp, fam: Family | FamilyId | str, scales,
                        n_x: int = 40, eps: float | None = None, q: QuadSpec = DEFAULT_QUAD):
    """Norm ratios ||M_* f|| / ||f|| in L^p(x^delta dx) for the family at each scale.

    Scale meaning: A3 -> N; B2 -> x ranges over (1/scale, 4); otherwise the
    x-truncation radius.  Norms of M_* f use a weighted trapezoid rule in
    log x.  A family not in L^p gets ratio nan; an infinite auxiliary
    integral gives ratio inf.
    """
    if not isinstance(fam, Family):
        fam = Family(FamilyId(fam))
    if eps is None:
        eps = find_eps(p, q=q)
    rows = []
    for s in scales:
        s = float(s)
        f = fam.profile(p, N=s if fam.id is FamilyId.A3 else None,
                        delta=w.delta if fam.delta is None else None,
                        p=w.p if fam.p is None else None)
        fn = lp_norm(f, w)
        if not math.isfinite(fn):
            rows.append(SweepRow(s, fn, math.nan, math.nan))
            continue
        if _diverges_aux(p, fam.id, f, w):
            rows.append(SweepRow(s, fn, math.inf, math.inf))
            continue
        if fam.id is FamilyId.A3:
            lo, hi = 1e-2, 3 * s
        elif fam.id is FamilyId.B2:
            lo, hi = 1 / s, 4.0
        else:
            lo, hi = 1e-2, s
        xs = _x_grid(lo, hi, f, n_x)
        try:
            m = np.array([_mstar(p, f, x, eps, q) for x in xs])
        except DivergenceSignal:
            rows.append(SweepRow(s, fn, math.inf, math.inf))
            continue
        mn = integrate.trapezoid(m ** w.p * xs ** (w.delta + 1), np.log(xs)) ** (1 / w.p)
        rows.append(SweepRow(s, fn, mn, mn / fn))
    return rows


def violated_codes(p: Params, w: WeightedLp) -> list[str]:
    return [code for code, ok, _ in necessary_conditions(p, w) if not ok]
