"""Piecewise-analytic radial profiles f on (0, inf).

A profile is a list of pieces, each an interval with a formula::

    const     c
    indicator c                                  (same as const, c defaults to 1)
    power     c (z - shift)^p
    powerlog  c (z - shift)^p log(L / (z - shift))^q
    gaussian  c exp(-z^2 / (2 sigma^2))

JSON form: ``{"pieces": [{"interval": [a, b], "kind": "power", "params": {...}}]}``
with ``b`` allowed to be ``null`` or ``"inf"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceSignal, DomainError
from .quadrature import tanh_sinh

__all__ = ["Piece", "Profile", "KINDS"]

KINDS = ("const", "indicator", "power", "powerlog", "gaussian")

_DEFAULTS = {
    "const": {"c": 1.0},
    "indicator": {"c": 1.0},
    "power": {"c": 1.0, "p": 0.0, "shift": 0.0},
    "powerlog": {"c": 1.0, "p": 0.0, "shift": 0.0, "q": 1.0, "L": 2.0},
    "gaussian": {"c": 1.0, "sigma": 1.0},
}


@dataclass(frozen=True)
class Piece:
    a: float
    b: float
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown piece kind {self.kind!r}")
        if not (0 <= self.a < self.b):
            raise DomainError(f"bad interval [{self.a}, {self.b}]")
        unknown = set(self.params) - set(_DEFAULTS[self.kind])
        if unknown:
            raise DomainError(f"unknown parameters {sorted(unknown)} for kind {self.kind!r}")
        merged = dict(_DEFAULTS[self.kind])
        merged.update({k: float(v) for k, v in self.params.items()})
        object.__setattr__(self, "params", merged)
        if self.kind in ("power", "powerlog") and self.a < merged["shift"]:
            raise DomainError("power pieces need interval start >= shift")
        if self.kind == "gaussian" and not merged["sigma"] > 0:
            raise DomainError("gaussian sigma must be positive")

    def formula(self, z: np.ndarray) -> np.ndarray:
        """The formula, without the interval indicator."""
        k, pr = self.kind, self.params
        c = pr["c"]
        if k in ("const", "indicator"):
            return np.full(np.shape(z), c)
        if k == "gaussian":
            return c * np.exp(-0.5 * (z / pr["sigma"]) ** 2)
        u = z - pr["shift"]
        with np.errstate(divide="ignore", invalid="ignore"):
            out = c * u ** pr["p"]
            if k == "powerlog":
                out = out * np.log(pr["L"] / u) ** pr["q"]
        return out

    def local(self, z, lo, da):
        """Formula at z = lo + da with (z - shift) rebuilt from the exact distance da."""
        if self.kind in ("power", "powerlog"):
            pr = self.params
            u = (lo - pr["shift"]) + da
            with np.errstate(divide="ignore", invalid="ignore"):
                out = pr["c"] * u ** pr["p"]
                if self.kind == "powerlog":
                    out = out * np.log(pr["L"] / u) ** pr["q"]
            return out
        return self.formula(z)

    def start_order(self):
        """(e, q) with formula ~ (z - a)^e log(1/(z - a))^q as z -> a+."""
        pr = self.params
        if self.kind in ("power", "powerlog") and pr["shift"] == self.a:
            return pr["p"], (pr["q"] if self.kind == "powerlog" else 0.0)
        return 0.0, 0.0

    def scaled(self, factor: float) -> "Piece":
        pr = dict(self.params)
        pr["c"] = pr["c"] * factor
        return Piece(self.a, self.b, self.kind, pr)

    def to_json(self) -> dict:
        b = None if math.isinf(self.b) else self.b
        return {"interval": [self.a, b], "kind": self.kind, "params": dict(self.params)}


def _check_ends(h, lo, hi, pc):
    """Raise DivergenceSignal if h behaves like d^e with e <= -1 at either end."""
    span = hi - lo
    d = span * np.array([1e-10, 1e-14])
    for at_lo in (True, False):
        if at_lo:
            v = h(lo + d, d, span - d)
        else:
            v = h(hi - d, span - d, d)
        v = np.abs(np.asarray(v, dtype=float))
        if np.all(v > 0) and np.all(np.isfinite(v)):
            e = math.log(v[0] / v[1]) / math.log(1e4)
            if e <= -1.0 + 1e-3:
                raise DivergenceSignal(f"integrand not integrable at {'start' if at_lo else 'end'} "
                                       f"of piece [{pc.a}, {pc.b}] (local exponent {e:.3f})")
        elif not np.all(np.isfinite(v)):
            raise DivergenceSignal(f"integrand infinite near an end of piece [{pc.a}, {pc.b}]")


def diverges(e: float, q: float, tol: float = 1e-12) -> bool:
    """Is d^e log(1/d)^q non-integrable at d = 0+?"""
    return e < -1 - tol or (abs(e + 1) <= tol and q >= -1 - tol)


def _check_orders(pc, lo, hi, a, b, weight_order):
    (ea, qa), (eb, qb) = weight_order
    e, q = pc.start_order() if lo == pc.a else (0.0, 0.0)
    if lo == a:
        e, q = e + ea, q + qa
    if diverges(e, q):
        raise DivergenceSignal(f"integrand not integrable at {lo} (order d^{e:g} log^{q:g})")
    if hi == b and math.isfinite(b) and diverges(eb, qb):
        raise DivergenceSignal(f"integrand not integrable at {hi} (order d^{eb:g} log^{qb:g})")


class Profile:
    """An immutable radial profile made of non-overlapping pieces."""

    def __init__(self, pieces, allow_overlap: bool = False, integrability_class: str | None = None):
        # integrability_class is a free-form declaration such as "L^2(dmu)"
        self.integrability_class = integrability_class
        pieces = sorted(pieces, key=lambda pc: pc.a)
        if not pieces:
            raise DomainError("profile needs at least one piece")
        if not allow_overlap:
            for p0, p1 in zip(pieces, pieces[1:]):
                if p1.a < p0.b:
                    raise DomainError(f"pieces overlap at [{p1.a}, {p0.b}]")
        self._pieces = tuple(pieces)

    @property
    def pieces(self):
        return self._pieces

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        out = np.zeros(z.shape)
        for pc in self._pieces:
            m = (z > pc.a) & (z < pc.b)
            if m.any():
                out[m] += pc.formula(z[m])
        return out

    def value(self, z: float) -> float:
        return float(self(np.array([z]))[0])

    def breakpoints(self) -> list[float]:
        pts = set()
        for pc in self._pieces:
            pts.add(pc.a)
            if not math.isinf(pc.b):
                pts.add(pc.b)
        return sorted(pts)

    def support(self) -> tuple[float, float]:
        return self._pieces[0].a, max(pc.b for pc in self._pieces)

    def scaled(self, factor: float) -> "Profile":
        return Profile([pc.scaled(factor) for pc in self._pieces], allow_overlap=True)

    @staticmethod
    def lincomb(terms) -> "Profile":
        """sum_i c_i f_i as one profile; pieces may overlap and then add up."""
        pieces = [pc.scaled(c) for c, prof in terms for pc in prof.pieces]
        return Profile(pieces, allow_overlap=True)

    def integral(self, a: float, b: float, weight=None, absolute: bool = True,
                 tol: float = 1e-12, limit: float = 1e10, dweight=None, weight_order=None) -> float:
        """int_a^b weight(z) |f(z)| dz (f itself when ``absolute`` is False); b may be inf.

        ``dweight(z, da, db)`` is an alternative weight that also receives the
        exact distances z - a and b - z, for weights singular at the limits.
        ``weight_order = ((e_a, q_a), (e_b, q_b))`` declares the weight to behave
        like d^e log(1/d)^q at each limit; integrability is then decided
        exactly from these orders and the orders of the pieces (log-type
        divergences included).  Without it the local exponent is read off two
        probes very close to each end, and ``DivergenceSignal`` is raised when
        it is <= -1 or when an integral out to infinity exceeds ``limit``.
        """
        # run the quadrature on a power-of-two rescaled copy so that scaling f
        # by 2^k changes the result by exactly 2^k
        amp = max(abs(pc.params["c"]) for pc in self._pieces)
        shift = math.frexp(amp)[1] if amp > 0 and math.isfinite(amp) else 0
        total = 0.0
        for pc in self._pieces:
            pc = pc.scaled(math.ldexp(1.0, -shift))
            lo, hi = max(a, pc.a), min(b, pc.b)
            if not lo < hi:
                continue
            if weight_order is not None:
                _check_orders(pc, lo, hi, a, b, weight_order)

            def g(z, da, db, pc=pc, lo=lo, hi=hi):
                v = pc.local(z, lo, da)
                if absolute:
                    v = np.abs(v)
                if weight is not None:
                    v = v * weight(z)
                if dweight is not None:
                    to_b = np.inf if math.isinf(b) else (b - hi) + db
                    v = v * dweight(z, (lo - a) + da, to_b)
                return v

            if math.isinf(hi):
                def h(s, ds, dhi, g=g, lo=lo):
                    u = ds / dhi
                    return g(lo + u, u, np.inf) / (dhi * dhi)
                lo_, hi_ = 0.0, 1.0
            else:
                h, lo_, hi_ = g, lo, hi
            if weight_order is None:
                _check_ends(h, lo_, hi_, pc)
            val, _ = tanh_sinh(h, lo_, hi_, tol=tol, distances=True)
            total += val
        total = math.ldexp(total, shift)
        if not math.isfinite(total) or (math.isinf(b) and abs(total) > limit):
            raise DivergenceSignal("integral exceeds the divergence limit", partial=total)
        return total

    # ---- constructors used throughout
    @classmethod
    def constant(cls, c=1.0, a=0.0, b=math.inf):
        return cls([Piece(a, b, "const", {"c": c})])

    @classmethod
    def indicator(cls, a, b, c=1.0):
        return cls([Piece(a, b, "indicator", {"c": c})])

    @classmethod
    def power(cls, p, a=0.0, b=math.inf, c=1.0, shift=0.0):
        return cls([Piece(a, b, "power", {"c": c, "p": p, "shift": shift})])

    @classmethod
    def gaussian(cls, sigma=1.0, c=1.0, a=0.0, b=math.inf):
        return cls([Piece(a, b, "gaussian", {"c": c, "sigma": sigma})])

    # ---- JSON
    @classmethod
    def from_json(cls, doc) -> "Profile":
        if isinstance(doc, (str, bytes)):
            try:
                doc = json.loads(doc)
            except json.JSONDecodeError as exc:
                raise DomainError(f"profile is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict) or not isinstance(doc.get("pieces"), list):
            raise DomainError('profile JSON must be an object with a "pieces" list')
        pieces = []
        for i, raw in enumerate(doc["pieces"]):
            try:
                a, b = raw["interval"]
                a = float(a)
                b = math.inf if b is None or b == "inf" else float(b)
                pieces.append(Piece(a, b, raw["kind"], dict(raw.get("params", {}))))
            except (KeyError, TypeError, ValueError) as exc:
                raise DomainError(f"piece {i}: malformed ({exc})") from exc
        return cls(pieces, integrability_class=doc.get("integrability_class"))

    def to_json(self) -> dict:
        doc = {"pieces": [pc.to_json() for pc in self._pieces]}
        if self.integrability_class:
            doc["integrability_class"] = self.integrability_class
        return doc

    def __repr__(self):
        return f"Profile({json.dumps(self.to_json())})"
