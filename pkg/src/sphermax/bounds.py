"""Power-weight L^p region arithmetic for the maximal operator.

Everything here is exact interval algebra on (alpha, beta, p, delta), with
endpoint openness carried explicitly: the "weakened" endpoints are the sharp
content of the statements, so they are never rounded away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError
from .kernel import Params, is_natural

__all__ = [
    "WeightedLp", "DeltaInterval", "Verdict", "VerdictTag",
    "gate_ok", "sufficient_delta_interval", "necessary_ok", "necessary_conditions", "classify",
    "natural_weight_p_range", "figure1_curves", "radial_condition_1_8", "BoundaryCurve",
]

INF = math.inf


@dataclass(frozen=True)
class WeightedLp:
    """L^p(R_+, x^delta dx)."""

    p: float
    delta: float

    def __post_init__(self):
        if not (self.p > 1 and math.isfinite(self.p)):
            raise DomainError(f"p must be in (1, inf), got {self.p}")
        if not math.isfinite(self.delta):
            raise DomainError("delta must be finite")

    def gamma(self, alpha: float) -> float:
        """Exponent of the same weight written against d mu_alpha = x^(2 alpha + 1) dx."""
        return self.delta - (2 * alpha + 1)


@dataclass(frozen=True)
class DeltaInterval:
    lo: float
    lo_closed: bool
    hi: float
    hi_closed: bool

    def __post_init__(self):
        # -beta p at beta = 0 would otherwise print as -0.0
        object.__setattr__(self, "lo", self.lo + 0.0)
        object.__setattr__(self, "hi", self.hi + 0.0)

    @property
    def empty(self) -> bool:
        return self.lo > self.hi or (self.lo == self.hi and not (self.lo_closed and self.hi_closed))

    def __contains__(self, d: float) -> bool:
        if self.empty:
            return False
        above = d >= self.lo if self.lo_closed else d > self.lo
        below = d <= self.hi if self.hi_closed else d < self.hi
        return above and below

    def intersect(self, other: "DeltaInterval") -> "DeltaInterval":
        if self.lo > other.lo:
            lo, lc = self.lo, self.lo_closed
        elif other.lo > self.lo:
            lo, lc = other.lo, other.lo_closed
        else:
            lo, lc = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hc = self.hi, self.hi_closed
        elif other.hi < self.hi:
            hi, hc = other.hi, other.hi_closed
        else:
            hi, hc = self.hi, self.hi_closed and other.hi_closed
        return DeltaInterval(lo, lc, hi, hc)

    def __str__(self):
        if self.empty:
            return "empty"
        return f"{'[' if self.lo_closed else '('}{self.lo}, {self.hi}{']' if self.hi_closed else ')'}"

    def to_dict(self) -> dict:
        enc = lambda v: None if math.isinf(v) else v  # noqa: E731
        return {"lo": enc(self.lo), "lo_closed": self.lo_closed, "hi": enc(self.hi),
                "hi_closed": self.hi_closed, "empty": self.empty}


EMPTY = DeltaInterval(0.0, False, 0.0, False)


class VerdictTag(str, Enum):
    BOUNDED = "Bounded"
    UNBOUNDED = "Unbounded"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Verdict:
    tag: VerdictTag
    witness: str


def gate_ok(p: Params, lp_p: float) -> bool:
    return 1.0 / lp_p < p.nu + 0.5


def _lower_weakened(p: Params) -> bool:
    if p.beta <= 0:
        return is_natural(-p.beta) or p.nu > 0.5
    if p.beta < 1:
        return p.nu > 0.5
    return False


def _case(p: Params) -> str:
    return "a" if p.beta >= 1 else ("b" if p.beta > 0 else "c")


def _lower_b(p: Params) -> float:
    # -beta / ([beta v (nu + 1/2)] ^ 1) in closed form
    if p.nu >= 0.5:
        return -p.beta
    if p.alpha > -0.5:
        return -p.beta / (p.nu + 0.5)
    return -1.0


def sufficient_delta_interval(p: Params, lp_p: float) -> DeltaInterval:
    """delta-range on which the maximal operator is known bounded on L^p(x^delta dx)."""
    WeightedLp(lp_p, 0.0)
    if not gate_ok(p, lp_p):
        return EMPTY
    c = _case(p)
    if c == "a":
        return DeltaInterval(-1.0, False, (2 * p.alpha + 2) * lp_p - 1, False)
    hi = (2 * p.alpha + p.beta + 1) * lp_p - 1
    lo = _lower_b(p) if c == "b" else -p.beta * lp_p
    return DeltaInterval(lo, _lower_weakened(p), hi, False)


def necessary_conditions(p: Params, w: WeightedLp) -> list[tuple[str, bool, str]]:
    """(code, holds, text) for each necessary condition; codes a1, a2, a3, b1, b2
    name the extremal family that witnesses a violation."""
    a, b, q, d = p.alpha, p.beta, w.p, w.delta
    return [
        ("a2", gate_ok(p, q), f"1/p < alpha+beta+1/2 ({1 / q} vs {p.nu + 0.5})"),
        ("b2", d > -1, "delta > -1"),
        ("a3", -b * q <= d, f"-beta p <= delta ({-b * q} vs {d})"),
        ("b1", d < (2 * a + 2) * q - 1, f"delta < (2 alpha + 2) p - 1 (bound {(2 * a + 2) * q - 1})"),
        ("a1", d < (2 * a + b + 1) * q - 1, f"delta < (2 alpha + beta + 1) p - 1 (bound {(2 * a + b + 1) * q - 1})"),
    ]


def _necessary_failures(p: Params, w: WeightedLp) -> list[str]:
    return [f"{text} fails" for _, ok, text in necessary_conditions(p, w) if not ok]


def necessary_ok(p: Params, w: WeightedLp) -> bool:
    return not _necessary_failures(p, w)


def classify(p: Params, w: WeightedLp) -> Verdict:
    iv = sufficient_delta_interval(p, w.p)
    if w.delta in iv:
        return Verdict(VerdictTag.BOUNDED, f"case ({_case(p)}): delta in {iv}")
    bad = _necessary_failures(p, w)
    if bad:
        return Verdict(VerdictTag.UNBOUNDED, "; ".join(bad))
    return Verdict(VerdictTag.UNKNOWN, f"necessary conditions hold but delta not in sufficient range {iv}")


def natural_weight_p_range(p: Params) -> DeltaInterval:
    """Admissible 1/p for the natural weight delta = 2 alpha + 1, inside (0, 1)."""
    hi = min(p.nu + 0.5, (2 * p.alpha + p.beta + 1) / (2 * p.alpha + 2), 1.0)
    if p.beta < 0:
        # alpha + beta > -1/2 with beta < 0 forces 2 alpha + 1 > 0
        lo, lc = -p.beta / (2 * p.alpha + 1), _lower_weakened(p)
    else:
        lo, lc = 0.0, False
    if lo <= 0.0:
        lo, lc = 0.0, False
    return DeltaInterval(lo, lc, hi, False)


# ---------------------------------------------------------------- dimension n pictures


@dataclass(frozen=True)
class BoundaryCurve:
    """beta-threshold as a polyline in u = 1/p over [u_lo, u_hi]."""

    name: str
    vertices: tuple

    @property
    def u_range(self):
        return self.vertices[0][0], self.vertices[-1][0]

    def threshold(self, u):
        us, bs = zip(*self.vertices)
        lo, hi = self.u_range
        u = np.asarray(u, dtype=float)
        if np.any((u < lo) | (u > hi)):
            raise DomainError(f"{self.name} is defined for 1/p in [{lo}, {hi}]")
        return np.interp(u, us, bs)

    def sample(self, n: int):
        lo, hi = self.u_range
        u = np.unique(np.concatenate([np.linspace(lo, hi, n), [v[0] for v in self.vertices]]))
        return u, self.threshold(u)


def figure1_curves(n: int):
    """Boundary curves of the unweighted L^p(R^n) results in the (1/p, beta) plane.

    Returns ``(curves, corners)``: curves maps "stein" (n >= 3 only), "myz"
    and "radial" to BoundaryCurve; corners maps O, A, B, C to points.
    """
    if int(n) != n or n < 2:
        raise DomainError("n must be an integer >= 2")
    n = int(n)
    O = (0.0, 0.0)
    A = ((n - 1) / (2 * n + 2), -((n - 1) ** 2) / (2 * n + 2))
    B = (0.5, (2 - n) / 2)
    C = ((n - 1) / (2 * n - 1), -((n - 1) ** 2) / (2 * n - 1))
    top = (1.0, 1.0)
    curves = {
        # p > 2 only
        "myz": BoundaryCurve("myz", (O, A, B)),
        "radial": BoundaryCurve("radial", (O, C, top)),
    }
    if n >= 3:
        curves["stein"] = BoundaryCurve("stein", (O, B, top))
    return curves, {"O": O, "A": A, "B": B, "C": C}


def radial_condition_1_8(n: int, lp_p: float):
    """(beta threshold, predicate telling whether beta = threshold is admitted) for radial L^p(R^n)."""
    if int(n) != n or n < 2:
        raise DomainError("n must be an integer >= 2")
    WeightedLp(lp_p, 0.0)
    u = 1.0 / lp_p
    thr = 1 - n + n * u if lp_p <= (2 * n - 1) / (n - 1) else (1 - n) * u

    def weak_allowed(beta: float) -> bool:
        return is_natural(-beta) or beta > (3 - n) / 2

    return thr, weak_allowed
