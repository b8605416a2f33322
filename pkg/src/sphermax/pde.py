"""The generalized spherical means as solution operators of radial Cauchy problems.

EPD_position: u(t, x) = M_t f(x), the solution with initial position f and
zero initial velocity.  Wave_speed: u(t, x) = t M_t g, which for alpha = 1/2,
beta = 0 is the Kirchhoff formula of the three-dimensional wave equation with
initial speed g.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .kernel import Params
from .oscillatory import DEFAULT_QUAD, QuadSpec
from .profile import Profile
from .transform import mean_via_kernel

__all__ = ["Role", "EvolutionSpec", "evolve", "convergence_report", "ConvergenceRow", "loglog_slope"]


class Role(str, Enum):
    EPD_POSITION = "EPD_position"
    WAVE_SPEED = "Wave_speed"


@dataclass(frozen=True)
class EvolutionSpec:
    params: Params
    role: Role
    data: Profile

    def __post_init__(self):
        object.__setattr__(self, "role", Role(self.role))


def evolve(spec: EvolutionSpec, t: float, x: float, q: QuadSpec = DEFAULT_QUAD) -> float:
    m = mean_via_kernel(spec.params, spec.data, t, x, q)
    return t * m if spec.role is Role.WAVE_SPEED else m


class ConvergenceRow(NamedTuple):
    t: float
    sup_error: float


def convergence_report(spec: EvolutionSpec, x_window, t_seq, q: QuadSpec = DEFAULT_QUAD,
                       n_x: int = 41, extra_x=()) -> list[ConvergenceRow]:
    """sup over an x grid in the window of |M_t f(x) - f(x)| for each t.

    The grid is uniform with ``n_x`` points plus the breakpoints of f inside
    the window and any ``extra_x``.
    """
    lo, hi = map(float, x_window)
    if not 0 < lo < hi:
        raise DomainError("x_window must be a compact interval in (0, inf)")
    ts = [float(t) for t in t_seq]
    if not ts or any(t <= 0 for t in ts) or any(b >= a for a, b in zip(ts, ts[1:])):
        raise DomainError("t_seq must be positive and strictly decreasing")
    pos = EvolutionSpec(spec.params, Role.EPD_POSITION, spec.data)
    xs = np.linspace(lo, hi, n_x)
    more = [c for c in list(spec.data.breakpoints()) + list(extra_x) if lo <= c <= hi]
    xs = np.unique(np.concatenate([xs, more]))
    # pieces are open intervals: read f at a breakpoint as the mean of its one-sided limits
    fx = 0.5 * (spec.data(np.nextafter(xs, 0)) + spec.data(np.nextafter(xs, np.inf)))
    rows = []
    for t in ts:
        err = max(abs(evolve(pos, t, x, q) - f0) for x, f0 in zip(xs, fx))
        rows.append(ConvergenceRow(t, float(err)))
    return rows


def loglog_slope(rows) -> float:
    """Least-squares slope of log sup_error against log t."""
    t = np.log([r.t for r in rows])
    e = np.log([r.sup_error for r in rows])
    return float(np.polyfit(t, e, 1)[0])
