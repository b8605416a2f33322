"""The kernel K_t(x, z) of the generalized spherical mean on radial profiles.

    K_t(x, z) = 2^nu Gamma(nu+1) / (t^nu (xz)^alpha)
                * int_0^inf J_nu(ty) J_alpha(xy) J_alpha(zy) y^(1-nu) dy,   nu = alpha + beta

Besides the oscillatory quadrature of the defining integral, two exact routes
are available and used as fast evaluators:

* beta = 0, alpha > -1/2: the Gegenbauer closed form
  c (txz)^(-2 alpha) ([t^2-(x-z)^2][(x+z)^2-t^2])^(alpha-1/2), supported in E;
  for beta = -1, -2, ... it is differentiated symbolically through
  K^(beta-1) = K^beta + t/(2(alpha+beta)) dK^beta/dt.
* beta > 0, alpha > -1/2: Sonine's finite integral writes K^beta as a
  weighted average of the beta = 0 kernel over radii tr, 0 < r < 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
import sympy

from .errors import DomainError
from .oscillatory import DEFAULT_QUAD, QuadSpec, triple_bessel_integral
from .quadrature import tanh_sinh
from .specfun import gamma

__all__ = [
    "Params",
    "Region",
    "QuadSpec",
    "DEFAULT_QUAD",
    "INT_TOL",
    "is_natural",
    "classify_region",
    "kernel_quadrature",
    "kernel_exact",
    "kernel_value",
    "has_exact_kernel",
    "envelope_phi",
    "envelope_psi",
    "kernel_case_bound",
    "case_id",
    "region_relations_report",
    "triangle_product",
    "triangle_product_swapped",
]

INT_TOL = 1e-12


def is_natural(v: float, tol: float = INT_TOL) -> bool:
    """True when ``v`` is in {0, 1, 2, ...} up to ``tol``."""
    return v > -tol and abs(v - round(v)) <= tol


@dataclass(frozen=True)
class Params:
    alpha: float
    beta: float

    def __post_init__(self):
        if not self.alpha > -1:
            raise DomainError(f"alpha must exceed -1, got {self.alpha}")
        if not self.alpha + self.beta > -0.5:
            raise DomainError(f"alpha + beta must exceed -1/2, got {self.alpha + self.beta}")

    @property
    def nu(self) -> float:
        return self.alpha + self.beta

    @property
    def minus_beta_natural(self) -> bool:
        return is_natural(-self.beta)


class Region(str, Enum):
    NULL = "Null"
    E1 = "E1"
    E2 = "E2"
    E3 = "E3"
    F1 = "F1"
    F2PRIME = "F2prime"
    F2DOUBLEPRIME = "F2doubleprime"
    BOUNDARY = "Boundary"

    @property
    def in_e(self) -> bool:
        return self in (Region.E1, Region.E2, Region.E3)

    @property
    def in_f(self) -> bool:
        return self in (Region.F1, Region.F2PRIME, Region.F2DOUBLEPRIME)


def _check_positive(t, x, z):
    if not (t > 0 and x > 0 and z > 0):
        raise DomainError(f"t, x, z must be positive, got {(t, x, z)}")


def classify_region(t: float, x: float, z: float, band: float = 0.0) -> Region:
    _check_positive(t, x, z)
    lo, hi = abs(x - z), x + z
    width = band * (t + x + z)
    if abs(t - lo) <= width or abs(t - hi) <= width:
        return Region.BOUNDARY
    if t < lo:
        return Region.NULL
    if t < hi:
        if t < x / 2:
            return Region.E1
        if t < 3 * x:
            return Region.E2
        return Region.E3
    if t < 3 * x:
        return Region.F1
    if z < (t - x) / 2:
        return Region.F2PRIME
    return Region.F2DOUBLEPRIME


def triangle_product(t, x, z):
    """[t^2 - (x-z)^2][(x+z)^2 - t^2], positive exactly on E."""
    return (t - x + z) * (t + x - z) * (x + z - t) * (x + z + t)


def triangle_product_swapped(t, x, z):
    """The same quantity written as [(t+x)^2 - z^2][z^2 - (x-t)^2]."""
    return ((t + x) ** 2 - z ** 2) * (z ** 2 - (x - t) ** 2)


# ---------------------------------------------------------------- quadrature


def kernel_quadrature(p: Params, t: float, x: float, z: float,
                      q: QuadSpec = DEFAULT_QUAD, return_error: bool = False):
    """K_t(x, z) from the defining oscillatory integral.

    Triples inside the singular band around t = |x-z| or t = x+z are refused
    with ``DomainError``; use the envelopes there.
    """
    _check_positive(t, x, z)
    if classify_region(t, x, z, q.singular_band) is Region.BOUNDARY:
        raise DomainError("(t, x, z) lies in the singular band")
    nu, a = p.nu, p.alpha
    integral, err = triple_bessel_integral((nu, a, a), (t, x, z), 1.0 - nu, q)
    pref = 2.0 ** nu * gamma(nu + 1.0) / (t ** nu * (x * z) ** a)
    if return_error:
        return pref * integral, abs(pref) * err
    return pref * integral


# ---------------------------------------------------------------- exact routes


def _gegenbauer_const(alpha: float) -> float:
    return gamma(alpha + 1.0) / (math.sqrt(math.pi) * gamma(alpha + 0.5)) * 2.0 ** (1.0 - 2.0 * alpha)


def _kernel_beta0(alpha, t, x, z):
    t, x, z = np.broadcast_arrays(np.asarray(t, float), np.asarray(x, float), np.asarray(z, float))
    P = triangle_product(t, x, z)
    out = np.zeros(P.shape)
    m = P > 0
    out[m] = _gegenbauer_const(alpha) * (t[m] * x[m] * z[m]) ** (-2 * alpha) * P[m] ** (alpha - 0.5)
    return out


@lru_cache(maxsize=None)
def _negative_integer_kernel(alpha: float, k: int):
    """Lambdified K^(-k) as a function of (t, x, z, P), P the triangle product.

    Keeping P as a separate argument lets callers form it without cancellation.
    """
    t, x, z, P = sympy.symbols("t x z P", positive=True)
    a = sympy.Float(alpha, 30)
    P_expr = (t - x + z) * (t + x - z) * (x + z - t) * (x + z + t)
    dP = sympy.expand(sympy.diff(P_expr, t))
    expr = sympy.Float(_gegenbauer_const(alpha), 30) * (t * x * z) ** (-2 * a) * P ** (a - sympy.Rational(1, 2))
    for j in range(k):
        # total t-derivative, P depending on t through P_expr
        d = sympy.diff(expr, t) + dP * sympy.diff(expr, P)
        expr = expr + t / (2 * (a - j)) * d
    return sympy.lambdify((t, x, z, P), expr, "numpy")


def _kernel_negint(alpha, k, t, x, z, P=None):
    t, x, z = np.broadcast_arrays(np.asarray(t, float), np.asarray(x, float), np.asarray(z, float))
    if P is None:
        P = triangle_product(t, x, z)
    P = np.broadcast_to(np.asarray(P, float), t.shape)
    out = np.zeros(P.shape)
    m = P > 0
    if m.any():
        out[m] = _negative_integer_kernel(float(alpha), int(k))(t[m], x[m], z[m], P[m])
    return out


def _kernel_sonine(p: Params, t: float, x: float, z: float, tol: float = 1e-13) -> float:
    a, b = p.alpha, p.beta
    lo = abs(x - z)
    hi = min(t, x + z)
    if hi <= lo:
        return 0.0
    const = 2.0 * gamma(a + b + 1.0) / (gamma(b) * gamma(a + 1.0))
    c0 = _gegenbauer_const(a)

    top_is_t = t < x + z

    def f(s, da, db):
        # distances to the singular points computed without cancellation
        above = da
        below = (t - (x + z)) + db if not top_is_t else db
        cap = x + z - s if top_is_t else db
        P = above * (s + lo) * cap * (x + z + s)
        k0 = c0 * (s * x * z) ** (-2 * a) * P ** (a - 0.5)
        return k0 * s ** (2 * a + 1) * (below * (t + s) / (t * t)) ** (b - 1.0)

    val, _ = tanh_sinh(f, lo, hi, tol=tol, max_level=10, distances=True)
    return const * val / t ** (2 * a + 2)


def has_exact_kernel(p: Params) -> bool:
    if p.alpha <= -0.5:
        return False
    return p.beta > 0 or p.minus_beta_natural


def kernel_exact(p: Params, t, x, z):
    """Exact-route kernel (closed form or Sonine integral); vectorised in t, x, z."""
    if not has_exact_kernel(p):
        raise DomainError("no exact route for these parameters")
    if p.minus_beta_natural:
        k = int(round(-p.beta))
        out = _kernel_beta0(p.alpha, t, x, z) if k == 0 else _kernel_negint(p.alpha, k, t, x, z)
        return out if out.ndim else float(out)
    t, x, z = np.broadcast_arrays(np.asarray(t, float), np.asarray(x, float), np.asarray(z, float))
    out = np.array([_kernel_sonine(p, *v) for v in zip(t.ravel(), x.ravel(), z.ravel())])
    out = out.reshape(t.shape)
    return out if out.ndim else float(out)


def kernel_value(p: Params, t: float, x: float, z: float, q: QuadSpec = DEFAULT_QUAD) -> float:
    """Best available scalar evaluation: exact route if any, else quadrature."""
    if has_exact_kernel(p):
        return float(kernel_exact(p, t, x, z))
    if classify_region(t, x, z) is Region.NULL:
        return 0.0
    return kernel_quadrature(p, t, x, z, q)


# ---------------------------------------------------------------- envelopes


def envelope_phi(p: Params, t: float, x: float, z: float) -> float:
    r = classify_region(t, x, z)
    a, b = p.alpha, p.beta
    if r.in_e:
        return (x * z) ** (-a - 0.5) / t ** (2 * a + 2 * b) * (t * t - (x - z) ** 2) ** (a + b - 0.5)
    if r.in_f:
        return (t * t - (x - z) ** 2) ** (b - 1.0) / t ** (2 * a + 2 * b)
    return 0.0


def envelope_psi(p: Params, t: float, x: float, z: float) -> float:
    r = classify_region(t, x, z)
    a, b = p.alpha, p.beta
    if r.in_e:
        return (x * z) ** (-2 * a - b) / t ** (2 * a + 2 * b) * triangle_product(t, x, z) ** (a + b - 0.5)
    if r.in_f:
        return ((t * t - (x - z) ** 2) ** (-a - 0.5) * (t * t - (x + z) ** 2) ** (a + b - 0.5)
                / t ** (2 * a + 2 * b))
    return 0.0


def case_id(p: Params) -> int:
    """Which of the eight kernel-estimate regimes the parameters fall into."""
    a, b = p.alpha, p.beta
    nu = a + b
    if p.minus_beta_natural:
        return 1
    if nu > 0.5 + INT_TOL:
        return 3 if abs(2 * a + b) <= INT_TOL else 2
    if abs(nu - 0.5) <= INT_TOL:
        return 5 if abs(b - 1.0) <= INT_TOL else 4
    if abs(b - 1.0) <= INT_TOL:
        return 7
    if is_natural(a + 0.5):
        return 8
    return 6


def kernel_case_bound(p: Params, t: float, x: float, z: float) -> tuple[int, float]:
    """Right-hand side of the regime's kernel estimate (constants omitted)."""
    r = classify_region(t, x, z)
    if not (r.in_e or r.in_f):
        raise DomainError(f"kernel bound undefined in region {r.value}")
    cid = case_id(p)
    a, b = p.alpha, p.beta
    dm = t * t - (x - z) ** 2
    dp = t * t - (x + z) ** 2  # negative in E
    xz = x * z
    if cid == 1:
        val = envelope_psi(p, t, x, z) if r.in_e else 0.0
    elif cid == 2:
        val = envelope_phi(p, t, x, z)
    elif cid == 3:
        val = t ** (2 * a) * (dm * abs(dp)) ** (-a - 0.5)
    elif cid == 4:
        if r.in_e:
            val = xz ** (-a - 0.5) / t * math.log(8 * xz / -dp)
        else:
            val = dm ** (-a - 0.5) / t * math.log(2 * dm / dp)
    elif cid == 5:
        val = 1.0 / t
    elif cid == 7:
        if r.in_e:
            val = xz ** (-2 * a - 1) / t ** (2 * a + 2) * triangle_product(t, x, z) ** (a + 0.5)
        else:
            val = 1.0 / t ** (2 * a + 2)
    elif cid == 8:
        if r.in_e:
            val = envelope_phi(p, t, x, z)
        else:
            val = envelope_psi(p, t, x, z)
    else:
        val = envelope_psi(p, t, x, z)
    return cid, float(val)


def region_relations_report(t: float, x: float, z: float):
    """Both sides and the ratio of each comparability relation valid at (t, x, z)."""
    r = classify_region(t, x, z)
    dm = t * t - (x - z) ** 2
    dp = t * t - (x + z) ** 2
    rows = []

    def add(name, lhs, rhs):
        rows.append((name, lhs, rhs, lhs / rhs))

    if r is Region.E1:
        add("E1:x~z", x, z)
    elif r is Region.E2:
        add("E2:t2-(x-z)2<~tz", dm, t * z)
    elif r is Region.E3:
        add("E3:t2-(x-z)2<~tx", dm, t * x)
        add("E3:z~t", z, t)
    elif r is Region.F1:
        add("F1:t2-(x-z)2~x(t-x)", dm, x * (t - x))
        add("F1:x(t-x)~x(t-x+z)", x * (t - x), x * (t - x + z))
        add("F1:t2-(x+z)2~x(t-x-z)", dp, x * (t - x - z))
    if r in (Region.F2PRIME, Region.F2DOUBLEPRIME):
        add("F2:t2-(x-z)2~t(t+x-z)", dm, t * (t + x - z))
        add("F2:t2-(x+z)2~t(t-x-z)", dp, t * (t - x - z))
    if r is Region.F2PRIME:
        add("F2':t2-(x-z)2~t2", dm, t * t)
        add("F2':t2-(x+z)2~t2", dp, t * t)
    elif r is Region.F2DOUBLEPRIME:
        add("F2'':z~t", z, t)
        add("F2'':t~t-x", t, t - x)
        add("F2'':t-x~t-(x-z)", t - x, t - (x - z))
        add("F2'':t+x-z~t-z", t + x - z, t - z)
    return rows
