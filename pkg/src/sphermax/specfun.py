"""Real-order special functions: gamma, Bessel J and the spherical-mean multiplier.

Everything here is scalar and pure Python so that the accuracy claims can be
checked against an extended-precision oracle without depending on a compiled
library.  The vectorised hot loops of the quadrature code use
``scipy.special.jv`` instead; the test-suite cross-checks the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "SpecFunAccuracy",
    "DEFAULT_ACCURACY",
    "gamma",
    "bessel_j",
    "multiplier_m",
    "is_nonpositive_integer",
]


@dataclass(frozen=True)
class SpecFunAccuracy:
    """Accuracy knobs.

    ``series_crossover`` is the argument below which the ascending series is
    used for every order.
    """

    rel_tol: float = 1e-15
    series_crossover: float = 12.0

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-8):
            raise DomainError(f"rel_tol must lie in (0, 1e-8], got {self.rel_tol}")
        if not self.series_crossover > 0:
            raise DomainError("series_crossover must be positive")


DEFAULT_ACCURACY = SpecFunAccuracy()

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_P = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def is_nonpositive_integer(x: float, tol: float = 0.0) -> bool:
    return x <= tol and abs(x - round(x)) <= tol


def _sinpi(x: float) -> float:
    # sin(pi x) with the argument reduced exactly before multiplying by pi
    n = round(x)
    r = x - n
    s = math.sin(math.pi * r)
    return -s if n % 2 else s


def gamma(x: float) -> float:
    """Gamma function for real ``x`` off the poles {0, -1, -2, ...}."""
    x = float(x)
    if is_nonpositive_integer(x):
        raise DomainError(f"gamma has a pole at {x}")
    if x < 0.5:
        # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return math.pi / (_sinpi(x) * gamma(1.0 - x))
    if x == round(x) and x <= 171:
        return float(math.factorial(int(x) - 1))
    y = x - 1.0
    acc = _LANCZOS_P[0]
    for i in range(1, len(_LANCZOS_P)):
        acc += _LANCZOS_P[i] / (y + i)
    t = y + _LANCZOS_G + 0.5
    # split the power to delay overflow for large arguments
    half = t ** ((y + 0.5) / 2.0)
    return _SQRT_2PI * half * half * math.exp(-t) * acc


def _check_order(nu: float, x: float) -> None:
    if not nu > -1.0:
        raise DomainError(f"Bessel order must exceed -1, got {nu}")
    if x < 0:
        raise DomainError(f"Bessel argument must be non-negative, got {x}")
    if x == 0 and nu < 0:
        raise DomainError("J_nu(0) is infinite for negative order")


def _scaled_series(nu: float, x: float, rel_tol: float) -> float:
    """Sum_k (-1)^k (x/2)^(2k) / (k! Gamma(k+nu+1)), i.e. J_nu(x) / (x/2)^nu."""
    q = -0.25 * x * x
    term = 1.0 / gamma(nu + 1.0)
    terms = [term]
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + nu))
        terms.append(term)
        if k > 0.5 * x and abs(term) <= rel_tol * abs(math.fsum(terms)) * 1e-2:
            break
        if k > 500:
            break
    return math.fsum(terms)


def _hankel_pq(nu: float, x: float) -> tuple[float, float]:
    """Optimally truncated P, Q of the Hankel expansion."""
    mu = 4.0 * nu * nu
    p_terms = [1.0]
    q_terms = []
    b = 1.0
    prev = math.inf
    for k in range(1, 200):
        b *= (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        ab = abs(b)
        if (2 * k - 1) ** 2 > mu and ab > prev:
            break
        if k % 2 == 1:
            q_terms.append(b if (k // 2) % 2 == 0 else -b)
        else:
            p_terms.append(b if (k // 2) % 2 == 0 else -b)
        if ab < 1e-17 or b == 0.0:
            break
        prev = ab
    return math.fsum(p_terms), math.fsum(q_terms)


def _asymptotic(nu: float, x: float) -> float:
    p, q = _hankel_pq(nu, x)
    chi = x - (0.5 * nu + 0.25) * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(chi) - q * math.sin(chi))


def _recurrence(nu: float, x: float) -> float:
    """J_nu(x) for large x with 2|nu| > x, from two low orders."""
    n = math.floor(nu)
    mu0 = nu - n
    j0 = _asymptotic(mu0, x)
    j1 = _asymptotic(mu0 + 1.0, x)
    if nu <= x:
        # upward recurrence is stable while the order stays below x
        a, b = j0, j1
        for k in range(1, n):
            a, b = b, 2.0 * (mu0 + k) / x * b - a
        return j0 if n == 0 else b
    # Miller: recur downward from far above, then match the two low orders
    top = n + int(x) + 40
    hi, cur = 0.0, 1e-250
    vals = {}
    for k in range(top, 0, -1):
        lo = 2.0 * (mu0 + k) / x * cur - hi
        hi, cur = cur, lo
        vals[k - 1] = lo
        if abs(lo) > 1e200:
            scale = 1e-200
            hi *= scale
            cur *= scale
            vals = {i: v * scale for i, v in vals.items()}
    y0, y1 = vals[0], vals[1]
    s = (j0 * y0 + j1 * y1) / (y0 * y0 + y1 * y1)
    return s * vals[n]


def bessel_j(nu: float, x: float, acc: SpecFunAccuracy = DEFAULT_ACCURACY) -> float:
    """Bessel function of the first kind J_nu(x), real order nu > -1, x >= 0."""
    nu = float(nu)
    x = float(x)
    _check_order(nu, x)
    if x == 0.0:
        return 1.0 if nu == 0 else 0.0
    if x < acc.series_crossover:
        return (0.5 * x) ** nu * _scaled_series(nu, x, acc.rel_tol)
    if x >= 2.0 * abs(nu):
        return _asymptotic(nu, x)
    return _recurrence(nu, x)


def multiplier_m(nu: float, s: float, acc: SpecFunAccuracy = DEFAULT_ACCURACY) -> float:
    """Radial multiplier 2^nu Gamma(nu+1) J_nu(s) / s^nu, equal to 1 at s = 0."""
    nu = float(nu)
    s = float(s)
    if not nu > -0.5:
        raise DomainError(f"multiplier order must exceed -1/2, got {nu}")
    if s < 0:
        raise DomainError("multiplier argument must be non-negative")
    if s < acc.series_crossover:
        return gamma(nu + 1.0) * _scaled_series(nu, s, acc.rel_tol)
    return 2.0 ** nu * gamma(nu + 1.0) * bessel_j(nu, s, acc) / s ** nu
