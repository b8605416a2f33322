import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from sphermax.bounds import VerdictTag, WeightedLp, classify
from sphermax.errors import DivergenceSignal, DomainError
from sphermax.kernel import Params, kernel_value
from sphermax.probe import (EpsRegion, EpsRegionSpec, Family, beta_integral, eval_aux, find_eps,
                            in_eps_region, lp_norm, unboundedness_sweep, violated_codes,
                            witness_family)
from sphermax.profile import Profile

# ---- beta integral


def test_beta_examples():
    assert beta_integral(0, 1, 2) == pytest.approx((1.5, 1.5), rel=1e-13)
    num, closed = beta_integral(0.5, 0, 1)
    assert num == pytest.approx(math.pi / 16, rel=1e-12) and closed == pytest.approx(math.pi / 16, rel=1e-13)
    num, closed = beta_integral(-0.4, 0.5, 3)
    assert num == pytest.approx(closed, rel=1e-8)


def test_beta_against_scipy_beta():
    # substitution s = (z^2 - A^2)/(B^2 - A^2) turns it into B(g+1, g+1)/2
    g, A, B = 1.7, 0.3, 2.2
    want = special.beta(g + 1, g + 1) / 2 * (B * B - A * A) ** (2 * g + 1)
    assert beta_integral(g, A, B)[0] == pytest.approx(want, rel=1e-12)


def test_beta_domain():
    with pytest.raises(DomainError):
        beta_integral(-1.0, 0, 1)
    with pytest.raises(DomainError):
        beta_integral(0.5, 2, 1)


@settings(max_examples=60, deadline=None)
@given(st.floats(-0.9, 5), st.floats(0, 3), st.floats(0.01, 3))
def test_beta_agreement(g, A, width):
    num, closed = beta_integral(g, A, A + width)
    assert num == pytest.approx(closed, rel=1e-8)


# ---- regions


def test_eps_region_examples():
    s = EpsRegionSpec(0.1)
    assert in_eps_region(s, 3 + 0.01 * 2, 4, 1) is EpsRegion.E_EPS
    assert in_eps_region(s, 100, 1, 1) is EpsRegion.F_EPS
    assert in_eps_region(s, 1.1, 1, 1.2) is EpsRegion.NEITHER
    # below |x - z| belongs to neither E nor F
    assert in_eps_region(s, 0.5, 4, 1) is EpsRegion.NEITHER


def test_eps_spec_validation():
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(DomainError):
            EpsRegionSpec(bad)


@pytest.mark.parametrize("ab", [(0.0, 0.0), (1.0, -1.0), (0.5, -0.5), (1.5, 0.7)])
def test_kernel_sign_constant_on_eps_pieces(ab):
    p = Params(*ab)
    eps = find_eps(p)
    spec = EpsRegionSpec(eps)
    rng = np.random.default_rng(123)
    signs = {}
    for _ in range(40):
        x, z = np.exp(rng.uniform(-2, 2, 2))
        r = min(eps * math.sqrt(x * z) * rng.uniform(0.05, 0.95), 0.9 * min(x, z))
        pieces = {"E-": abs(x - z) + r, "E+": x + z - r, "F-": x + z + r}
        for name, t in pieces.items():
            assert in_eps_region(spec, t, x, z) is not EpsRegion.NEITHER
            k = kernel_value(p, t, x, z)
            if abs(k) > 1e-8:
                signs.setdefault(name, set()).add(k > 0)
    assert all(len(v) == 1 for v in signs.values())


# ---- auxiliary operators


def test_u1_a1_decay():
    p = Params(0.5, 0.0)
    f = Family("A1").profile(p)
    scaled = [eval_aux("U1", p, f, x - 1, x) * x ** 2 for x in (20.0, 50.0, 100.0, 200.0)]
    assert min(scaled) > 1.0 and max(scaled) / min(scaled) < 1.1


@pytest.mark.parametrize("ab", [(0.5, 0.0), (0.3, 0.4), (-0.3, 1.2), (1.0, -0.3)])
def test_v2_b2_order_one(ab):
    p = Params(*ab)
    f = Family("B2", delta=-1.0).profile(p)
    vals = [eval_aux("V2", p, f, 2.0, x) for x in (1e-3, 0.1, 0.5, 0.9, 0.999)]
    assert min(vals) > 0 and max(vals) / min(vals) < 2


def test_v2_matches_direct_quadrature():
    p = Params(0.5, 0.3)
    f = Profile.indicator(0.2, 0.9)
    t, x = 2.0, 0.5

    def g(z):
        return ((t - x + z) * (t + x - z)) ** (p.beta - 1) * z ** 2
    want = integrate.quad(g, 0.2, 0.9, epsabs=0, epsrel=1e-13)[0] / t ** (2 * p.nu)
    assert eval_aux("V2", p, f, t, x) == pytest.approx(want, rel=1e-11)


def test_a2_diverges_in_u1():
    p = Params(0.5, 0.0)
    with pytest.raises(DivergenceSignal):
        eval_aux("U1", p, Family("A2").profile(p), 9.0, 10.0)


def test_v_vanishes_for_x_at_least_t():
    p = Params(0.5, 0.0)
    assert eval_aux("V1", p, Profile.gaussian(), 1.0, 2.0) == 0.0


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(0.5, 0.3), (1.0, -0.5), (0.0, 0.7), (2.0, 1.5)]),
       st.floats(-2, 2), st.floats(-2, 2), st.integers(0, 2))
def test_log_versions_dominate(ab, lt, lx, k):
    # the log factors are at least log 2
    p = Params(*ab)
    f = [Profile.indicator(0.5, 2), Profile.gaussian(), Profile.power(0.5, 0, 3)][k]
    t, x = math.exp(lt), math.exp(lx)
    C = 1 / math.log(2)
    assert eval_aux("U2", p, f, t, x) <= C * eval_aux("U2log", p, f, t, x) * (1 + 1e-10)
    assert eval_aux("V2", p, f, t, x) <= C * eval_aux("V2log", p, f, t, x) * (1 + 1e-10)


# ---- families and norms


def test_family_validation():
    with pytest.raises(DomainError):
        Family("A3", N=2)
    with pytest.raises(DomainError):
        Family("B2", delta=-0.5)
    with pytest.raises(DomainError):
        Family("B1").profile(Params(0, 0))
    with pytest.raises(ValueError):
        Family("C1")


def test_lp_norm_closed_forms():
    p = Params(0.0, 0.0)
    w = WeightedLp(4, -0.5)
    f = Family("A3").profile(p, N=10)
    assert lp_norm(f, w) == pytest.approx(((11 ** 0.5 - 9 ** 0.5) / 0.5) ** 0.25, rel=1e-13)
    # B2 at delta = -1: int_0^1 z^(-delta p + delta) = 1 / (1 - delta (p - 1))
    w = WeightedLp(3, -1.0)
    assert lp_norm(Family("B2").profile(p, delta=-1.0), w) == pytest.approx((1 / 3) ** (1 / 3), rel=1e-12)
    assert lp_norm(Profile.power(-0.5, 0, 1), WeightedLp(2, 0)) == math.inf


def test_witness_codes():
    assert [witness_family(c).value for c in ("a1", "a2", "a3", "b1", "b2")] == ["A1", "A2", "A3", "B1", "B2"]


# ---- sweeps


def _ratios(rows):
    return [r.ratio for r in rows]


def test_a3_sweep_follows_power_trend():
    p, w = Params(0.0, 0.0), WeightedLp(4, -0.5)
    rows = unboundedness_sweep(p, w, "A3", [10, 30, 100])
    r = _ratios(rows)
    assert r[0] < r[1] < r[2]
    # ||f_N|| decays like N^(-1/8) while ||M_* f_N|| stays of order one
    assert r[2] / r[0] == pytest.approx(10 ** 0.125, rel=0.15)


def test_a1_inside_region_is_flat():
    rows = unboundedness_sweep(Params(0.0, 0.0), WeightedLp(4, 1.0), "A1", [10, 30, 100])
    r = _ratios(rows)
    assert max(r) / min(r) < 1.05


def test_a2_sweep_reports_infinity():
    rows = unboundedness_sweep(Params(0.0, 0.0), WeightedLp(1.5, 0.0), "A2", [10, 30])
    assert all(r.ratio == math.inf for r in rows)


@pytest.mark.parametrize("ab, lp, delta", [
    ((0.0, 0.0), 4, -1.5),
    ((1.0, -1.0), 2, 1.0),
    ((0.0, 0.0), 1.5, 0.0),
])
def test_unbounded_verdicts_are_witnessed(ab, lp, delta):
    p, w = Params(*ab), WeightedLp(lp, delta)
    assert classify(p, w).tag is VerdictTag.UNBOUNDED
    grew = []
    for code in violated_codes(p, w):
        fam = witness_family(code)
        if fam.value == "A1":
            continue
        r = _ratios(unboundedness_sweep(p, w, fam, [10, 100, 1000] if fam.value != "A3" else [10, 30, 100]))
        grew.append(r[-1] == math.inf or all(b > a for a, b in zip(r, r[1:])))
    assert grew and any(grew)
