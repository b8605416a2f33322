import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize

from sphermax.errors import DivergenceSignal, DomainError
from sphermax.profile import Profile
from sphermax.special_ops import Boundedness, OpSpec, default_theta, eval_special, is_bounded_on
from sphermax.transform import TGrid

ONE = Profile.constant(1)
BOX = Profile.indicator(2, 4)
Y, N, S = Boundedness.YES, Boundedness.NO, Boundedness.SUFFICIENT_ONLY


# ---- examples


def test_constant_examples():
    assert eval_special(OpSpec("D"), ONE, 1.0) == pytest.approx(0.5, abs=1e-12)
    assert eval_special(OpSpec("H", 2), ONE, 3.0) == pytest.approx(0.5, abs=1e-14)
    assert eval_special(OpSpec("R"), ONE, 5.0) == pytest.approx(1.0, abs=1e-12)
    assert eval_special(OpSpec("L"), ONE, 2.0) == pytest.approx(1.0, abs=1e-8)
    assert eval_special(OpSpec("N", 1.5), ONE, 2.0) == pytest.approx(2 / 3, abs=1e-12)


def test_t_against_dense_oracle():
    def inner(t):
        lo, hi = max(t / 2, 2.0), min(t, 4.0)
        if not lo < hi:
            return 0.0
        return integrate.quad(lambda z: z / (t - z + 1) ** 2, lo, hi, epsabs=1e-14)[0]

    ts = np.linspace(2.0, 10.0, 8001)[1:]
    vals = np.array([inner(t) for t in ts])
    i = int(np.argmax(vals))
    best = -optimize.minimize_scalar(lambda t: -inner(t), bounds=(ts[i - 1], ts[i + 1]),
                                     method="bounded", options={"xatol": 1e-10}).fun
    oracle = max(best, vals.max())
    got = eval_special(OpSpec("T", 2), BOX, 1.0)
    assert got == pytest.approx(oracle, rel=1e-9)
    # the maximiser is the kink t = 4, where the integral is 10/3 - log 3
    assert got == pytest.approx(10 / 3 - math.log(3), rel=1e-13)


def test_box_values():
    # (b^2 - a^2)^-1 int_a^b z chi_(2,4) is largest as a -> x = 1, b = 4
    assert eval_special(OpSpec("D"), BOX, 1.0) == pytest.approx(0.4, rel=1e-6)
    assert eval_special(OpSpec("L"), BOX, 1.0) == 0.0
    assert eval_special(OpSpec("R"), BOX, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert eval_special(OpSpec("N", 1), BOX, 1.0) == pytest.approx(0.5, abs=1e-12)
    assert eval_special(OpSpec("DualHardy"), BOX, 1.0) == pytest.approx(math.log(2), abs=1e-13)


def test_h_is_signed():
    f = Profile.lincomb([(1.0, Profile.indicator(0, 1)), (-1.0, Profile.indicator(1, 2))])
    assert eval_special(OpSpec("H", 1), f, 2.0) == pytest.approx(0.0, abs=1e-13)


def test_extra_grid_points_only_raise_the_value():
    f = Profile.gaussian()
    plain = eval_special(OpSpec("R"), f, 0.3)
    more = eval_special(OpSpec("R"), f, 0.3, grid=TGrid(0.6, 5.0, n_log=32))
    assert more >= plain


def test_divergence_signal():
    with pytest.raises(DivergenceSignal):
        eval_special(OpSpec("H", 0.5), Profile.power(-0.5, 0, 1), 0.5)
    with pytest.raises(DivergenceSignal):
        eval_special(OpSpec("DualHardy"), ONE, 1.0)


def test_opspec_validation():
    with pytest.raises(DomainError):
        OpSpec("N", 0.0)
    with pytest.raises(DomainError):
        OpSpec("H")
    with pytest.raises(ValueError):
        OpSpec("Q")
    OpSpec("T", -1.5)
    with pytest.raises(DomainError):
        eval_special(OpSpec("D"), ONE, 0.0)


# ---- predicates


def test_predicate_examples():
    assert is_bounded_on(OpSpec("D"), 2, 0) is Y
    assert is_bounded_on(OpSpec("R"), 2, -0.5) is N
    assert is_bounded_on(OpSpec("T", 0.5), 3, -0.5) is Y


@pytest.mark.parametrize("spec, p, gamma, want", [
    (OpSpec("D"), 2, 3.0, N), (OpSpec("D"), 2, -1.0, N), (OpSpec("D"), 2, 2.99, Y),
    (OpSpec("L"), 1.5, -40.0, Y),
    (OpSpec("H", 1), 2, 0.99, Y), (OpSpec("H", 1), 2, 1.0, N),
    (OpSpec("R"), 3, 0.0, Y),
    (OpSpec("N", 1), 2, 0.5, Y), (OpSpec("N", 1), 2, 1.5, S), (OpSpec("N", 1), 2, -1.0, S),
    (OpSpec("T", 2), 2, 2.0, Y), (OpSpec("T", 2), 2, 1.9, S),
    (OpSpec("T", 1), 2, 0.0, S), (OpSpec("T", 1), 2, 1e-9, Y),
    (OpSpec("T", 0.5), 2, -0.6, S), (OpSpec("T", -1), 2, -0.9, Y), (OpSpec("T", -1), 2, -1.0, S),
    (OpSpec("DualHardy"), 2, -1.0, N), (OpSpec("DualHardy"), 2, -0.5, Y),
])
def test_predicate_table(spec, p, gamma, want):
    assert is_bounded_on(spec, p, gamma) is want


def test_predicate_needs_p_above_one():
    with pytest.raises(DomainError):
        is_bounded_on(OpSpec("D"), 1.0, 0.0)


def test_default_theta():
    for nu in [-0.4, -0.1, 0.0, 0.2, 0.45]:
        th = default_theta(nu)
        r = 1 / (1 + th)
        assert th > 0 and max(0.0, nu) < r < min(1.0, nu + 0.5)
    with pytest.raises(DomainError):
        default_theta(-0.5)


# ---- properties


def _battery(a, b):
    return Profile.lincomb([(a, Profile.indicator(1, 3)), (b, Profile.gaussian(0.5, 2))])


KINDS = [OpSpec("D"), OpSpec("L"), OpSpec("R"), OpSpec("N", 1.5), OpSpec("T", 0.5), OpSpec("DualHardy")]


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(KINDS), st.floats(0.1, 3), st.floats(0.1, 3), st.floats(1, 2), st.floats(1, 2),
       st.floats(0.2, 3))
def test_monotone_in_modulus(spec, a, b, ka, kb, x):
    small = eval_special(spec, _battery(a, b), x)
    big = eval_special(spec, _battery(-ka * a, kb * b), x)
    assert small <= big * (1 + 1e-12) + 1e-300


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(KINDS + [OpSpec("H", 1.5)]), st.integers(-6, 6), st.booleans(), st.floats(0.2, 3))
def test_homogeneity_powers_of_two(spec, k, neg, x):
    c = (-1.0 if neg else 1.0) * 2.0 ** k
    f = _battery(1.0, 0.7)
    base = eval_special(spec, f, x)
    scale = c if spec.kind.value == "H" else abs(c)
    assert eval_special(spec, f.scaled(c), x) == scale * base


@pytest.mark.parametrize("c", [0.3, -7.1])
def test_homogeneity_general(c):
    f = _battery(1.0, 0.7)
    for spec in KINDS:
        assert eval_special(spec, f.scaled(c), 0.8) == pytest.approx(abs(c) * eval_special(spec, f, 0.8), rel=1e-13)


@pytest.mark.parametrize("eta", [0.0, -0.5, -2.0])
def test_t_dominated_by_dual_hardy(eta):
    # z^(eta-1) (t-z+x)^(-eta) <= 2^(-eta) / z on [t/2, t] when eta <= 0
    spec = OpSpec("T", eta)
    for f in [BOX, Profile.gaussian(), Profile.power(-0.5, 0, 3), _battery(1, -2)]:
        for x in [0.1, 0.7, 2.5]:
            assert eval_special(spec, f, x) <= 2 ** -eta * eval_special(OpSpec("DualHardy"), f, x) * (1 + 1e-10)


# ---- empirical weighted norms


def _norm(spec, f, p, gamma, lo, hi, n=48):
    xs = np.geomspace(lo, hi, n)
    vals = np.array([eval_special(spec, f, x) for x in xs])
    # trapezoid in log x
    return integrate.trapezoid(vals ** p * xs ** (gamma + 1), np.log(xs)) ** (1 / p)


def _box_norm(a, b, p, gamma):
    return ((b ** (gamma + 1) - a ** (gamma + 1)) / (gamma + 1)) ** (1 / p)


def test_d_norm_growth():
    f = Profile.indicator(0, 1)
    p = 2.0
    bad = [_norm(OpSpec("D"), f, p, 3.5, 1e-2, s) for s in (1e1, 1e2, 1e3)]
    good = [_norm(OpSpec("D"), f, p, 0.0, 1e-3, s) for s in (1e1, 1e2, 1e3)]
    assert is_bounded_on(OpSpec("D"), p, 3.5) is N and is_bounded_on(OpSpec("D"), p, 0.0) is Y
    # truncated norm grows like s^(1/4)
    assert bad[1] > 1.5 * bad[0] and bad[2] > 1.5 * bad[1]
    assert good[2] <= good[1] * 1.01 <= good[0] * 1.02


def test_r_norm_growth():
    p = 2.0
    bad, good = [], []
    for s in (10.0, 100.0, 1000.0):
        f = Profile.indicator(s, s + 1)
        bad.append(_norm(OpSpec("R"), f, p, -0.5, 1e-3, 0.5) / _box_norm(s, s + 1, p, -0.5))
        good.append(_norm(OpSpec("R"), f, p, 0.5, 1e-3, s + 1, n=64) / _box_norm(s, s + 1, p, 0.5))
    assert is_bounded_on(OpSpec("R"), p, -0.5) is N and is_bounded_on(OpSpec("R"), p, 0.5) is Y
    assert bad[1] > 1.5 * bad[0] and bad[2] > 1.5 * bad[1]
    # bounded: the ratio does not grow with s
    assert good[2] <= good[1] <= good[0] * 1.01
