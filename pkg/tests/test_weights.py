import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gausslocal import (
    FractionalParams,
    GaussianSpace,
    GridFunction,
    Weight,
    WeightVector,
    apa_constant,
    apqa_constant,
    ball_sampler,
    epsilon_finder,
    five_condition_ratio,
    multi_apa_constant,
    power_weight,
    reverse_holder_check,
    theorem_crosscheck,
)
from gausslocal.errors import (
    BallOutsideDomain,
    ExponentMismatch,
    NoEpsilonFound,
    NonPositiveWeight,
)
from gausslocal.geometry import AdmissibleBall, admissibility_m
from gausslocal.weights import constant_weight, lebesgue_flattening_weight

from .oracle_utils import (
    aligned_interval_family,
    exhaustive_apa_constant,
    exhaustive_apqa_constant,
)

SP = GaussianSpace(d=1, a=1.0, L=4.0, n=128)
BALLS = ball_sampler(SP, count=150, seed=0)


def aligned_balls(space, k=1.0):
    h = space.cell_size
    out = []
    for ic, j in aligned_interval_family(space, k):
        c = float(space.axis_nodes[ic])
        out.append(AdmissibleBall((c,), (j + 0.5) * h, scale=k))
    return out


# --- sampler ----------------------------------------------------------------


def test_sampler_deterministic_and_admissible():
    b1 = ball_sampler(SP, count=40, seed=9)
    b2 = ball_sampler(SP, count=40, seed=9)
    assert b1 == b2
    for ball in b1:
        cap = SP.a * admissibility_m(ball.center_array)
        assert 0.0 < ball.radius < cap
        assert SP.ball_in_domain(ball)


def test_sampler_extreme_stratum():
    balls = ball_sampler(SP, count=64, seed=2)
    caps = [SP.a * admissibility_m(b.center_array) for b in balls]
    assert any(b.radius > 0.9 * cap for b, cap in zip(balls, caps))
    assert any(b.center_norm > 0.8 * SP.L for b in balls)


def test_sampler_fit_scale_keeps_dilations_inside():
    for ball in ball_sampler(SP, count=40, seed=4, fit_scale=5.0):
        assert SP.ball_in_domain(ball.dilate(5.0))


# --- one-weight constants ----------------------------------------------------


def test_apa_trivial_and_scale_invariance():
    one = constant_weight(SP, 1.0)
    two = constant_weight(SP, 2.0)
    assert apa_constant(one, 2.0, BALLS) == pytest.approx(1.0, rel=1e-12)
    # doubling the weight is exact in floating point, so invariance is bitwise
    assert apa_constant(two, 2.0, BALLS) == apa_constant(one, 2.0, BALLS)
    w = power_weight(SP, 0.5)
    c1 = apa_constant(w, 2.0, BALLS)
    c2 = apa_constant(Weight(GridFunction(SP, 3.7 * w.values.values), "3.7w"), 2.0, BALLS)
    assert c2 == pytest.approx(c1, rel=1e-12)


def test_apa_jensen_floor_and_monotone_sample():
    for alpha in (-0.5, 0.3, 0.8):
        w = power_weight(SP, alpha)
        for p in (1.0, 1.5, 2.0):
            assert apa_constant(w, p, BALLS) >= 1.0 - 1e-12
    w = power_weight(SP, 0.5, delta=0.01)
    small = apa_constant(w, 2.0, BALLS[:50])
    assert small <= apa_constant(w, 2.0, BALLS) + 1e-15


def test_apa_against_exhaustive_interval_oracle():
    w = power_weight(SP, 0.5, delta=0.01)
    fam = aligned_balls(SP)
    oracle = exhaustive_apa_constant(SP, w.flat, 2.0)
    val = apa_constant(w, 2.0, fam)
    assert val == pytest.approx(oracle, rel=0.05)
    assert val == pytest.approx(oracle, rel=1e-12)  # matched family: same quadrature


def test_apa_p1_convention():
    w = power_weight(SP, 0.4)
    fam = aligned_balls(SP)
    assert apa_constant(w, 1.0, fam) == pytest.approx(
        exhaustive_apa_constant(SP, w.flat, 1.0), rel=1e-12)


def test_nonpositive_weight_rejected():
    with pytest.raises(NonPositiveWeight):
        Weight(GridFunction.constant(SP, 0.0), "zero")


# --- two-exponent constants --------------------------------------------------


def test_apqa_trivials_and_oracle():
    one = constant_weight(SP, 1.0)
    assert apqa_constant(one, 2.0, 4.0, BALLS) == pytest.approx(1.0, rel=1e-12)
    c = constant_weight(SP, 5.0)
    assert apqa_constant(c, 2.0, 4.0, BALLS) == pytest.approx(1.0, rel=1e-12)
    w = power_weight(SP, 0.3)
    fam = aligned_balls(SP)
    assert apqa_constant(w, 2.0, 4.0, fam) == pytest.approx(
        exhaustive_apqa_constant(SP, w.flat, 2.0, 4.0), rel=0.05)


# --- multilinear constant ----------------------------------------------------


def test_multi_apa_trivial_and_m1_collapse():
    one = constant_weight(SP, 1.0)
    wv1 = WeightVector([one, one], (2.0, 2.0))
    assert multi_apa_constant(wv1, BALLS) == pytest.approx(1.0, rel=1e-12)
    w = power_weight(SP, 0.5)
    single = WeightVector([w], (2.0,))
    assert multi_apa_constant(single, BALLS) == apa_constant(w, 2.0, BALLS)


def test_multi_apa_power_pair_oracle():
    w1 = power_weight(SP, 0.4)
    w2 = power_weight(SP, -0.3)
    wv = WeightVector([w1, w2], (2.0, 2.0))
    fam = aligned_balls(SP)
    val = multi_apa_constant(wv, fam)

    # direct enumeration of the defining product (p-th power normalization)
    gw = SP.gaussian_cell_weights
    p = wv.p
    best = 0.0
    for ball in fam:
        c = ball.center[0]
        h = SP.cell_size
        j = int(round(ball.radius / h - 0.5))
        ic = int(round((c + SP.L) / h - 0.5))
        i0, i1 = max(0, ic - j), min(SP.n, ic + j + 1)
        wq = gw[i0:i1]
        den = wq.sum()
        joint = float(np.dot((w1.flat[i0:i1] ** (p / 2.0)) * (w2.flat[i0:i1] ** (p / 2.0)), wq)) / den
        term = joint ** (1.0 / p)
        for wgt in (w1, w2):
            dual = float(np.dot(wgt.flat[i0:i1] ** (1.0 - 2.0), wq)) / den
            term *= dual ** (1.0 / 2.0)
        best = max(best, term**p)
    assert val == pytest.approx(best, rel=1e-10)


# --- five-condition ----------------------------------------------------------


def test_five_condition_constant_weight_band():
    balls5 = ball_sampler(SP, count=80, seed=5, fit_scale=5.0)
    one = constant_weight(SP, 1.0)
    ratio = five_condition_ratio(one, balls5)
    a = SP.a
    band = 5.0**SP.d * math.exp(2.0 * 5.0 * a + (5.0 * a) ** 2) * math.exp(2.0 * a + a * a)
    assert 1.0 < ratio <= band


def test_five_condition_density_limit_and_flattening():
    tiny = [SP.admissible_ball([0.3], 1e-3)]
    one = constant_weight(SP, 1.0)
    assert five_condition_ratio(one, tiny) == pytest.approx(5.0, rel=2e-2)
    flat = lebesgue_flattening_weight(SP)
    interior = [SP.admissible_ball([0.5], 0.2), SP.admissible_ball([-1.2], 0.15)]
    assert five_condition_ratio(flat, interior) == pytest.approx(5.0, rel=1e-12)


def test_five_condition_domain_guard():
    with pytest.raises(BallOutsideDomain):
        five_condition_ratio(constant_weight(SP, 1.0), [SP.admissible_ball([3.0], 0.3)])


# --- reverse Holder ----------------------------------------------------------


def test_reverse_holder_trivials():
    one = constant_weight(SP, 1.0)
    assert reverse_holder_check(one, 2.0, 1.3, BALLS) == pytest.approx(1.0, rel=1e-12)
    w = power_weight(SP, 0.5)
    assert reverse_holder_check(w, 2.0, 1.0, BALLS) == 1.0


def test_reverse_holder_sample_stability():
    w = power_weight(SP, 0.3)
    half = reverse_holder_check(w, 2.0, 1.1, ball_sampler(SP, count=100, seed=6))
    full = reverse_holder_check(w, 2.0, 1.1, ball_sampler(SP, count=200, seed=6))
    assert np.isfinite(full)
    assert abs(full - half) / half < 0.10


# --- epsilon scan ------------------------------------------------------------


def test_epsilon_finder_constant_weight_quarter():
    params = epsilon_finder(FractionalParams(beta=0.25, p=2.0), constant_weight(SP), BALLS)
    assert params.epsilon == 0.125
    assert params.q_eps == pytest.approx(1.0 / (0.5 - 0.25 - 0.125))
    assert params.q_eps_tilde == pytest.approx(1.0 / (0.5 - 0.25 + 0.125))


def test_epsilon_finder_tight_exponent_window():
    params = epsilon_finder(FractionalParams(beta=0.5, p=1.9), constant_weight(SP), BALLS)
    assert params.epsilon == 0.5 / 2**5  # largest dyadic value below 1/p - beta


def test_epsilon_finder_exhaustion():
    blow = Weight(GridFunction.from_callable(SP, lambda pts: np.exp(40.0 * pts[:, 0] ** 2)),
                  "blow")
    with pytest.raises(NoEpsilonFound):
        epsilon_finder(FractionalParams(beta=0.25, p=2.0), blow, BALLS)


def test_fractional_params_validation():
    with pytest.raises(ExponentMismatch):
        FractionalParams(beta=0.25, p=2.0, q=3.0)
    p = FractionalParams(beta=0.25, p=2.0, s=2.0)
    assert p.q == pytest.approx(4.0)
    assert p.s_prime == pytest.approx(2.0)
    with pytest.raises(ValueError):
        FractionalParams(beta=1.5, p=2.0)


# --- crosscheck --------------------------------------------------------------


def test_crosscheck_all_ones():
    one = constant_weight(SP, 1.0)
    wv = WeightVector([one, one], (2.0, 2.0))
    rep = theorem_crosscheck(wv, BALLS)
    assert rep.multilinear_constant == pytest.approx(1.0, rel=1e-12)
    for v in rep.linear_constants.values():
        assert v == pytest.approx(1.0, rel=1e-12)
    assert rep.all_finite


def test_crosscheck_cofinite_power_pair():
    wv = WeightVector([power_weight(SP, 0.3), power_weight(SP, 0.3)], (2.0, 2.0))
    rep = theorem_crosscheck(wv, BALLS, cap=50.0)
    assert rep.all_finite


def test_crosscheck_coblowup():
    # the aligned family contains balls hugging the origin, where the
    # singular component concentrates; joint and linear constants blow up
    # together on that shared sample
    fam = aligned_balls(SP)
    sing = power_weight(SP, -4.0, delta=0.0, label="singular")
    wv = WeightVector([sing, power_weight(SP, 0.3)], (2.0, 2.0))
    rep = theorem_crosscheck(wv, fam, cap=50.0)
    assert rep.flags["joint"] == "LARGE"
    assert rep.flags["component_1"] == "LARGE"
    assert rep.flags["component_2"] == "FINITE"


def test_crosscheck_p1_convention_runs():
    wv = WeightVector([power_weight(SP, 0.3), power_weight(SP, -0.2)], (1.0, 2.0))
    rep = theorem_crosscheck(wv, BALLS)
    assert set(rep.linear_constants) == {"component_1", "component_2", "composite"}
    assert all(np.isfinite(v) for v in rep.linear_constants.values())


@settings(max_examples=25, deadline=None)
@given(alpha=st.floats(-0.6, 0.8), c=st.floats(0.1, 8.0), p=st.floats(1.1, 3.0))
def test_scale_invariance_property(alpha, c, p):
    w = power_weight(SP, alpha)
    scaled = Weight(GridFunction(SP, c * w.values.values), "scaled")
    a1 = apa_constant(w, p, BALLS[:40])
    a2 = apa_constant(scaled, p, BALLS[:40])
    assert a2 == pytest.approx(a1, rel=1e-9)
