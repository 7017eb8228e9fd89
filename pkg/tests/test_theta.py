import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anisospec.theta import ThetaSpec, eval_theta, tau, validate

CLOSED = [ThetaSpec.radial_power(2.0), ThetaSpec.radial_power(1.0), ThetaSpec.radial_power(0.25),
          ThetaSpec.abs_sum(1.0, 1.0), ThetaSpec.abs_sum(2.0, 2.0), ThetaSpec.abs_sum(3.0, 4.0)]


def test_radial_values():
    th = ThetaSpec.radial_power(2.0)
    assert th.gamma == 4.0
    assert eval_theta(th, 1.0, 1.0) == pytest.approx(4.0, rel=1e-15)
    assert eval_theta(th, 2.0, 2.0) == pytest.approx(64.0, rel=1e-15)


@pytest.mark.parametrize("th", CLOSED + [ThetaSpec.custom(np.ones(16), 2.0)])
def test_origin_is_zero(th):
    assert eval_theta(th, 0.0, 0.0) == 0.0
    assert tau(th, 0.0) == 0.0


def test_tau_examples():
    th = ThetaSpec.radial_power(2.0)
    assert tau(th, 1.0) == pytest.approx(4.0)
    assert tau(th, -3.0) == pytest.approx(324.0)
    assert tau(ThetaSpec.abs_sum(1.0, 1.0), 2.0) == pytest.approx(4.0)


def test_non_finite_rejected():
    th = ThetaSpec.radial_power(1.0)
    with pytest.raises(ValueError):
        eval_theta(th, np.nan, 1.0)
    with pytest.raises(ValueError):
        tau(th, np.inf)


def test_bad_constructions():
    with pytest.raises(ValueError):
        ThetaSpec("radial_power", 3.0, {"sigma": 2.0})
    with pytest.raises(ValueError):
        ThetaSpec("nope", 1.0, {})
    with pytest.raises(ValueError):
        ThetaSpec.abs_sum(1.0, -1.0)
    with pytest.raises(ValueError):
        ThetaSpec.custom([1.0, 2.0], 2.0)


@pytest.mark.parametrize("th", CLOSED)
def test_homogeneity_random(th):
    rng = np.random.default_rng(1)
    x, y = rng.uniform(-5, 5, (2, 100))
    base = eval_theta(th, x, y)
    for t in (0.5, 1.0, 2.0, 10.0):
        np.testing.assert_allclose(eval_theta(th, t * x, t * y), t ** th.gamma * base, rtol=1e-12)


finite = st.floats(-50, 50, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(finite, finite, st.sampled_from(CLOSED))
def test_symmetry_exact(x, y, th):
    assert eval_theta(th, x, y) == eval_theta(th, y, x)


@settings(max_examples=200, deadline=None)
@given(st.floats(-1e3, 1e3, allow_nan=False), st.sampled_from(CLOSED))
def test_tau_matches_diagonal(x, th):
    d = float(eval_theta(th, x, x))
    assert float(tau(th, x)) == pytest.approx(d, rel=1e-12, abs=1e-300)


def test_tau_evenness_follows_diagonal_coefficients():
    even = ThetaSpec.radial_power(1.0)
    assert even.is_even
    # a tabulated weight with Theta(1,1) != Theta(-1,-1): angles pi/4 and 5 pi/4 differ
    vals = np.ones(16)
    vals[10] = 3.0          # angle 5 pi / 4
    odd = ThetaSpec.custom(vals, 2.0)
    c_pp, c_mm = odd.diag_coeffs
    assert c_pp != pytest.approx(c_mm)
    assert not odd.is_even
    assert tau(odd, 2.0) != pytest.approx(float(tau(odd, -2.0)))
    assert tau(even, 2.0) == tau(even, -2.0)


def test_custom_homogeneity_and_circle():
    phi = 2 * np.pi * np.arange(32) / 32
    vals = 1 + 0.5 * np.cos(2 * phi - np.pi / 2) ** 2   # symmetric under phi -> pi/2 - phi
    th = ThetaSpec.custom(vals, 3.0)
    r = eval_theta(th, np.cos(phi), np.sin(phi))
    np.testing.assert_allclose(r, vals, rtol=1e-12)
    x, y = 0.3, -1.7
    assert eval_theta(th, 2 * x, 2 * y) == pytest.approx(8 * eval_theta(th, x, y), rel=1e-12)


def test_validate_radial_sigma1():
    rep = validate(ThetaSpec.radial_power(1.0))
    assert rep.passed
    assert rep.circle_min == pytest.approx(1.0) and rep.circle_max == pytest.approx(1.0)
    assert rep.spec.lipschitz_const == pytest.approx(rep.lipschitz_const)
    assert rep.asymptotics_covered


def test_validate_abs_sum_p2():
    rep = validate(ThetaSpec.abs_sum(2.0, 2.0))
    assert rep.passed
    assert rep.circle_min == pytest.approx(1.0) and rep.circle_max == pytest.approx(1.0)


def test_validate_asymmetric_table_flagged():
    rep = validate(ThetaSpec.custom(np.arange(1.0, 9.0), 2.0))
    assert not rep.passed
    assert rep.symmetry_defect > 1e-3
    assert any("symmetry" in m for m in rep.messages)


def test_validate_nonpositive_circle_flagged():
    vals = np.ones(16)
    vals[[2, 10]] = 0.0
    rep = validate(ThetaSpec.custom(vals, 2.0))
    assert not rep.passed
    assert rep.circle_min <= 0


def test_validate_small_gamma_warns_but_passes():
    rep = validate(ThetaSpec.radial_power(0.25))
    assert rep.passed and not rep.asymptotics_covered


def test_validate_sample_floor():
    with pytest.raises(ValueError):
        validate(ThetaSpec.radial_power(1.0), samples=10)


@pytest.mark.parametrize("th", CLOSED + [ThetaSpec.custom(np.linspace(1, 2, 12), 1.5)])
def test_json_round_trip(th):
    d = json.loads(json.dumps(th.to_dict()))
    assert set(d) == {"kind", "gamma", "params"}
    back = ThetaSpec.from_dict(d)
    assert back.to_dict() == th.to_dict()
    assert math.isclose(float(eval_theta(back, 0.7, -0.2)), float(eval_theta(th, 0.7, -0.2)))
