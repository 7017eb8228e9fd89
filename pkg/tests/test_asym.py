import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import erf

from anisospec.asym import (ModelReference, TheoryWarning, TruncationWarning, higher_eigenvalue_deficits,
                            desym_gap, direct_top_eigenvalue, eigenfunction_distance,
                            fit_power_law, fourier_mass, lambda_reference, localization_report,
                            most_negative, negative_scan, parity_blocks, parity_split, richardson,
                            sweep)
from anisospec.discretize import DiscreteOperator, Grid, GridPolicy, nystrom, trapezoid_grid
from anisospec.eigen import EigenPair, top_k
from anisospec.kernels import KernelSpec, rescale_beta_to_alpha
from anisospec.theta import ThetaSpec

R4 = ThetaSpec.radial_power(2.0)
R2 = ThetaSpec.radial_power(1.0)


@pytest.fixture(scope="module")
def g4_sweep():
    return sweep(R4, [0.1, 0.03, 0.01, 0.003])


@pytest.fixture(scope="module")
def r4_ref():
    return lambda_reference(R4, k=2)


def test_richardson_exact_on_model_errors():
    Ls = [20.0, 30.0, 40.0]
    vals = [1.5 + 3 / L ** 2 - 7 / L ** 4 for L in Ls]
    assert richardson(Ls, vals) == pytest.approx(1.5, abs=1e-13)
    assert richardson(Ls[:2], [1.5 + 3 / L ** 2 for L in Ls[:2]]) == pytest.approx(1.5, abs=1e-13)
    assert richardson([5.0], [2.0]) == 2.0


def test_reference_accepted_and_second_eigenvalue(r4_ref):
    assert r4_ref.accepted
    assert r4_ref.lambda1 == pytest.approx(1.1239174, abs=1e-6)
    assert r4_ref.extrapolated[1] > r4_ref.lambda1
    assert r4_ref.pairs[0].grid.cutoff_L == 40.0


def test_fit_exact_power_law():
    betas = np.geomspace(0.1, 1e-3, 8)
    fit = fit_power_law(betas=betas, deficits=2 * betas ** 0.4, window="all", gamma=4.0)
    assert fit.exponent == pytest.approx(0.4, abs=1e-12)
    assert fit.constant == pytest.approx(2.0, abs=1e-12)
    assert fit.r_squared == 1.0
    np.testing.assert_allclose(fit.rescaled, 2.0, atol=1e-12)


def test_fit_window_shrinking_recovers_leading_slope():
    betas = np.geomspace(0.5, 1e-6, 40)
    d = betas * (1 + betas)
    slopes = [fit_power_law(betas=betas, deficits=d, window=(betas.min(), hi)).exponent
              for hi in (0.5, 1e-2, 1e-4)]
    assert slopes[0] > slopes[1] > slopes[2] > 1
    assert slopes[2] == pytest.approx(1.0, abs=1e-4)


def test_fit_half_window_default():
    betas = np.geomspace(0.1, 1e-3, 6)
    fit = fit_power_law(betas=betas, deficits=betas ** 0.5)
    assert len(fit.betas) == 3 and fit.window[1] == pytest.approx(betas[3])
    assert fit.rescaled is None


def test_fit_preconditions():
    with pytest.raises(ValueError):
        fit_power_law(betas=[0.1, 0.05, 0.02], deficits=[0.1, 0.08, 0.05])
    with pytest.raises(ValueError):
        fit_power_law(betas=[0.1, 0.05, 0.02, 0.01], deficits=[0.1, 0.0, 0.05, 0.02])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(1e-6, 1.0), min_size=4, max_size=12, unique=True),
       st.lists(st.floats(1e-8, 1.0), min_size=12, max_size=12))
def test_fit_r_squared_in_unit_interval(betas, deficits):
    fit = fit_power_law(betas=betas, deficits=deficits[:len(betas)], window="all")
    assert 0.0 <= fit.r_squared <= 1.0


def test_single_beta_one():
    rec = sweep(R2, [1.0])[0]
    assert 0 < rec.mu < 1 and rec.perron.passed
    assert rec.alpha == 1.0
    # three points per kernel width leave a ~1e-6 shift at alpha = 1; five suffice
    fine = sweep(R2, [1.0], GridPolicy(points_per_width=5.0))[0]
    assert fine.converged and fine.mu == pytest.approx(rec.mu, abs=1e-5)


def test_sweep_preconditions():
    with pytest.raises(ValueError):
        sweep(R4, [0.1, 0.2])
    with pytest.raises(ValueError):
        sweep(R4, [1.5])
    with pytest.raises(ValueError):
        sweep(R4, [])


def test_small_gamma_warns():
    with pytest.warns(TheoryWarning):
        sweep(ThetaSpec.radial_power(0.4), [0.5], check=False)


def test_unconverged_grid_is_flagged_not_dropped():
    recs = sweep(R4, [0.1, 0.05], GridPolicy(n=12, L=6.0))
    assert len(recs) == 2
    assert all("grid_not_converged" in r.flags and not r.converged for r in recs)
    rec = sweep(R4, [0.1], GridPolicy(n_check_max=100))[0]
    assert "convergence_unchecked" in rec.flags


def test_sweep_deficits_decrease(g4_sweep):
    d = [r.deficit for r in g4_sweep]
    assert all(0 < x < 1 for x in d)
    assert all(b < a for a, b in zip(d, d[1:]))
    assert all(r.converged and r.perron.passed for r in g4_sweep)


def test_threaded_sweep_matches_serial(g4_sweep):
    par = sweep(R4, [0.1, 0.03, 0.01, 0.003], max_workers=2)
    assert [r.mu for r in par] == [r.mu for r in g4_sweep]


def test_rescaling_consistency():
    beta = 0.1
    alpha = rescale_beta_to_alpha(beta, R4.gamma)
    n, L = GridPolicy().resolve(alpha, R4)
    grid = trapezoid_grid(L, n)
    mu = top_k(nystrom(KernelSpec.B(alpha, R4), grid), 1).top.value
    assert direct_top_eigenvalue(R4, beta, grid) == pytest.approx(mu, abs=1e-6)


def test_weighted_norm_bounded(g4_sweep):
    norms = [r.weighted_norm for r in g4_sweep]
    assert all(1.0 <= w <= 1.1 for w in norms)
    assert all(b <= a for a, b in zip(norms, norms[1:]))


def test_gamma2_rescaled_deficits_approach_lambda1():
    betas = [0.1, 10 ** -1.5, 0.01]
    recs = sweep(R2, betas, check=False)
    lam = lambda_reference(R2).lambda1
    dist = [abs(r.rescaled_deficit - lam) for r in recs]
    assert all(b < a for a, b in zip(dist, dist[1:]))


def test_distance_trivial_cases():
    g = trapezoid_grid(6.0, 120)
    pairs = top_k(nystrom(KernelSpec.B(0.4, R4), g), 2).pairs
    assert eigenfunction_distance(pairs[0], pairs[0]) == 0.0
    assert eigenfunction_distance(pairs[0], pairs[1]) == pytest.approx(math.sqrt(2), abs=1e-12)


def test_distance_reports_truncation(r4_ref):
    narrow = trapezoid_grid(1.0, 100)
    v = np.exp(-narrow.nodes ** 2) * np.sqrt(narrow.weights)
    pair = EigenPair(1.0, v / np.linalg.norm(v), 0.0, narrow)
    with pytest.warns(TruncationWarning):
        eigenfunction_distance(pair, r4_ref.pairs[0])


def test_distance_decreases_along_sweep(g4_sweep, r4_ref):
    d = [eigenfunction_distance(r, r4_ref.pairs[0]) for r in g4_sweep]
    assert all(b < a for a, b in zip(d, d[1:]))


def test_fourier_mass_gaussian_oracle():
    g = trapezoid_grid(12.0, 600)
    f = np.pi ** -0.25 * np.exp(-g.nodes ** 2 / 2)
    pair = EigenPair(0.0, f * np.sqrt(g.weights), 0.0, g)
    for R in (0.5, 1.0, 2.5):
        assert fourier_mass(pair, R) == pytest.approx(erf(R), abs=1e-12)


def test_localization_limits(g4_sweep, r4_ref):
    rec = g4_sweep[-1]
    lam = r4_ref.lambda1
    rep = localization_report(rec, lam, [2.0, 4.0, 8.0, 8 * lam, 1e6])
    big = rep.rows[-1]
    assert big.spatial_mass == pytest.approx(1.0, abs=1e-15) and big.fourier_mass is None
    r8 = rep.rows[3]
    assert rec.alpha * r8.R <= 1 and r8.fourier_mass >= 0.5 and r8.fourier_ok
    # Fourier mass tends to 1 for large R (alpha R <= 1 still)
    assert fourier_mass(rec.pair, 1 / rec.alpha) > 0.9999
    assert rep.decay_exponent >= rec.gamma - 0.5
    for row in rep.rows:
        assert row.spatial_mass >= 1 - 4 * rec.alpha * lam - rep.C_hat / row.R ** rec.gamma - 1e-15


def test_parity_split_and_union():
    rep = parity_split(R4, 0.1, GridPolicy(n=256), k=3)
    assert rep.even_top_exceeds_odd
    assert rep.full_check_error is not None and rep.full_check_error <= 1e-10
    assert len(rep.comparisons) == 2
    full = top_k(nystrom(KernelSpec.B(rep.alpha, R4), trapezoid_grid(rep.L, rep.n)), 1)
    assert rep.even[0] == pytest.approx(full.top.value, abs=1e-12)


def test_parity_rejections():
    odd = np.ones(16)
    odd[10] = 3.0
    with pytest.raises(ValueError):
        parity_split(ThetaSpec.custom(odd, 2.0), 0.1)
    g = Grid(np.linspace(0.1, 2.0, 8), np.full(8, 0.25), 2.0, "trapezoid_uniform")
    op = nystrom(KernelSpec.B(0.3, R4), g)
    with pytest.raises(ValueError):
        parity_blocks(op)


def test_conjecture_j1_matches_sweep(g4_sweep, r4_ref):
    betas = [r.beta for r in g4_sweep]
    rep = higher_eigenvalue_deficits(R4, betas, 2, reference=r4_ref)
    np.testing.assert_allclose(rep.rows[0].rescaled, [r.rescaled_deficit for r in g4_sweep],
                               rtol=1e-10)
    assert rep.rows[1].lambda_j == pytest.approx(r4_ref.extrapolated[1])
    with pytest.raises(ValueError):
        higher_eigenvalue_deficits(R4, betas, 7, reference=r4_ref)


def test_conjecture_degenerate_pair_flagged(r4_ref):
    fake = ModelReference(R4, 8, [1.0], np.zeros((1, 2)), np.array([1.0, 1.0 + 1e-9]),
                          np.zeros((0, 2)), np.zeros((0, 2)), True, [])
    rep = higher_eigenvalue_deficits(R4, [0.1, 0.05], 2, reference=fake)
    assert any("merged" in f for f in rep.rows[0].flags)
    assert any("merged" in f for f in rep.rows[1].flags)


def test_negative_scan_cauchy_kernel_nonnegative():
    rep = negative_scan(R4, [0.0], cauchy_L=20.0, cauchy_n=256)
    row = rep.rows[0]
    assert row.alpha is None and row.min_eig >= -1e-12
    assert row.delta is not None


def test_negative_scan_reports_delta():
    rep = negative_scan(R4, [0.5], GridPolicy(n_max=512))
    row = rep.rows[0]
    assert row.min_eig_refined is not None and row.delta == abs(row.min_eig_refined - row.min_eig)


def test_most_negative_detects_synthetic_mode():
    g = trapezoid_grid(1.0, 20)
    m = np.eye(20) * 2.0
    m[0, 1] = m[1, 0] = 3.0            # block [[2,3],[3,2]] has eigenvalue -1
    assert most_negative(DiscreteOperator(m, g, True)) == pytest.approx(-1.0)


def test_desym_gap_small():
    rep = desym_gap(R2, [0.1, 0.05])
    assert len(rep.rows) == 2 and rep.max_ratio > 0
    assert rep.rows[0].ratio == pytest.approx(rep.rows[0].norm_diff / 0.1)


def test_gamma4_approach_continues_below_window(r4_ref):
    # beyond the acceptance window the rescaled deficit keeps rising toward lambda_1
    alphas = [0.07, 0.05, 0.035]
    recs = sweep(R4, [a ** 2.5 for a in alphas], check=False)
    vals = [r.rescaled_deficit / r4_ref.lambda1 for r in recs]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert 0.9 < vals[0] and vals[-1] < 1.0
