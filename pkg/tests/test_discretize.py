import json
import math

import numpy as np
import pytest
import scipy.linalg as sla
from scipy.special import ai_zeros

from anisospec.asym import richardson
from anisospec.discretize import (DiscreteOperator, GridPolicy, auto_cutoff, fourier_grid,
                                  gauss_legendre_grid, model_operator, multiplier_matrix,
                                  nystrom, operator_norm_diff, plain_nystrom, trapezoid_grid)
from anisospec.eigen import bottom_k, top_k
from anisospec.kernels import KernelSpec
from anisospec.theta import ThetaSpec, tau

R4 = ThetaSpec.radial_power(2.0)
R2 = ThetaSpec.radial_power(1.0)


def test_grids_basic():
    g = trapezoid_grid(3.0, 6)
    np.testing.assert_allclose(g.nodes, [-2.5, -1.5, -0.5, 0.5, 1.5, 2.5])
    assert g.weights.sum() == pytest.approx(6.0)
    assert g.is_symmetric
    gl = gauss_legendre_grid(2.0, 4, 8)
    assert gl.n == 32 and gl.weights.sum() == pytest.approx(4.0, rel=1e-14)
    assert gl.is_symmetric
    # 8-point Gauss rule per panel integrates x^14 exactly
    assert np.sum(gl.weights * gl.nodes ** 14) == pytest.approx(2 * 2.0 ** 15 / 15, rel=1e-12)
    with pytest.raises(ValueError):
        fourier_grid(1.0, 100)


def test_single_point_grid():
    g = trapezoid_grid(2.5, 1)
    op = nystrom(KernelSpec.K(0.3, R4), g)
    assert op.matrix.shape == (1, 1)
    assert op.matrix[0, 0] == pytest.approx(5.0 / math.pi)


def test_nystrom_rejects_collocation_grid():
    with pytest.raises(ValueError):
        nystrom(KernelSpec.m(1.0), fourier_grid(4.0, 16))


def test_symmetrization_preserves_spectrum():
    g = gauss_legendre_grid(3.0, 4, 16)      # 64 nodes, non-uniform weights
    for spec in (KernelSpec.B(0.4, R4), KernelSpec.K(0.7, R2), KernelSpec.m(0.5)):
        sym = np.sort(np.linalg.eigvalsh(nystrom(spec, g).matrix))
        plain = np.sort(np.linalg.eigvals(plain_nystrom(spec, g)).real)
        np.testing.assert_allclose(sym, plain, atol=1e-10)


def test_threaded_assembly_identical():
    g = trapezoid_grid(5.0, 1100)
    a = nystrom(KernelSpec.B(0.2, R4), g).matrix
    b = nystrom(KernelSpec.B(0.2, R4), g, workers=3).matrix
    assert np.array_equal(a, b)
    assert np.array_equal(a, a.T)


def test_free_kernel_top_eigenvalue_below_one():
    lam = top_k(nystrom(KernelSpec.m(1.0), trapezoid_grid(60.0, 1024)), 1).top.value
    assert 0.95 <= lam < 1.0


def test_B_alpha_regression_baseline():
    a = 0.2
    coarse = top_k(nystrom(KernelSpec.B(a, R4), trapezoid_grid(30.0, 2048)), 1).top.value
    fine = top_k(nystrom(KernelSpec.B(a, R4), trapezoid_grid(45.0, 4096)), 1).top.value
    assert 0 < coarse < 1
    assert abs(coarse - fine) < 1e-6
    assert coarse == pytest.approx(0.8155425296, abs=1e-8)


def test_grid_convergence_factor_two():
    spec = KernelSpec.B(0.5, R4)
    vals = [top_k(nystrom(spec, trapezoid_grid(6.0, n)), 1).top.value for n in (24, 48, 96, 192)]
    diffs = np.abs(np.diff(vals))
    for d0, d1 in zip(diffs, diffs[1:]):
        assert d1 <= d0 / 2 or d1 < 1e-13


@pytest.mark.parametrize("beta", [0.0, 0.05, 0.5, 1.0])
def test_discrete_K_spectrum_in_unit_interval(beta):
    ev = np.linalg.eigvalsh(nystrom(KernelSpec.K(beta, R4), trapezoid_grid(20.0, 256)).matrix)
    assert ev.max() <= 1.0 and ev.min() > -1.0


def test_model_operator_free_multiplier():
    L, n = 5.0, 64
    op = model_operator(R4, fourier_grid(L, n), potential_scale=0.0)
    ev = np.sort(np.linalg.eigvalsh(op.matrix))
    k = np.fft.fftfreq(n, 1.0 / n)
    expected = np.sort(np.abs(np.pi * k / L))
    np.testing.assert_allclose(ev, expected, atol=1e-12)
    # double multiplicity away from k = 0 and the Nyquist mode
    assert ev[1] == pytest.approx(ev[2], abs=1e-12)


def test_model_operator_rejects_quadrature_grid():
    with pytest.raises(ValueError):
        model_operator(R4, trapezoid_grid(5.0, 64))


def _model_lambda1(theta, Ls=(20.0, 30.0, 40.0), n=2048, k=1):
    vals = [bottom_k(model_operator(theta, fourier_grid(L, n)), k, method="dense").values
            for L in Ls]
    return np.array([richardson(Ls, [v[j] for v in vals]) for j in range(k)])


def test_model_operator_harmonic_against_airy():
    # |D| + x^2 is unitarily equivalent (Fourier transform) to -d^2/dxi^2 + |xi|,
    # whose even eigenvalues are the zeros of Ai'
    lam = _model_lambda1(R2, k=2)
    a, ap, _, _ = ai_zeros(2)
    assert lam[0] == pytest.approx(-ap[0], abs=1e-6)
    assert lam[1] == pytest.approx(-a[0], abs=1e-5)


def _sinc_model(h, m, potential):
    # free-space band-limited |D| sampled with spacing h (Toeplitz), independent
    # of the periodic collocation used by model_operator
    j = np.arange(m)
    col = np.where(j % 2 == 1, -2.0 / (np.pi * np.maximum(j, 1) ** 2 * h), 0.0)
    col[0] = np.pi / (2 * h)
    x = (j - (m - 1) / 2) * h
    return sla.toeplitz(col) + np.diag(potential(x))


def test_model_operator_quartic_against_sinc_oracle():
    lam = _model_lambda1(R4)[0]
    oracle = sla.eigh(_sinc_model(0.01, 1600, lambda x: 0.5 * tau(R4, x)),
                      subset_by_index=[0, 0], eigvals_only=True)[0]
    # the sinc matrix carries an O(h) error from the far-field truncation of |D|
    assert lam == pytest.approx(oracle, abs=2e-4)
    assert lam == pytest.approx(1.1239174, abs=1e-6)


def test_operator_norm_diff():
    g = trapezoid_grid(4.0, 40)
    a = nystrom(KernelSpec.B(0.5, R4), g)
    assert operator_norm_diff(a, a) == 0.0
    b = DiscreteOperator(a.matrix + 1e-3 * np.eye(40), g, True)
    assert operator_norm_diff(a, b) == pytest.approx(1e-3, rel=1e-8)
    c = nystrom(KernelSpec.B_desym(0.5, R4), g)
    assert operator_norm_diff(a, c) == pytest.approx(np.linalg.norm(a.matrix - c.matrix, 2),
                                                     rel=1e-8)
    with pytest.raises(ValueError):
        operator_norm_diff(a, nystrom(KernelSpec.B(0.5, R4), trapezoid_grid(4.0, 42)))


def test_save_load_round_trip(tmp_path):
    op = nystrom(KernelSpec.B_desym(0.3, R4), trapezoid_grid(3.0, 24))
    binp, jsp = op.save(str(tmp_path / "op"))
    raw = np.fromfile(binp, dtype="<f8")
    assert raw.size == 24 * 24
    meta = json.loads(open(jsp).read())
    assert meta["n"] == 24 and meta["scheme"] == "trapezoid_uniform"
    back = DiscreteOperator.load(str(tmp_path / "op"))
    assert np.array_equal(back.matrix, op.matrix) and back.symmetric == op.symmetric
    assert back.grid.same_as(op.grid)


def test_multiplier_matrix_symmetric():
    m = multiplier_matrix(fourier_grid(3.0, 32))
    assert np.array_equal(m, m.T)


def test_grid_policy_cutoff_rule():
    pol = GridPolicy(L_max=1e9, n_max=10 ** 9)
    for alpha in (0.3, 0.1):
        n, L = pol.resolve(alpha, R4)
        assert alpha * float(tau(R4, L)) == pytest.approx(1e4, rel=1e-9)
        assert n % 2 == 0 and 2 * L / n <= alpha / 3.0 + 1e-15
    assert auto_cutoff(R4, 0.1) == pytest.approx((1e4 / 0.4) ** 0.25)


def test_grid_policy_caps():
    pol = GridPolicy(n_max=1000)
    n, L = pol.resolve(0.01, ThetaSpec.abs_sum(1.0, 1.0))
    assert n == 1000 and L == pytest.approx(500 * 0.01 / 3)
    n, L = GridPolicy(n=128, L=7.0).resolve(0.1, R4)
    assert (n, L) == (128, 7.0)
