"""beta -> 0 asymptotics of the top of the spectrum of K_beta.

Every computation is done in the rescaled picture: K_beta is unitarily
equivalent to B_alpha with alpha = beta^(2 / (gamma + 1)), so the top
eigenvalue M_beta equals mu_alpha and the rescaled deficit
beta^(-2 / (gamma + 1)) (1 - M_beta) equals (1 - mu_alpha) / alpha. Its
limit is the lowest eigenvalue lambda_1 of the model operator |D| + tau / 2,
which :func:`lambda_reference` computes by Fourier collocation with
Richardson extrapolation in the box size.
"""
from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .discretize import (DiscreteOperator, Grid, GridPolicy, fourier_grid, model_operator,
                         nystrom, operator_norm_diff, trapezoid_grid)
from .eigen import (EigenPair, PerronReport, SpectrumResult, bottom_k, perron_certify,
                    sign_normalize, top_k)
from .kernels import KernelSpec, rescale_beta_to_alpha
from .symbols import g_alpha
from .theta import ThetaSpec

log = logging.getLogger(__name__)

CONVERGENCE_SHIFT = 1e-7
REFERENCE_AGREEMENT = 1e-6


class TruncationWarning(UserWarning):
    """A function has non-negligible mass outside the region being compared."""


class TheoryWarning(UserWarning):
    """Parameters fall outside the hypotheses of the asymptotic theory."""


# ---------------------------------------------------------------------------
# model-operator reference


def richardson(Ls, values, p: float = 2.0) -> float:
    """Extrapolate ``values(L)`` to L = inf assuming errors in L^-p, L^-2p, ...

    Two points eliminate the L^-p term, three points also the L^-2p term.
    """
    Ls = np.asarray(Ls, dtype=float)
    values = np.asarray(values, dtype=float)
    m = Ls.size
    if m != values.size or m < 1:
        raise ValueError("need matching, non-empty inputs")
    if m == 1:
        return float(values[0])
    cols = [np.ones(m)] + [Ls ** (-p * (i + 1)) for i in range(m - 1)]
    coef = np.linalg.solve(np.column_stack(cols), values)
    return float(coef[0])


@dataclass(eq=False)
class ModelReference:
    theta: ThetaSpec
    n: int
    Ls: list[float]
    values: np.ndarray            # shape (len(Ls), k)
    extrapolated: np.ndarray      # shape (k,)
    pair_estimates: np.ndarray    # shape (len(Ls) - 1, k): 2-point extrapolations
    agreement: np.ndarray         # |difference of consecutive pair estimates|
    accepted: bool
    pairs: list[EigenPair]        # eigenpairs at the largest L
    potential_scale: float = 1.0

    @property
    def lambda1(self) -> float:
        return float(self.extrapolated[0])

    def to_dict(self) -> dict:
        return {"theta": self.theta.to_dict(), "n": self.n, "Ls": self.Ls,
                "potential_scale": self.potential_scale,
                "values": self.values.tolist(), "extrapolated": self.extrapolated.tolist(),
                "pair_estimates": self.pair_estimates.tolist(),
                "agreement": self.agreement.tolist(), "accepted": self.accepted}


def lambda_reference(theta: ThetaSpec, k: int = 1, n: int = 2048, Ls=(20.0, 30.0, 40.0),
                     potential_scale: float = 1.0, p: float = 2.0) -> ModelReference:
    """Lowest ``k`` eigenvalues of |D| + potential_scale * tau / 2.

    The periodic box couples the eigenfunction to its images, which shifts
    the eigenvalues by O(L^-2); the values at the given cutoffs are
    extrapolated jointly. The result is accepted when the two-point
    extrapolations from consecutive cutoff pairs agree to 1e-6.
    """
    Ls = [float(L) for L in Ls]
    vals = []
    pairs = []
    for L in Ls:
        op = model_operator(theta, fourier_grid(L, n), potential_scale)
        res = bottom_k(op, k, method="dense")
        vals.append(res.values)
        pairs = res.pairs
    vals = np.array(vals)
    extrap = np.array([richardson(Ls, vals[:, j], p) for j in range(k)])
    if len(Ls) >= 2:
        pe = np.array([[richardson(Ls[i:i + 2], vals[i:i + 2, j], p) for j in range(k)]
                       for i in range(len(Ls) - 1)])
    else:
        pe = vals.copy()
    agree = np.abs(np.diff(pe, axis=0)) if len(pe) > 1 else np.zeros((0, k))
    accepted = bool(agree.size and np.all(agree[-1] <= REFERENCE_AGREEMENT))
    return ModelReference(theta, n, Ls, vals, extrap, pe,
                          agree.reshape(-1, k), accepted, pairs, potential_scale)


# ---------------------------------------------------------------------------
# sweeps


@dataclass(eq=False)
class SweepRecord:
    beta: float
    alpha: float
    gamma: float
    mu: float
    pair: EigenPair
    n: int
    L: float
    gap: float
    perron: PerronReport
    mu_refined: float | None = None
    converged: bool = True
    flags: list[str] = field(default_factory=list)
    weighted_norm: float | None = None

    @property
    def deficit(self) -> float:
        return 1.0 - self.mu

    @property
    def rescaled_deficit(self) -> float:
        return self.deficit / self.alpha

    @property
    def grid(self) -> Grid:
        return self.pair.grid

    @property
    def shift(self) -> float | None:
        return None if self.mu_refined is None else abs(self.mu_refined - self.mu)

    def row(self) -> dict:
        return {"beta": self.beta, "alpha": self.alpha, "n": self.n, "L": self.L,
                "mu": self.mu, "deficit": self.deficit,
                "rescaled_deficit": self.rescaled_deficit}

    def to_dict(self) -> dict:
        return {**self.row(), "gamma": self.gamma, "gap": self.gap,
                "mu_refined": self.mu_refined, "shift": self.shift,
                "converged": self.converged, "flags": list(self.flags),
                "perron": self.perron.to_dict(), "weighted_norm": self.weighted_norm,
                "residual": self.pair.residual}


def b_alpha_operator(theta: ThetaSpec, alpha: float, grid: Grid, workers: int = 1) -> DiscreteOperator:
    return nystrom(KernelSpec.B(alpha, theta), grid, workers)


def weighted_norm(pair: EigenPair, theta: ThetaSpec, alpha: float, vark: float = 0.5) -> float:
    """Discrete ||g_alpha^vark psi||."""
    g = g_alpha(theta, alpha, pair.grid.nodes)
    return float(np.sqrt(np.sum(g ** (2 * vark) * pair.vector ** 2)))


def _check_betas(betas):
    betas = [float(b) for b in betas]
    if not betas:
        raise ValueError("empty beta list")
    if any(not 0 < b <= 1 for b in betas):
        raise ValueError("betas must lie in (0, 1]")
    if any(b2 >= b1 for b1, b2 in zip(betas, betas[1:])):
        raise ValueError("betas must be strictly decreasing")
    return betas


def _warn_gamma(theta):
    if theta.gamma < 1:
        warnings.warn(f"gamma = {theta.gamma} < 1 is not covered by the asymptotic theory",
                      TheoryWarning, stacklevel=3)


def solve_point(theta: ThetaSpec, beta: float, policy: GridPolicy = GridPolicy(),
                tol: float = 1e-11, check: bool = True, seed: int = 0, vark: float = 0.5,
                method: str = "auto", workers: int = 1) -> SweepRecord:
    """Top eigenpair of the discretized B_alpha for one beta, with certification."""
    alpha = rescale_beta_to_alpha(beta, theta.gamma)
    n, L = policy.resolve(alpha, theta)
    grid = trapezoid_grid(L, n)
    op = b_alpha_operator(theta, alpha, grid, workers)
    res = top_k(op, 1, tol, method, seed)
    del op
    pair = res.top
    flags = list(res.flags)
    perron = perron_certify(pair, res.gap)
    if not perron.positive:
        flags.append("perron_not_positive")
    if perron.simple is False:
        flags.append("not_simple")
    mu_ref = None
    if check:
        if 2 * n <= policy.n_check_max:
            op2 = b_alpha_operator(theta, alpha, trapezoid_grid(L, 2 * n), workers)
            mu_ref = top_k(op2, 1, tol, method, seed).top.value
            del op2
            if abs(mu_ref - pair.value) > CONVERGENCE_SHIFT:
                flags.append("grid_not_converged")
        else:
            flags.append("convergence_unchecked")
    log.info("beta=%.6g alpha=%.6g n=%d L=%.4g mu=%.12f flags=%s",
             beta, alpha, n, L, pair.value, flags)
    return SweepRecord(beta, alpha, theta.gamma, pair.value, pair, n, L, res.gap, perron,
                       mu_ref, not flags, flags, weighted_norm(pair, theta, alpha, vark))


def sweep(theta: ThetaSpec, betas, policy: GridPolicy = GridPolicy(), tol: float = 1e-11,
          check: bool = True, seed: int = 0, vark: float = 0.5, method: str = "auto",
          max_workers: int = 1) -> list[SweepRecord]:
    """One :class:`SweepRecord` per beta (strictly decreasing, in (0, 1]).

    Records that fail certification or grid convergence carry flags and
    ``converged = False``; they are never dropped silently.
    """
    betas = _check_betas(betas)
    _warn_gamma(theta)

    def one(b):
        return solve_point(theta, b, policy, tol, check, seed, vark, method)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            return list(pool.map(one, betas))
    return [one(b) for b in betas]


def direct_top_eigenvalue(theta: ThetaSpec, beta: float, grid: Grid, tol: float = 1e-11) -> float:
    """Top eigenvalue of K_beta itself, on ``grid`` stretched by 1 / alpha.

    Used to check the unitary equivalence M_beta = mu_alpha.
    """
    alpha = rescale_beta_to_alpha(beta, theta.gamma)
    g = Grid(grid.nodes / alpha, grid.weights / alpha, grid.cutoff_L / alpha, grid.scheme)
    return top_k(nystrom(KernelSpec.K(beta, theta), g), 1, tol).top.value


# ---------------------------------------------------------------------------
# de-symmetrization gap


@dataclass
class DesymRow:
    beta: float
    alpha: float
    n: int
    L: float
    norm_diff: float
    ratio: float


@dataclass
class DesymReport:
    gamma: float
    rows: list[DesymRow]
    max_ratio: float
    growth_per_halving: list[float]
    bounded: bool

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "max_ratio": self.max_ratio,
                "growth_per_halving": self.growth_per_halving, "bounded": self.bounded,
                "rows": [r.__dict__ for r in self.rows]}


def desym_gap(theta: ThetaSpec, betas, policy: GridPolicy = GridPolicy(),
              growth_tol: float = 0.10) -> DesymReport:
    """||K_beta - K_beta^(l)|| / beta^(2 / gamma) along decreasing betas.

    The norm is computed in the rescaled picture, where the same unitary
    maps both kernels to B_alpha and its de-symmetrized version. ``bounded``
    holds when the ratio never grows faster than ``growth_tol`` per halving
    of beta.
    """
    betas = _check_betas(betas)
    rows = []
    for b in betas:
        alpha = rescale_beta_to_alpha(b, theta.gamma)
        n, L = policy.resolve(alpha, theta)
        grid = trapezoid_grid(L, n)
        d = operator_norm_diff(nystrom(KernelSpec.B(alpha, theta), grid),
                               nystrom(KernelSpec.B_desym(alpha, theta), grid))
        rows.append(DesymRow(b, alpha, n, L, d, d / b ** (2.0 / theta.gamma)))
    growth = []
    for r0, r1 in zip(rows, rows[1:]):
        halvings = math.log2(r0.beta / r1.beta)
        growth.append((r1.ratio / r0.ratio) ** (1.0 / halvings) - 1.0)
    ratios = [r.ratio for r in rows]
    bounded = all(math.isfinite(r) for r in ratios) and all(g <= growth_tol for g in growth)
    return DesymReport(theta.gamma, rows, max(ratios), growth, bounded)


# ---------------------------------------------------------------------------
# power-law fits


@dataclass
class FitResult:
    exponent: float
    constant: float
    r_squared: float
    window: tuple[float, float]
    betas: list[float]
    deficits: list[float]
    rescaled: list[float] | None = None

    def to_dict(self) -> dict:
        return dict(self.__dict__, window=list(self.window))


def _log_fit(x, y):
    lx, ly = np.log(x), np.log(y)
    design = np.column_stack([lx, np.ones_like(lx)])
    (slope, icpt), *_ = np.linalg.lstsq(design, ly, rcond=None)
    pred = design @ np.array([slope, icpt])
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return float(slope), float(math.exp(icpt)), r2


def fit_power_law(records=None, *, betas=None, deficits=None, window="half",
                  gamma: float | None = None) -> FitResult:
    """Least-squares fit of log(deficit) = exponent * log(beta) + log(constant).

    Parameters
    ----------
    records : list of SweepRecord, optional
        Sweep output; alternatively pass ``betas`` and ``deficits``.
    window : "half", "all", or (beta_lo, beta_hi)
        "half" keeps the geometrically smallest half of the betas, where
        the o(.) corrections are weakest.
    gamma : float, optional
        Homogeneity degree; taken from the records when omitted. Needed for
        the rescaled deficits ``deficit * beta^(-2 / (gamma + 1))``.
    """
    if records is not None:
        betas = [r.beta for r in records]
        deficits = [r.deficit for r in records]
        if gamma is None:
            gamma = records[0].gamma
    betas = np.asarray(betas, dtype=float)
    deficits = np.asarray(deficits, dtype=float)
    if betas.size < 4 or betas.size != deficits.size:
        raise ValueError("fit_power_law needs at least 4 (beta, deficit) pairs")
    if np.any(deficits <= 0) or np.any(betas <= 0):
        raise ValueError("deficits and betas must be positive")
    order = np.argsort(betas)
    betas, deficits = betas[order], deficits[order]
    if window == "half":
        keep = np.arange(betas.size) < max(2, math.ceil(betas.size / 2))
    elif window == "all":
        keep = np.ones(betas.size, dtype=bool)
    else:
        lo, hi = window
        keep = (betas >= lo) & (betas <= hi)
    if keep.sum() < 2:
        raise ValueError("fit window holds fewer than two points")
    slope, const, r2 = _log_fit(betas[keep], deficits[keep])
    rescaled = None
    if gamma is not None:
        rescaled = (deficits[keep] * betas[keep] ** (-2.0 / (gamma + 1.0))).tolist()
    return FitResult(slope, const, r2, (float(betas[keep][0]), float(betas[keep][-1])),
                     betas[keep].tolist(), deficits[keep].tolist(), rescaled)


# ---------------------------------------------------------------------------
# eigenfunction convergence and localization


def _as_pair(obj) -> EigenPair:
    return obj.pair if isinstance(obj, SweepRecord) else obj


def _outside_mass(pair: EigenPair, lo: float, hi: float) -> float:
    x = pair.grid.nodes
    v = pair.vector
    return float(np.sum(v[(x < lo) | (x > hi)] ** 2))


def eigenfunction_distance(record, phi1: EigenPair, mass_tol: float = 1e-6) -> float:
    """L^2 distance between psi_alpha and phi_1 on psi's grid.

    phi_1 is linearly interpolated onto psi's nodes (zero outside its own
    box); both are sign-normalized first. A :class:`TruncationWarning` is
    issued when either function carries more than ``mass_tol`` of its mass
    outside the other's box.
    """
    psi = _as_pair(record)
    xs, ws = psi.grid.nodes, psi.grid.weights
    xp = phi1.grid.nodes
    f = psi.function_values()
    f = f if psi.vector[np.argmax(np.abs(psi.vector))] > 0 else -f
    g_nodes = phi1.function_values()
    g_nodes = g_nodes if phi1.vector[np.argmax(np.abs(phi1.vector))] > 0 else -g_nodes
    g = np.interp(xs, xp, g_nodes, left=0.0, right=0.0)
    lost_phi = _outside_mass(phi1, xs[0], xs[-1])
    lost_psi = _outside_mass(psi, xp[0], xp[-1])
    if lost_phi > mass_tol or lost_psi > mass_tol:
        warnings.warn(f"grid overlap insufficient: mass outside overlap "
                      f"phi={lost_phi:.2e}, psi={lost_psi:.2e}", TruncationWarning, stacklevel=2)
    return float(np.sqrt(np.sum(ws * (f - g) ** 2) + lost_phi))


def fourier_mass(pair: EigenPair, R: float, block: int = 1024) -> float:
    """||hat(psi) chi_R||^2 for the quadrature-discretized psi.

    Exact for the discrete transform hat(psi)(xi) = (2 pi)^-1/2 sum_j w_j
    psi_j exp(-i xi x_j): the band-limited mass is the quadratic form with the
    sinc kernel sin(R (x - y)) / (pi (x - y)).
    """
    x = pair.grid.nodes
    u = pair.grid.weights * pair.function_values()
    total = 0.0
    for s in range(0, x.size, block):
        rows = slice(s, min(s + block, x.size))
        d = x[rows, None] - x[None, :]
        kern = (R / np.pi) * np.sinc(R * d / np.pi)
        total += float(u[rows] @ (kern @ u))
    return total


@dataclass
class LocalizationRow:
    R: float
    fourier_mass: float | None
    fourier_bound: float | None
    fourier_ok: bool | None
    spatial_mass: float
    spatial_deficit: float


@dataclass
class LocalizationReport:
    alpha: float
    lambda1: float
    gamma: float
    rows: list[LocalizationRow]
    decay_exponent: float
    C_hat: float
    fourier_ok: bool

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "lambda1": self.lambda1, "gamma": self.gamma,
                "decay_exponent": self.decay_exponent, "C_hat": self.C_hat,
                "fourier_ok": self.fourier_ok, "rows": [r.__dict__ for r in self.rows]}


def localization_report(record: SweepRecord, lambda1: float, radii,
                        deficit_floor: float = 1e-14) -> LocalizationReport:
    """Fourier- and position-space localization of psi_alpha.

    The Fourier bound ``||hat(psi) chi_R||^2 >= 1 - 4 lambda1 / R`` is checked
    only for radii with alpha R <= 1. The spatial deficit 1 - ||psi chi_R|| is
    fitted to a power law in R; ``C_hat`` is the smallest constant for which
    ``1 - 4 alpha lambda1 - C_hat / R^gamma`` bounds all spatial masses.
    """
    alpha, gamma = record.alpha, record.gamma
    pair = record.pair
    rows = []
    for R in radii:
        R = float(R)
        fm = fb = fok = None
        if alpha * R <= 1:
            fm = fourier_mass(pair, R)
            fb = 1 - 4 * lambda1 / R
            fok = bool(fm >= fb)
        out = _outside_mass(pair, -R, R)
        out = min(max(out, 0.0), 1.0)
        deficit = out / (1 + math.sqrt(1 - out))
        rows.append(LocalizationRow(R, fm, fb, fok, 1 - deficit, deficit))
    usable = [r for r in rows if r.spatial_deficit > deficit_floor]
    if len(usable) >= 2:
        slope, _, _ = _log_fit([r.R for r in usable], [r.spatial_deficit for r in usable])
        decay = -slope
    else:
        decay = math.inf
    base = 1 - 4 * alpha * lambda1
    C_hat = max([r.R ** gamma * max(0.0, base - r.spatial_mass) for r in rows] or [0.0])
    fourier_ok = all(r.fourier_ok for r in rows if r.fourier_ok is not None)
    return LocalizationReport(alpha, lambda1, gamma, rows, decay, C_hat, fourier_ok)


# ---------------------------------------------------------------------------
# parity


@dataclass
class ParityReport:
    beta: float
    alpha: float
    n: int
    L: float
    even: list[float]
    odd: list[float]
    even_top_exceeds_odd: bool
    full_check_error: float | None = None
    comparisons: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def parity_blocks(op: DiscreteOperator) -> tuple[np.ndarray, np.ndarray]:
    """Compressions of a reflection-invariant operator to even / odd vectors."""
    if not op.grid.is_symmetric or op.n % 2:
        raise ValueError("parity split needs an even-sized grid symmetric about 0")
    n = op.n
    m = n // 2
    pos = np.arange(m, n)
    mir = n - 1 - pos
    M = op.matrix
    app = M[np.ix_(pos, pos)]
    apm = M[np.ix_(pos, mir)]
    amp = M[np.ix_(mir, pos)]
    amm = M[np.ix_(mir, mir)]
    even = 0.5 * (app + apm + amp + amm)
    odd = 0.5 * (app - apm - amp + amm)
    return 0.5 * (even + even.T), 0.5 * (odd + odd.T)


def parity_split(theta: ThetaSpec, beta: float, policy: GridPolicy = GridPolicy(), k: int = 3,
                 full_check_max: int = 256, tol: float = 1e-11) -> ParityReport:
    """Top eigenvalues of B_alpha restricted to even and to odd functions."""
    if not theta.is_even:
        raise ValueError("parity split needs an even Theta")
    alpha = rescale_beta_to_alpha(beta, theta.gamma)
    n, L = policy.resolve(alpha, theta)
    n += n % 2
    op = b_alpha_operator(theta, alpha, trapezoid_grid(L, n))
    even, odd = parity_blocks(op)
    m = n // 2
    kk = min(k, m)
    ev = _block_top(even, kk, tol)
    ov = _block_top(odd, kk, tol)
    err = None
    if n <= full_check_max:
        full = np.sort(np.linalg.eigvalsh(op.matrix))
        union = np.sort(np.concatenate([np.linalg.eigvalsh(even), np.linalg.eigvalsh(odd)]))
        err = float(np.max(np.abs(full - union)))
    comps = [{"j": j + 1, "even": ev[j], "odd": ov[j], "even_minus_odd": ev[j] - ov[j]}
             for j in range(1, kk)]
    return ParityReport(beta, alpha, n, L, ev, ov, bool(ev[0] > ov[0]), err, comps)


def _block_top(block, k, tol):
    grid = trapezoid_grid(1.0, block.shape[0])
    return top_k(DiscreteOperator(block, grid, True), k, tol).values.tolist()


# ---------------------------------------------------------------------------
# higher eigenvalues


@dataclass
class ConjectureRow:
    j: int
    lambda_j: float
    rescaled: list[float]
    relative_mismatch: float
    flags: list[str] = field(default_factory=list)


@dataclass
class ConjectureReport:
    betas: list[float]
    alphas: list[float]
    rows: list[ConjectureRow]
    flags: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"betas": self.betas, "alphas": self.alphas, "flags": self.flags,
                "rows": [r.__dict__ for r in self.rows]}


def _resample(pair: EigenPair, nodes: np.ndarray) -> np.ndarray:
    return np.interp(nodes, pair.grid.nodes, pair.function_values(), left=0.0, right=0.0)


def higher_eigenvalue_deficits(theta: ThetaSpec, betas, j_max: int = 3, policy: GridPolicy = GridPolicy(),
                  reference: ModelReference | None = None, tol: float = 1e-11,
                  overlap_min: float = 0.8, degenerate_gap: float = 1e-6) -> ConjectureReport:
    """Rescaled deficits of the j-th largest eigenvalues against lambda_j.

    Eigenvalues are followed from one beta to the next by eigenvector overlap
    rather than by index, so that near-crossings are flagged instead of
    mislabelled. Exploratory: no assertion is made on the outcome.
    """
    if not 1 <= j_max <= 6:
        raise ValueError("j_max must lie in 1..6")
    betas = _check_betas(betas)
    if reference is None or reference.extrapolated.size < j_max:
        reference = lambda_reference(theta, k=j_max)
    lam = reference.extrapolated
    alphas, seqs, flags = [], [[] for _ in range(j_max)], []
    prev = None
    for b in betas:
        alpha = rescale_beta_to_alpha(b, theta.gamma)
        n, L = policy.resolve(alpha, theta)
        grid = trapezoid_grid(L, n)
        res = top_k(b_alpha_operator(theta, alpha, grid), j_max, tol)
        pairs = res.pairs
        vals = res.values
        if prev is not None:
            cur = np.array([p.function_values() for p in pairs])
            old = np.array([_resample(p, grid.nodes) for p in prev])
            overlap = np.abs(old @ (cur * grid.weights).T)
            assign = np.argmax(overlap, axis=1)
            for i, a in enumerate(assign):
                if a != i or overlap[i, a] < overlap_min:
                    flags.append(f"crossing_or_weak_overlap beta={b:.6g} j={i + 1} "
                                 f"-> {a + 1} (overlap {overlap[i, a]:.3f})")
            order = assign if len(set(assign.tolist())) == j_max else np.arange(j_max)
            pairs = [pairs[i] for i in order]
            vals = vals[order]
        for j in range(j_max):
            seqs[j].append((1 - vals[j]) / alpha)
        for j in range(j_max - 1):
            if abs(vals[j] - vals[j + 1]) < degenerate_gap:
                flags.append(f"near_degenerate beta={b:.6g} j={j + 1},{j + 2}")
        prev = pairs
        alphas.append(alpha)
    rows = []
    for j in range(j_max):
        rflags = []
        if j + 1 < lam.size and abs(lam[j + 1] - lam[j]) < degenerate_gap:
            rflags.append(f"lambda_{j + 1} and lambda_{j + 2} merged (degenerate)")
        if j > 0 and abs(lam[j] - lam[j - 1]) < degenerate_gap:
            rflags.append(f"lambda_{j} and lambda_{j + 1} merged (degenerate)")
        mis = abs(seqs[j][-1] - lam[j]) / lam[j]
        rows.append(ConjectureRow(j + 1, float(lam[j]), [float(v) for v in seqs[j]],
                                  float(mis), rflags))
    return ConjectureReport(betas, alphas, rows, flags)


# ---------------------------------------------------------------------------
# negative eigenvalues


@dataclass
class NegativeRow:
    beta: float
    alpha: float | None
    n: int
    L: float
    min_eig: float
    min_eig_refined: float | None
    delta: float | None


@dataclass
class NegativeScanReport:
    rows: list[NegativeRow]

    def to_dict(self) -> dict:
        return {"rows": [r.__dict__ for r in self.rows]}


def most_negative(op: DiscreteOperator, method: str = "dense") -> float:
    """Smallest eigenvalue of a symmetric discrete operator."""
    return float(bottom_k(op, 1, method=method).values[0])


def negative_scan(theta: ThetaSpec, betas, policy: GridPolicy = GridPolicy(n_max=2048),
                  cauchy_L: float = 30.0, cauchy_n: int = 512,
                  refine_max: int = 4096) -> NegativeScanReport:
    """Smallest eigenvalue of the discretized K_beta per beta, with n -> 2n delta.

    beta = 0 is the Cauchy kernel K_0 on [-cauchy_L, cauchy_L]; positive betas
    use the unitarily equivalent B_alpha. Exploratory: the sign is reported,
    not asserted.
    """
    rows = []
    for b in betas:
        b = float(b)
        if b == 0:
            spec, alpha, n, L = KernelSpec.K(0.0, theta), None, cauchy_n, cauchy_L
        else:
            alpha = rescale_beta_to_alpha(b, theta.gamma)
            n, L = policy.resolve(alpha, theta)
            spec = KernelSpec.B(alpha, theta)
        lo = most_negative(nystrom(spec, trapezoid_grid(L, n)))
        lo2 = delta = None
        if 2 * n <= refine_max:
            lo2 = most_negative(nystrom(spec, trapezoid_grid(L, 2 * n)))
            delta = abs(lo2 - lo)
        rows.append(NegativeRow(b, alpha, n, L, lo, lo2, delta))
    return NegativeScanReport(rows)
