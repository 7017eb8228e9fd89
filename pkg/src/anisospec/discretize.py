"""Finite-dimensional images of the integral and model operators.

Integral operators are discretized by Nystrom quadrature on a truncated
interval [-L, L] and stored in the symmetrized form
``sqrt(w_i) k(x_i, x_j) sqrt(w_j)``, which is similar to the plain Nystrom
matrix ``k(x_i, x_j) w_j`` and so has the same spectrum.

The model operator |D| + tau / 2 is discretized by Fourier collocation on the
periodic box [-L, L): |D| becomes the circulant matrix with symbol |pi k / L|.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import circulant

from .kernels import KernelDiff, KernelSpec, eval_kernel
from .theta import ThetaSpec, tau

SCHEMES = ("trapezoid_uniform", "gauss_legendre_composite", "fourier_collocation")
QUADRATURE_SCHEMES = ("trapezoid_uniform", "gauss_legendre_composite")

_BLOCK = 512


@dataclass(frozen=True, eq=False)
class Grid:
    nodes: np.ndarray
    weights: np.ndarray
    cutoff_L: float
    scheme: str

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.nodes.shape != self.weights.shape or self.nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-D arrays of equal length")
        if self.nodes.size > 1 and not np.all(np.diff(self.nodes) > 0):
            raise ValueError("grid nodes must be strictly increasing")
        if not np.all(self.weights > 0):
            raise ValueError("quadrature weights must be positive")

    @property
    def n(self) -> int:
        return self.nodes.size

    @property
    def is_symmetric(self) -> bool:
        return bool(np.allclose(self.nodes, -self.nodes[::-1], rtol=0, atol=1e-12 * self.cutoff_L)
                    and np.allclose(self.weights, self.weights[::-1], rtol=1e-12, atol=0))

    def same_as(self, other: "Grid") -> bool:
        return (self.scheme == other.scheme and self.n == other.n
                and np.array_equal(self.nodes, other.nodes)
                and np.array_equal(self.weights, other.weights))

    def meta(self) -> dict:
        return {"n": self.n, "L": self.cutoff_L, "scheme": self.scheme}


def trapezoid_grid(L: float, n: int) -> Grid:
    """Uniform rule with nodes at the cell midpoints of [-L, L].

    For integrands that are negligible at +-L this coincides with the
    trapezoid rule; midpoints keep the node set symmetric about 0 for any n.
    """
    if not (L > 0 and n >= 1):
        raise ValueError("need L > 0 and n >= 1")
    h = 2.0 * L / n
    nodes = -L + h * (np.arange(n) + 0.5)
    return Grid(nodes, np.full(n, h), float(L), "trapezoid_uniform")


def gauss_legendre_grid(L: float, panels: int, order: int = 16) -> Grid:
    """Composite Gauss-Legendre rule with ``panels`` equal panels."""
    if not (L > 0 and panels >= 1 and order >= 1):
        raise ValueError("need L > 0, panels >= 1, order >= 1")
    t, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(-L, L, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return Grid(nodes, weights, float(L), "gauss_legendre_composite")


def fourier_grid(L: float, n: int) -> Grid:
    """Uniform periodic collocation grid x_j = -L + 2 L j / n, n a power of two."""
    if not (L > 0 and n >= 2 and n & (n - 1) == 0):
        raise ValueError("fourier_collocation needs L > 0 and n a power of two")
    h = 2.0 * L / n
    return Grid(-L + h * np.arange(n), np.full(n, h), float(L), "fourier_collocation")


@dataclass(eq=False)
class DiscreteOperator:
    matrix: np.ndarray
    grid: Grid
    symmetric: bool
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.grid.n
        if self.matrix.shape != (n, n):
            raise ValueError("matrix shape does not match grid")

    @property
    def n(self) -> int:
        return self.grid.n

    def to_function(self, vector):
        """Values f(x_j) of the L^2 function represented by a unit vector."""
        return np.asarray(vector) / np.sqrt(self.grid.weights)

    def save(self, path: str) -> tuple[str, str]:
        """Write ``<path>.bin`` (little-endian float64, row-major) and ``<path>.json``."""
        bin_path, json_path = f"{path}.bin", f"{path}.json"
        _atomic_bytes(bin_path, np.ascontiguousarray(self.matrix, dtype="<f8").tobytes())
        sidecar = {
            "n": self.n, "L": self.grid.cutoff_L, "scheme": self.grid.scheme,
            "symmetric": self.symmetric, "dtype": "float64", "byteorder": "little",
            "order": "C", "nodes": self.grid.nodes.tolist(),
            "weights": self.grid.weights.tolist(), "provenance": self.provenance,
        }
        _atomic_bytes(json_path, json.dumps(sidecar, indent=1, sort_keys=True).encode())
        return bin_path, json_path

    @classmethod
    def load(cls, path: str) -> "DiscreteOperator":
        with open(f"{path}.json") as fh:
            meta = json.load(fh)
        n = meta["n"]
        data = np.fromfile(f"{path}.bin", dtype="<f8")
        if data.size != n * n:
            raise ValueError("binary size does not match sidecar")
        grid = Grid(np.asarray(meta["nodes"]), np.asarray(meta["weights"]),
                    meta["L"], meta["scheme"])
        return cls(data.reshape(n, n).astype(float), grid, meta["symmetric"],
                   meta.get("provenance", {}))


def _atomic_bytes(path: str, payload: bytes):
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(payload)
    os.replace(tmp, path)


def _symmetrize_inplace(m: np.ndarray, block: int = _BLOCK):
    n = m.shape[0]
    for i in range(0, n, block):
        ii = slice(i, min(i + block, n))
        d = m[ii, ii]
        m[ii, ii] = 0.5 * (d + d.T)
        for j in range(i + block, n, block):
            jj = slice(j, min(j + block, n))
            avg = 0.5 * (m[ii, jj] + m[jj, ii].T)
            m[ii, jj] = avg
            m[jj, ii] = avg.T


def nystrom(spec, grid: Grid, workers: int = 1) -> DiscreteOperator:
    """Symmetrized Nystrom matrix of an integral kernel on a quadrature grid.

    Parameters
    ----------
    spec : KernelSpec or KernelDiff
        Kernel to discretize.
    grid : Grid
        A quadrature grid (``trapezoid_uniform`` or ``gauss_legendre_composite``).
    workers : int
        Row blocks are assembled by this many threads.

    Returns
    -------
    DiscreteOperator
        ``M_ij = sqrt(w_i) k(x_i, x_j) sqrt(w_j)``; exactly symmetric for
        the symmetric kernel families.
    """
    if grid.scheme not in QUADRATURE_SCHEMES:
        raise ValueError("nystrom needs a quadrature grid, got " + grid.scheme)
    n = grid.n
    x = grid.nodes
    sw = np.sqrt(grid.weights)
    m = np.empty((n, n))

    def fill(start):
        rows = slice(start, min(start + _BLOCK, n))
        m[rows] = eval_kernel(spec, x[rows, None], x[None, :])
        m[rows] *= sw[rows, None]
        m[rows] *= sw[None, :]

    starts = range(0, n, _BLOCK)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(fill, starts))
    else:
        for s in starts:
            fill(s)
    symmetric = spec.symmetric
    if symmetric:
        _symmetrize_inplace(m)
    if not np.all(np.isfinite(m)):
        raise FloatingPointError("non-finite entries in Nystrom matrix")
    prov = {"kernel": spec.to_dict(), **grid.meta()}
    return DiscreteOperator(m, grid, symmetric, prov)


def plain_nystrom(spec, grid: Grid) -> np.ndarray:
    """Unsymmetrized Nystrom matrix ``k(x_i, x_j) w_j`` (small grids only)."""
    x = grid.nodes
    return eval_kernel(spec, x[:, None], x[None, :]) * grid.weights[None, :]


def multiplier_matrix(grid: Grid) -> np.ndarray:
    """Circulant collocation matrix of |D| on the periodic grid."""
    n, L = grid.n, grid.cutoff_L
    k = np.fft.fftfreq(n, d=1.0 / n)
    xi = np.abs(np.pi * k / L)
    col = np.fft.ifft(xi).real
    d = circulant(col)
    return 0.5 * (d + d.T)


def model_operator(theta: ThetaSpec, grid: Grid, potential_scale: float = 1.0) -> DiscreteOperator:
    """Collocation matrix of |D| + potential_scale * tau / 2.

    ``potential_scale = 1`` gives the model operator whose lowest eigenvalue
    governs the top of the spectrum of K_beta; other scales are used only to
    compare against literature values quoted for rescaled potentials.
    """
    if grid.scheme != "fourier_collocation":
        raise ValueError("model_operator needs a fourier_collocation grid")
    m = multiplier_matrix(grid)
    m[np.diag_indices_from(m)] += 0.5 * potential_scale * tau(theta, grid.nodes)
    prov = {"model_operator": theta.to_dict(), "potential_scale": potential_scale,
            **grid.meta()}
    return DiscreteOperator(m, grid, True, prov)


def operator_norm_diff(a: DiscreteOperator, b: DiscreteOperator, tol: float = 1e-10,
                       max_iter: int = 20000, seed: int = 0) -> float:
    """Spectral norm of ``a - b`` by power iteration on (a - b)^T (a - b)."""
    if not a.grid.same_as(b.grid):
        raise ValueError("operators live on different grids")
    d = a.matrix - b.matrix
    if not np.any(d):
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(d.shape[1])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max_iter):
        w = d.T @ (d @ v)
        new = float(np.linalg.norm(w))
        if new == 0.0:
            return 0.0
        v = w / new
        if abs(new - est) <= tol * new:
            est = new
            break
        est = new
    return math.sqrt(est)


def auto_cutoff(theta: ThetaSpec, alpha: float, tail_ratio: float = 1e4) -> float:
    """Smallest L with alpha * tau(+-L) >= tail_ratio.

    There the B_alpha kernel has dropped below 1 / tail_ratio of its peak.
    """
    t1 = min(theta.diag_coeffs)
    return (tail_ratio / (alpha * t1)) ** (1.0 / theta.gamma)


@dataclass(frozen=True)
class GridPolicy:
    """Maps alpha to a trapezoid grid (n, L) for B_alpha.

    The spacing is ``alpha / points_per_width``; the trapezoid error of a
    Lorentzian of width alpha is about ``2 exp(-2 pi points_per_width)``.
    The cutoff follows :func:`auto_cutoff`, clipped to [L_min, L_max]; when
    the resulting n exceeds ``n_max`` the cutoff is shrunk to fit and the
    resolution is kept.
    """

    points_per_width: float = 3.0
    tail_ratio: float = 1e4
    L_min: float = 4.0
    L_max: float = 16.0
    n_max: int = 8192
    n_check_max: int = 16384
    n: int | None = None
    L: float | None = None

    def resolve(self, alpha: float, theta: ThetaSpec) -> tuple[int, float]:
        if self.L is not None:
            L = float(self.L)
        else:
            L = min(max(auto_cutoff(theta, alpha, self.tail_ratio), self.L_min), self.L_max)
        if self.n is not None:
            return int(self.n), L
        h = alpha / self.points_per_width
        n = int(math.ceil(2 * L / h))
        n += n % 2
        if n > self.n_max:
            n = self.n_max - self.n_max % 2
            if self.L is None:
                L = 0.5 * n * h
        return n, L

    def grid(self, alpha: float, theta: ThetaSpec) -> Grid:
        n, L = self.resolve(alpha, theta)
        return trapezoid_grid(L, n)

    def to_dict(self) -> dict:
        return dict(self.__dict__)
