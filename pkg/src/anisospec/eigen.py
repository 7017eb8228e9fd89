"""Extreme eigenpairs of symmetric discrete operators.

Two solvers are available: a dense one (LAPACK, used for small problems and as
the oracle) and a Lanczos iteration with full reorthogonalization. Both return
unit eigenvectors normalized so that their largest-magnitude entry is
positive, which makes the Perron eigenvector positive and comparable across
grids.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .discretize import DiscreteOperator, Grid

DENSE_MAX = 1024


@dataclass(eq=False)
class EigenPair:
    value: float
    vector: np.ndarray
    residual: float
    grid: Grid | None = None

    def function_values(self) -> np.ndarray:
        """Pointwise values of the L^2-normalized eigenfunction on the grid."""
        if self.grid is None:
            raise ValueError("eigenpair has no grid attached")
        return self.vector / np.sqrt(self.grid.weights)

    def export(self, path: str) -> str:
        """Write the vector to ``<path>.bin`` and metadata to ``<path>.json``."""
        bin_path = f"{path}.bin"
        tmp = f"{bin_path}.tmp{os.getpid()}"
        with open(tmp, "wb") as fh:
            fh.write(np.ascontiguousarray(self.vector, dtype="<f8").tobytes())
        os.replace(tmp, bin_path)
        meta = {"value": self.value, "residual": self.residual,
                "vector_path": os.path.basename(bin_path), "n": int(self.vector.size),
                "dtype": "float64", "byteorder": "little"}
        if self.grid is not None:
            meta["grid"] = self.grid.meta()
        json_path = f"{path}.json"
        tmp = f"{json_path}.tmp{os.getpid()}"
        with open(tmp, "w") as fh:
            json.dump(meta, fh, indent=1, sort_keys=True)
        os.replace(tmp, json_path)
        return json_path


@dataclass(eq=False)
class SpectrumResult:
    pairs: list[EigenPair]
    gap: float
    method: str
    converged: bool = True
    flags: list[str] = field(default_factory=list)
    iterations: int = 0

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.pairs])

    @property
    def top(self) -> EigenPair:
        return self.pairs[0]


def sign_normalize(v: np.ndarray) -> np.ndarray:
    """Flip ``v`` so that its largest-magnitude entry (first one on ties) is positive."""
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v


@dataclass
class LanczosResult:
    values: np.ndarray
    vectors: np.ndarray
    residual_estimates: np.ndarray
    iterations: int
    converged: bool


def lanczos(matvec, n: int, k: int = 1, tol: float = 1e-10, max_iter: int | None = None,
            seed: int = 0, check_every: int = 5) -> LanczosResult:
    """Largest ``k`` eigenpairs of a symmetric operator given by ``matvec``.

    Lanczos with full (two-pass classical Gram-Schmidt) reorthogonalization.
    Convergence is declared when the Ritz residual estimates
    ``|b_j s_{j,i}|`` of the top ``k`` Ritz pairs are all below ``tol``.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    m_max = min(n, max_iter if max_iter is not None else max(300, 20 * k))
    rng = np.random.default_rng(seed)
    q = rng.standard_normal(n)
    q /= np.linalg.norm(q)
    Q = np.empty((n, m_max))
    a = np.empty(m_max)
    b = np.empty(m_max)
    theta = s = None
    converged = False
    m = 0
    for j in range(m_max):
        Q[:, j] = q
        w = matvec(q)
        a[j] = q @ w
        w = w - a[j] * q
        if j > 0:
            w -= b[j - 1] * Q[:, j - 1]
        for _ in range(2):
            w -= Q[:, : j + 1] @ (Q[:, : j + 1].T @ w)
        b[j] = np.linalg.norm(w)
        m = j + 1
        small = b[j] <= 1e-14 * max(1.0, abs(a[j]))
        if m >= k and (m % check_every == 0 or small or m == m_max):
            theta, s = sla.eigh_tridiagonal(a[:m], b[: m - 1])
            res = np.abs(b[j] * s[-1, -k:])
            if np.all(res <= tol):
                converged = True
                break
        if m == m_max:
            break
        if small:
            # invariant subspace found: continue from a fresh orthogonal direction
            b[j] = 0.0
            q = rng.standard_normal(n)
            for _ in range(2):
                q -= Q[:, :m] @ (Q[:, :m].T @ q)
            q /= np.linalg.norm(q)
        else:
            q = w / b[j]
    if theta is None or theta.size != m:
        theta, s = sla.eigh_tridiagonal(a[:m], b[: m - 1])
    idx = np.arange(m - 1, m - 1 - min(k, m), -1)
    vecs = Q[:, :m] @ s[:, idx]
    res = np.abs(b[m - 1] * s[-1, idx])
    return LanczosResult(theta[idx], vecs, res, m, converged)


def _order_pairs(values, vectors, descending=True):
    # by value, then lexicographically by vector entries (deterministic ties)
    keyed = sorted(range(len(values)),
                   key=lambda i: ((-values[i] if descending else values[i]),
                                  tuple(vectors[:, i])))
    return keyed


def _finish(op, values, vectors, k, method, descending, converged=True, iterations=0,
            tol=None):
    m = op.matrix
    vecs = np.column_stack([sign_normalize(vectors[:, i] / np.linalg.norm(vectors[:, i]))
                            for i in range(vectors.shape[1])])
    order = _order_pairs(values, vecs, descending)
    pairs = []
    for i in order:
        v = vecs[:, i]
        lam = float(values[i])
        r = float(np.linalg.norm(m @ v - lam * v))
        pairs.append(EigenPair(lam, v, r, op.grid))
    gap = abs(pairs[0].value - pairs[1].value) if len(pairs) > 1 else float("inf")
    flags = []
    if not converged:
        flags.append("lanczos_not_converged")
    if tol is not None and any(p.residual > tol for p in pairs[:k]):
        flags.append("residual_above_tol")
    return SpectrumResult(pairs[:k], gap, method, converged and not flags, flags, iterations)


def _choose(method, n, dense_max):
    if method == "auto":
        return "dense" if n <= dense_max else "lanczos"
    if method not in ("dense", "lanczos"):
        raise ValueError(f"unknown method {method!r}")
    return method


def top_k(op: DiscreteOperator, k: int = 1, tol: float = 1e-10, method: str = "auto",
          seed: int = 0, dense_max: int = DENSE_MAX, max_iter: int | None = None) -> SpectrumResult:
    """The ``k`` largest eigenvalues (descending) with eigenvectors and gap.

    One extra eigenvalue is computed when possible so that ``gap`` is the
    distance between the two largest eigenvalues.
    """
    if not op.symmetric:
        raise ValueError("top_k needs a symmetric operator")
    n = op.n
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    kk = min(k + 1, n)
    method = _choose(method, n, dense_max)
    if method == "dense":
        vals, vecs = sla.eigh(op.matrix, subset_by_index=[n - kk, n - 1])
        return _finish(op, vals, vecs, k, "dense", True, tol=None)
    lr = lanczos(lambda v: op.matrix @ v, n, kk, tol, max_iter, seed)
    return _finish(op, lr.values, lr.vectors, k, "lanczos", True, lr.converged,
                   lr.iterations, tol)


def gershgorin_upper(m: np.ndarray) -> float:
    """Upper bound of the spectrum: max_i (m_ii + sum_{j != i} |m_ij|)."""
    d = np.diag(m)
    return float(np.max(d + np.abs(m).sum(axis=1) - np.abs(d)))


def bottom_k(op: DiscreteOperator, k: int = 1, tol: float = 1e-10, method: str = "auto",
             seed: int = 0, dense_max: int = DENSE_MAX, max_iter: int | None = None) -> SpectrumResult:
    """The ``k`` smallest eigenvalues (ascending).

    The Lanczos path runs on ``sigma I - M`` with sigma the Gershgorin upper
    bound, so the wanted eigenvalues become the largest ones.
    """
    if not op.symmetric:
        raise ValueError("bottom_k needs a symmetric operator")
    n = op.n
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    kk = min(k + 1, n)
    method = _choose(method, n, dense_max)
    if method == "dense":
        vals, vecs = sla.eigh(op.matrix, subset_by_index=[0, kk - 1])
        return _finish(op, vals, vecs, k, "dense", False, tol=None)
    sigma = gershgorin_upper(op.matrix)
    lr = lanczos(lambda v: sigma * v - op.matrix @ v, n, kk, tol, max_iter, seed)
    return _finish(op, sigma - lr.values, lr.vectors, k, "lanczos", False, lr.converged,
                   lr.iterations, tol)


@dataclass
class PerronReport:
    positive: bool
    min_entry: float
    sign_changes: int
    gap: float | None
    simple: bool | None
    boundary_tolerated: int = 0

    @property
    def passed(self) -> bool:
        return self.positive and self.simple is not False

    def to_dict(self) -> dict:
        return dict(self.__dict__, passed=self.passed)


def perron_certify(pair: EigenPair, gap: float | None = None, boundary_tol: float = 0.0,
                   boundary_fraction: float = 0.1, relative_gap: float = 1e-8) -> PerronReport:
    """Check strict positivity of a (sign-normalized) eigenvector and simplicity.

    With ``boundary_tol > 0`` (model-operator eigenvectors on a periodic box),
    entries within ``boundary_fraction * L`` of the box edge only need to be
    ``>= -boundary_tol * max|v|``.
    """
    v = sign_normalize(np.asarray(pair.vector, dtype=float))
    interior = np.ones(v.size, dtype=bool)
    tolerated = 0
    if boundary_tol > 0 and pair.grid is not None:
        L = pair.grid.cutoff_L
        interior = np.abs(pair.grid.nodes) <= (1 - boundary_fraction) * L
        edge = v[~interior]
        if np.any(edge < -boundary_tol * np.max(np.abs(v))):
            interior[:] = True
        else:
            tolerated = int(np.sum(edge <= 0))
    positive = bool(np.min(v[interior]) > 0)
    signs = np.sign(v[v != 0])
    changes = int(np.sum(signs[1:] != signs[:-1]))
    simple = None
    if gap is not None:
        simple = bool(gap > relative_gap * abs(pair.value))
    return PerronReport(positive, float(v.min()), changes, gap, simple, tolerated)
