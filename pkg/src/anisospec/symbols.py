"""Symbol calculus for the de-symmetrized operator and the Schur bound.

The de-symmetrized rescaled operator has the symbol

    b(x, xi) = exp(-alpha |xi| g(x)) / g(x),   g(x) = sqrt(1 + alpha tau(x)),

and ``I - alpha A`` approximates it with symbol ``1 - alpha a(x, xi)``,
``a = |xi| + tau / 2``. The error r = b - (1 - alpha a) splits into a
multiplication part r1(x) and a part r2(x, xi) that vanishes at xi = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .discretize import Grid, QUADRATURE_SCHEMES
from .kernels import eval_kernel
from .theta import ThetaSpec, tau


@dataclass(frozen=True)
class SymbolEval:
    theta: ThetaSpec
    alpha: float
    vark: float = 0.5

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not 0 < self.vark <= 1:
            raise ValueError("vark must lie in (0, 1]")


@dataclass
class SymbolValues:
    g: np.ndarray
    b_l: np.ndarray
    a: np.ndarray
    r: np.ndarray
    r1: np.ndarray
    r2: np.ndarray


def g_alpha(theta: ThetaSpec, alpha: float, x):
    return np.sqrt(1.0 + alpha * tau(theta, x))


def r1_alpha(theta: ThetaSpec, alpha: float, x):
    """1/g + alpha tau / 2 - 1, written as t^2 (g + 2) / (2 g (1 + g)^2), t = alpha tau."""
    t = alpha * tau(theta, x)
    g = np.sqrt(1.0 + t)
    return t * t * (g + 2.0) / (2.0 * g * (1.0 + g) ** 2)


def _s_minus_one_minus_exp(s):
    # s - (1 - exp(-s)) without cancellation for small s
    s = np.asarray(s, dtype=float)
    series = s * s * (0.5 - s / 6.0 + s * s / 24.0 - s ** 3 / 120.0)
    return np.where(s < 1e-2, series, s + np.expm1(-s))


def eval_symbols(se: SymbolEval, x, xi) -> SymbolValues:
    """All symbol values at (x, xi); broadcasts.

    ``r`` is computed directly as ``b - (1 - alpha a)``; ``r1`` and ``r2`` by
    their closed forms, with
    ``r2 = (alpha / g) int_0^{|xi| g} (1 - exp(-alpha t)) dt
         = (s - (1 - exp(-s))) / g``,  ``s = alpha |xi| g``.
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    al = se.alpha
    tx = tau(se.theta, x)
    g = np.sqrt(1.0 + al * tx)
    s = al * np.abs(xi) * g
    b = np.exp(-s) / g
    a = np.abs(xi) + 0.5 * tx
    r = b - (1.0 - al * a)
    r1 = r1_alpha(se.theta, al, x)
    r2 = _s_minus_one_minus_exp(s) / g
    return SymbolValues(g, b, a, r, r1, r2)


def zeta(x):
    """Monotone cutoff equal to x on [0, 1] and to 2 on [2, inf): min(x, 2)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise ValueError("zeta is defined for finite x >= 0")
    out = np.minimum(x, 2.0)
    return out if out.ndim else float(out)


def bracket(x):
    """<x> = sqrt(1 + x^2)."""
    return np.sqrt(1.0 + np.asarray(x, dtype=float) ** 2)


def e1_alpha(theta: ThetaSpec, alpha: float, x):
    """r1(x) / (<x>^gamma zeta(alpha <x>^gamma))."""
    w = bracket(x) ** theta.gamma
    return r1_alpha(theta, alpha, x) / (w * zeta(alpha * w))


@dataclass
class BoundReport:
    alphas: list[float]
    sup_values: list[float]
    ratios: list[float]
    max_ratio: float
    bounded: bool
    growth: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def verify_e1_bound(se: SymbolEval, alphas, xs, growth_tol: float = 0.10) -> BoundReport:
    """sup_x |e1_alpha| / alpha over a decreasing list of alphas.

    ``bounded`` holds when no step along the list increases the ratio by more
    than ``growth_tol`` relative to the previous one.
    """
    xs = np.asarray(xs, dtype=float)
    sups, ratios = [], []
    for al in alphas:
        sup = float(np.max(np.abs(e1_alpha(se.theta, al, xs))))
        sups.append(sup)
        ratios.append(sup / al)
    growth = [ratios[i + 1] / ratios[i] - 1 if ratios[i] > 0 else 0.0
              for i in range(len(ratios) - 1)]
    bounded = all(gr <= growth_tol for gr in growth) and all(map(math.isfinite, ratios))
    return BoundReport(list(map(float, alphas)), sups, ratios,
                       max(ratios) if ratios else 0.0, bounded, growth)


def schur_bound(spec, grid: Grid) -> float:
    """sqrt(M1 M2) with M1, M2 the maximal weighted row / column absolute sums.

    Bounds the spectral norm of the symmetrized Nystrom matrix of ``spec``.
    """
    if grid.scheme not in QUADRATURE_SCHEMES:
        raise ValueError("schur_bound needs a quadrature grid")
    x, w = grid.nodes, grid.weights
    n = grid.n
    row = np.zeros(n)
    col = np.zeros(n)
    for s in range(0, n, 512):
        rows = slice(s, min(s + 512, n))
        k = np.abs(eval_kernel(spec, x[rows, None], x[None, :]))
        row[rows] = k @ w
        col += w[rows] @ k
    return math.sqrt(float(row.max()) * float(col.max()))
