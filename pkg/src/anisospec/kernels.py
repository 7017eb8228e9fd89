"""Kernel families of the anisotropic operator K_beta and its relatives.

All families are Cauchy-type kernels ``scale / (pi * (scale^2 + (x - y)^2 + extra))``:

=================  ==========  ===========================================
family             parameter   extra term in the denominator
=================  ==========  ===========================================
``K_beta``         beta        beta^2 Theta(x, y)          (scale 1)
``B_alpha``        alpha       alpha^3 Theta(x, y)         (scale alpha)
``K_beta_desym``   beta        beta^2 tau(x)               (scale 1)
``B_alpha_desym``  alpha       alpha^3 tau(x)              (scale alpha)
``S_alpha_h``      alpha       h                           (scale alpha)
``m_t``            t           0                           (scale t)
=================  ==========  ===========================================

K_beta and B_alpha are unitarily equivalent under x -> x / alpha with
alpha = beta^(2 / (gamma + 1)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .theta import ThetaSpec, eval_theta, tau

FAMILIES = ("K_beta", "B_alpha", "K_beta_desym", "B_alpha_desym", "S_alpha_h", "m_t")
SYMMETRIC_FAMILIES = frozenset({"K_beta", "B_alpha", "S_alpha_h", "m_t"})
_NEEDS_THETA = frozenset({"K_beta", "B_alpha", "K_beta_desym", "B_alpha_desym"})


@dataclass(frozen=True)
class KernelSpec:
    family: str
    param: float
    theta: ThetaSpec | None = None
    h: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family in _NEEDS_THETA and self.theta is None:
            raise ValueError(f"{self.family} needs a ThetaSpec")
        if not math.isfinite(self.param):
            raise ValueError("kernel parameter must be finite")
        # beta = 0 is admitted for K_beta only (the Cauchy kernel K_0)
        if self.family == "K_beta":
            if self.param < 0:
                raise ValueError("beta must be >= 0")
        elif not self.param > 0:
            raise ValueError(f"{self.family} needs a positive parameter")
        if self.h < 0:
            raise ValueError("shift h must be non-negative")

    @property
    def symmetric(self) -> bool:
        return self.family in SYMMETRIC_FAMILIES

    @property
    def peak(self) -> float:
        """Upper bound of the kernel, attained on the diagonal at the origin."""
        if self.family in ("K_beta", "K_beta_desym"):
            return 1 / math.pi
        return 1 / (math.pi * self.param)

    def to_dict(self) -> dict:
        return {"family": self.family, "param": self.param, "h": self.h,
                "theta": self.theta.to_dict() if self.theta else None}

    # convenience constructors
    @classmethod
    def K(cls, beta, theta):
        return cls("K_beta", float(beta), theta)

    @classmethod
    def B(cls, alpha, theta):
        return cls("B_alpha", float(alpha), theta)

    @classmethod
    def K_desym(cls, beta, theta):
        return cls("K_beta_desym", float(beta), theta)

    @classmethod
    def B_desym(cls, alpha, theta):
        return cls("B_alpha_desym", float(alpha), theta)

    @classmethod
    def S(cls, alpha, h=0.0):
        return cls("S_alpha_h", float(alpha), None, float(h))

    @classmethod
    def m(cls, t):
        return cls("m_t", float(t))


@dataclass(frozen=True)
class KernelDiff:
    """Pointwise difference ``a(x, y) - b(x, y)`` of two kernels."""

    a: KernelSpec
    b: KernelSpec

    @property
    def symmetric(self) -> bool:
        return self.a.symmetric and self.b.symmetric

    def to_dict(self) -> dict:
        return {"difference": [self.a.to_dict(), self.b.to_dict()]}


def eval_kernel(spec, x, y):
    """Evaluate a kernel (or a :class:`KernelDiff`) at ``(x, y)``; broadcasts."""
    if isinstance(spec, KernelDiff):
        return eval_kernel(spec.a, x, y) - eval_kernel(spec.b, x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite input")
    d2 = (x - y) ** 2
    p = spec.param
    fam = spec.family
    if fam == "K_beta":
        extra = p * p * eval_theta(spec.theta, x, y) if p > 0 else 0.0
        return 1 / (np.pi * (1.0 + d2 + extra))
    if fam == "B_alpha":
        return p / (np.pi * (p * p + d2 + p ** 3 * eval_theta(spec.theta, x, y)))
    if fam == "K_beta_desym":
        return 1 / (np.pi * (1.0 + d2 + p * p * tau(spec.theta, x)))
    if fam == "B_alpha_desym":
        return p / (np.pi * (p * p + d2 + p ** 3 * tau(spec.theta, x)))
    if fam == "S_alpha_h":
        return p / (np.pi * (p * p + d2 + spec.h))
    return p / (np.pi * (p * p + d2))


def rescale_beta_to_alpha(beta: float, gamma: float) -> float:
    """alpha = beta^(2 / (gamma + 1))."""
    if not (beta > 0 and gamma > 0):
        raise ValueError("beta and gamma must be positive")
    return beta ** (2.0 / (gamma + 1.0))


def alpha_to_beta(alpha: float, gamma: float) -> float:
    """Inverse of :func:`rescale_beta_to_alpha`."""
    if not (alpha > 0 and gamma > 0):
        raise ValueError("alpha and gamma must be positive")
    return alpha ** ((gamma + 1.0) / 2.0)


def fourier_m_hat(t, xi):
    """Unitary Fourier transform of m_t: exp(-t |xi|) / sqrt(2 pi)."""
    if not np.all(np.asarray(t) > 0):
        raise ValueError("t must be positive")
    return np.exp(-t * np.abs(xi)) / math.sqrt(2 * math.pi)
