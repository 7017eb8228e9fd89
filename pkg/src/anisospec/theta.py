"""Homogeneous symmetric weights Theta(x, y) and their diagonal trace tau(x).

Three families are supported:

``radial_power``
    Theta = (x^2 + y^2)^sigma, homogeneous of degree gamma = 2 sigma.
``abs_sum``
    Theta = (|x|^p + |y|^p)^(gamma / p).
``custom``
    Theta = r^gamma T(phi), with T tabulated at equally spaced polar angles on
    the unit circle and interpolated by a periodic monotone cubic (PCHIP).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator

KINDS = ("radial_power", "abs_sum", "custom")

# homogeneity tolerance: closed forms vs interpolated tables
CLOSED_FORM_TOL = 1e-10
TABULATED_TOL = 1e-6


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise ValueError("non-finite input")


@dataclass(frozen=True)
class ThetaSpec:
    """A homogeneous, non-negative weight Theta of degree ``gamma``.

    Use the constructors :meth:`radial_power`, :meth:`abs_sum` and
    :meth:`custom` rather than building instances by hand.
    """

    kind: str
    gamma: float
    params: dict = field(default_factory=dict)
    lipschitz_const: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown Theta kind {self.kind!r}")
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError("gamma must be a positive real")
        if self.kind == "radial_power":
            sigma = self.params.get("sigma")
            if sigma is None or not sigma > 0:
                raise ValueError("radial_power needs params.sigma > 0")
            if abs(2 * sigma - self.gamma) > 1e-12 * self.gamma:
                raise ValueError("radial_power requires gamma = 2 sigma")
        elif self.kind == "abs_sum":
            p = self.params.get("p")
            if p is None or not p > 0:
                raise ValueError("abs_sum needs params.p > 0")
        else:
            values = np.asarray(self.params.get("values", ()), dtype=float)
            if values.ndim != 1 or values.size < 8:
                raise ValueError("custom Theta needs at least 8 circle values")
            _check_finite(values)

    # -- constructors -----------------------------------------------------
    @classmethod
    def radial_power(cls, sigma: float) -> "ThetaSpec":
        return cls("radial_power", 2.0 * sigma, {"sigma": float(sigma)})

    @classmethod
    def abs_sum(cls, p: float, gamma: float) -> "ThetaSpec":
        return cls("abs_sum", float(gamma), {"p": float(p)})

    @classmethod
    def custom(cls, values, gamma: float) -> "ThetaSpec":
        """Theta from its values at angles ``2 pi k / len(values)``."""
        return cls("custom", float(gamma), {"values": [float(v) for v in values]})

    # -- serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        d = {"kind": self.kind, "gamma": self.gamma, "params": dict(self.params)}
        if self.lipschitz_const is not None:
            d["lipschitz_const"] = self.lipschitz_const
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ThetaSpec":
        params = dict(d.get("params", {}))
        if d["kind"] == "radial_power" and "gamma" not in d:
            return cls.radial_power(params["sigma"])
        return cls(d["kind"], float(d["gamma"]), params, d.get("lipschitz_const"))

    # -- internals --------------------------------------------------------
    @property
    def is_tabulated(self) -> bool:
        return self.kind == "custom"

    @property
    def homogeneity_tol(self) -> float:
        return TABULATED_TOL if self.is_tabulated else CLOSED_FORM_TOL

    @cached_property
    def _circle(self) -> PchipInterpolator:
        # periodic extension by one period on each side keeps PCHIP slopes
        # consistent across the 0 / 2 pi seam
        values = np.asarray(self.params["values"], dtype=float)
        m = values.size
        angles = 2 * np.pi * np.arange(m) / m
        ext_a = np.concatenate([angles - 2 * np.pi, angles, angles + 2 * np.pi])
        ext_v = np.tile(values, 3)
        return PchipInterpolator(ext_a, ext_v)

    def circle_value(self, phi):
        """Theta(cos phi, sin phi)."""
        phi = np.asarray(phi, dtype=float)
        if self.kind == "custom":
            return self._circle(np.mod(phi, 2 * np.pi))
        return eval_theta(self, np.cos(phi), np.sin(phi))

    @cached_property
    def diag_coeffs(self) -> tuple[float, float]:
        """(Theta(1, 1), Theta(-1, -1))."""
        if self.kind == "radial_power":
            v = 2.0 ** self.params["sigma"]
            return v, v
        if self.kind == "abs_sum":
            v = 2.0 ** (self.gamma / self.params["p"])
            return v, v
        s = math.sqrt(2.0) ** self.gamma
        return (s * float(self._circle(np.pi / 4)),
                s * float(self._circle(5 * np.pi / 4)))

    @property
    def is_even(self) -> bool:
        """True when Theta(-x, -y) = Theta(x, y) identically."""
        if self.kind != "custom":
            return True
        values = np.asarray(self.params["values"])
        m = values.size
        if m % 2:
            return False
        return bool(np.allclose(values, np.roll(values, m // 2), rtol=1e-14, atol=0))


def eval_theta(spec: ThetaSpec, x, y):
    """Evaluate Theta(x, y); broadcasts over array arguments."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_finite(x, y)
    # both closed forms are evaluated scale-free so that tiny or huge
    # arguments neither underflow nor overflow before the final power
    if spec.kind in ("radial_power", "abs_sum"):
        p = 2.0 if spec.kind == "radial_power" else spec.params["p"]
        ax, ay = np.abs(x), np.abs(y)
        hi, lo = np.maximum(ax, ay), np.minimum(ax, ay)
        ratio = np.divide(lo, hi, out=np.zeros_like(hi), where=hi > 0)
        return hi ** spec.gamma * (1.0 + ratio ** p) ** (spec.gamma / p)
    r = np.hypot(x, y)
    phi = np.arctan2(y, x)
    out = r ** spec.gamma * spec._circle(np.mod(phi, 2 * np.pi))
    return np.where(r == 0, 0.0, out)


def tau(spec: ThetaSpec, x):
    """Diagonal trace tau(x) = Theta(x, x) = |x|^gamma Theta(+-1, +-1)."""
    x = np.asarray(x, dtype=float)
    _check_finite(x)
    plus, minus = spec.diag_coeffs
    return np.abs(x) ** spec.gamma * np.where(x >= 0, plus, minus)


@dataclass
class ValidationReport:
    passed: bool
    symmetry_defect: float
    homogeneity_defect: float
    circle_min: float
    circle_max: float
    lipschitz_const: float
    asymptotics_covered: bool
    messages: list[str] = field(default_factory=list)
    spec: ThetaSpec | None = None

    def to_dict(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k != "spec"}
        d["spec"] = self.spec.to_dict() if self.spec is not None else None
        return d


def validate(spec: ThetaSpec, samples: int = 256, seed: int = 0) -> ValidationReport:
    """Check symmetry, homogeneity, circle bounds and the Lipschitz condition.

    Never raises on a bad weight; failures are reported in the returned
    :class:`ValidationReport`. ``report.spec`` carries the input with its
    estimated Lipschitz constant filled in.
    """
    if samples < 64:
        raise ValueError("validate needs at least 64 samples")
    msgs = []
    rng = np.random.default_rng(seed)
    try:
        phi = 2 * np.pi * np.arange(samples) / samples
        cx, cy = np.cos(phi), np.sin(phi)
        on_circle = eval_theta(spec, cx, cy)
        c_lo, c_hi = float(on_circle.min()), float(on_circle.max())

        xs = rng.uniform(-3, 3, samples)
        ys = rng.uniform(-3, 3, samples)
        pts_x = np.concatenate([cx, xs])
        pts_y = np.concatenate([cy, ys])
        t1 = eval_theta(spec, pts_x, pts_y)
        t2 = eval_theta(spec, pts_y, pts_x)
        scale = np.maximum(np.maximum(np.abs(t1), np.abs(t2)), np.finfo(float).tiny)
        sym = float(np.max(np.abs(t1 - t2) / scale))

        hom = 0.0
        for t in (0.5, 2.0, 10.0):
            lhs = eval_theta(spec, t * xs, t * ys)
            rhs = t ** spec.gamma * eval_theta(spec, xs, ys)
            ok = rhs > 0
            hom = max(hom, float(np.max(np.abs(lhs[ok] - rhs[ok]) / rhs[ok])))

        eps = 0.05
        ts = 1 + eps * np.linspace(-1, 1, 201)
        ts = ts[ts != 1]
        lip = 0.0
        for sgn in (1.0, -1.0):
            base = eval_theta(spec, sgn, sgn)
            vals = eval_theta(spec, sgn * ts, sgn)
            lip = max(lip, float(np.max(np.abs(vals - base) / np.abs(ts - 1))))
    except (ValueError, FloatingPointError) as exc:
        return ValidationReport(False, math.inf, math.inf, math.nan, math.nan,
                                math.inf, False, [f"evaluation failed: {exc}"], spec)

    tol = spec.homogeneity_tol
    passed = True
    if sym > tol:
        passed = False
        msgs.append(f"symmetry defect {sym:.3e} exceeds {tol:.0e}")
    if hom > tol:
        passed = False
        msgs.append(f"homogeneity defect {hom:.3e} exceeds {tol:.0e}")
    if not c_lo > 0:
        passed = False
        msgs.append(f"circle lower bound c = {c_lo:.3e} is not positive")
    if not math.isfinite(lip):
        passed = False
        msgs.append("Lipschitz constant near t = +-1 is not finite")
    covered = spec.gamma >= 1
    if not covered:
        msgs.append("gamma < 1: eigenvalue asymptotics are not covered by the theory")
    return ValidationReport(passed, sym, hom, c_lo, c_hi, lip, covered, msgs,
                            replace(spec, lipschitz_const=lip))
