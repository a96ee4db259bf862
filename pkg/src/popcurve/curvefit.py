"""Rule-based and least-squares classification of normalized population curves.

Constant and dying curves are caught by rules. Everything else is fitted
against four parametric families on normalized time u = t/(L-1), each with a
multi-start damped least-squares search, and the minimum-RSS family wins
unless its RSS exceeds the outlier threshold.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import product
from typing import Callable, Optional

import numpy as np
from scipy.optimize import least_squares
from scipy.special import expit

from .series import NormalizedSeries

DEFAULT_FIT_ERROR_THRESHOLD = 5.7
DEFAULT_DYING_EPSILON = 0.04


class CurveLabel(str, enum.Enum):
    CONSTANT = "Constant"
    DYING = "Dying"
    EXPONENTIAL_GROWTH = "ExponentialGrowth"
    CAPPED_GROWTH = "CappedGrowth"
    GAUSSIAN = "Gaussian"
    OSCILLATION = "Oscillation"
    OUTLIER = "Outlier"

    def __str__(self):
        return self.value


#: Canonical confusion-matrix ordering (rows/columns).
LABEL_ORDER = [
    CurveLabel.OUTLIER,
    CurveLabel.EXPONENTIAL_GROWTH,
    CurveLabel.CAPPED_GROWTH,
    CurveLabel.DYING,
    CurveLabel.OSCILLATION,
    CurveLabel.GAUSSIAN,
    CurveLabel.CONSTANT,
]


@dataclass(frozen=True)
class CurveFamily:
    """One fitted family: model on u in [0,1], bounds, and prototypical starts."""

    name: str
    label: CurveLabel
    param_names: tuple[str, ...]
    lower: np.ndarray
    upper: np.ndarray
    fun: Callable[[np.ndarray, np.ndarray], np.ndarray]
    jac: Callable[[np.ndarray, np.ndarray], np.ndarray]
    grid: tuple[tuple[float, ...], ...] | None = None
    # families with a conditionally-linear structure supply their own starts
    start_fn: Optional[Callable[[np.ndarray, np.ndarray], list[np.ndarray]]] = None
    subdivide: bool = True

    @property
    def dim(self) -> int:
        return len(self.param_names)


@dataclass(frozen=True)
class FitResult:
    label: CurveLabel
    family: Optional[str] = None
    params: Optional[np.ndarray] = None
    rss: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "label": self.label.value,
            "family": self.family,
            "params": None if self.params is None else [float(p) for p in self.params],
            "rss": None if self.rss is None else float(self.rss),
        }


# ---------------------------------------------------------------------------
# family models


def _exp_growth(p, u):
    a, b, c = p
    return c + a * np.exp(np.minimum(b * u, 50.0))


def _exp_growth_jac(p, u):
    a, b, c = p
    e = np.exp(np.minimum(b * u, 50.0))
    return np.column_stack([e, a * u * e, np.ones_like(u)])


def _capped(p, u):
    cap, k, u0 = p
    return cap * expit(k * (u - u0))


def _capped_jac(p, u):
    cap, k, u0 = p
    s = expit(k * (u - u0))
    sp = s * (1.0 - s)
    return np.column_stack([s, cap * sp * (u - u0), -cap * sp * k])


def _gaussian(p, u):
    a, mu, sigma, c = p
    return a * np.exp(-((u - mu) ** 2) / (2.0 * sigma**2)) + c


def _gaussian_jac(p, u):
    a, mu, sigma, c = p
    d = u - mu
    e = np.exp(-(d**2) / (2.0 * sigma**2))
    return np.column_stack(
        [e, a * e * d / sigma**2, a * e * d**2 / sigma**3, np.ones_like(u)]
    )


def _oscillation(p, u):
    a, omega, phi, c = p
    return c + a * np.sin(2.0 * np.pi * omega * u + phi)


def _oscillation_jac(p, u):
    a, omega, phi, c = p
    arg = 2.0 * np.pi * omega * u + phi
    cos = np.cos(arg)
    return np.column_stack(
        [np.sin(arg), a * cos * 2.0 * np.pi * u, a * cos, np.ones_like(u)]
    )


# Frequency search: amplitude, phase and offset are linear given the frequency,
# so each candidate frequency seeds an exact linear solve. The grid spacing
# keeps the phase drift per start inside the local convergence basin.
_OSC_FREQS = np.round(np.arange(0.5, 40.0 + 1e-9, 0.4), 6)
_OSC_REFINE_TOP = 12


def _oscillation_starts(y, u):
    n = u.size
    ones = np.ones(n)
    cands = []
    for omega in _OSC_FREQS:
        arg = 2.0 * np.pi * omega * u
        design = np.column_stack([np.sin(arg), np.cos(arg), ones])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        p_sin, p_cos, c = coef
        a = float(np.hypot(p_sin, p_cos))
        phi = float(np.arctan2(p_cos, p_sin))
        a = max(a, 1e-4)
        rss = float(np.sum((design @ coef - y) ** 2))
        cands.append((rss, np.array([a, omega, phi, c])))
    cands.sort(key=lambda t: t[0])
    return [x0 for _, x0 in cands[:_OSC_REFINE_TOP]]


FAMILIES: dict[str, CurveFamily] = {
    "ExponentialGrowth": CurveFamily(
        name="ExponentialGrowth",
        label=CurveLabel.EXPONENTIAL_GROWTH,
        param_names=("a", "b", "c"),
        lower=np.array([1e-4, 0.05, -0.5]),
        upper=np.array([1.5, 10.0, 0.5]),
        fun=_exp_growth,
        jac=_exp_growth_jac,
        grid=((0.01, 0.1, 0.8), (1.0, 4.0, 8.0), (-0.2, 0.0, 0.3)),
    ),
    "CappedGrowth": CurveFamily(
        name="CappedGrowth",
        label=CurveLabel.CAPPED_GROWTH,
        param_names=("cap", "k", "u0"),
        lower=np.array([0.05, 0.5, 0.0]),
        upper=np.array([1.2, 60.0, 1.0]),
        fun=_capped,
        jac=_capped_jac,
        grid=((0.4, 0.8, 1.1), (5.0, 20.0, 45.0), (0.2, 0.5, 0.8)),
    ),
    "Gaussian": CurveFamily(
        name="Gaussian",
        label=CurveLabel.GAUSSIAN,
        param_names=("a", "mu", "sigma", "c"),
        lower=np.array([0.02, 0.0, 0.005, -0.3]),
        upper=np.array([1.5, 1.0, 1.0, 0.5]),
        fun=_gaussian,
        jac=_gaussian_jac,
        grid=(
            (0.3, 0.7, 1.0),
            (0.05, 0.5, 0.9),
            (0.05, 0.15, 0.5),
            (-0.05, 0.1, 0.3),
        ),
    ),
    "Oscillation": CurveFamily(
        name="Oscillation",
        label=CurveLabel.OSCILLATION,
        param_names=("a", "omega", "phi", "c"),
        lower=np.array([1e-4, 0.5, -2.0 * np.pi, -0.5]),
        upper=np.array([0.8, 40.0, 2.0 * np.pi, 1.5]),
        fun=_oscillation,
        jac=_oscillation_jac,
        start_fn=_oscillation_starts,
        subdivide=False,
    ),
}

#: Deterministic tie-break order when two families reach the same RSS.
FAMILY_ORDER = ["ExponentialGrowth", "CappedGrowth", "Gaussian", "Oscillation"]


# ---------------------------------------------------------------------------
# rule-based labels


def detect_constant(s: NormalizedSeries) -> bool:
    """True iff every value equals the first value and that value is > 0."""
    v = s.values
    return bool(v[0] > 0 and np.all(v == v[0]))


def detect_dying(s: NormalizedSeries, epsilon: float = DEFAULT_DYING_EPSILON) -> bool:
    """True iff the series reaches <= epsilon at some point and never exceeds
    it again. All-zero series count as dying; constant series never do.
    """
    if detect_constant(s):
        return False
    v = s.values
    above = np.nonzero(v > epsilon)[0]
    if above.size == 0:
        return True
    # need at least one point at/below epsilon after the last excursion
    return bool(above[-1] < v.size - 1)


# ---------------------------------------------------------------------------
# least-squares fitting


def _time_grid(n: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, n)


def _cell_starts(family: CurveFamily) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Grid starting points, each bounded to the parameter-space half-cell
    that contains it (each parameter range split in two).
    """
    lo, hi = family.lower, family.upper
    mid = 0.5 * (lo + hi)
    out = []
    for combo in product(*family.grid):
        x0 = np.array(combo, dtype=float)
        in_lower = x0 <= mid
        cell_lo = np.where(in_lower, lo, mid)
        cell_hi = np.where(in_lower, mid, hi)
        eps = 1e-9 * (hi - lo)
        out.append((np.clip(x0, cell_lo + eps, cell_hi - eps), cell_lo, cell_hi))
    return out


def _refine(y, u, family, x0, lo, hi):
    res = least_squares(
        lambda p: family.fun(p, u) - y,
        x0,
        jac=lambda p: family.jac(p, u),
        bounds=(lo, hi),
        method="trf",
        max_nfev=200,
    )
    if not np.all(np.isfinite(res.x)):
        return None, np.inf
    rss = float(np.sum((family.fun(res.x, u) - y) ** 2))
    if not np.isfinite(rss):
        return None, np.inf
    return res.x, rss


def fit_family(s: NormalizedSeries, family: CurveFamily) -> FitResult:
    """Best-RSS fit of one family over all its starting points."""
    y = s.values
    u = _time_grid(y.size)
    if family.start_fn is not None:
        starts = [
            (np.clip(x0, family.lower + 1e-12, family.upper - 1e-12),
             family.lower, family.upper)
            for x0 in family.start_fn(y, u)
        ]
    else:
        starts = _cell_starts(family)
    best_params, best_rss = None, np.inf
    for x0, lo, hi in starts:
        params, rss = _refine(y, u, family, x0, lo, hi)
        if rss < best_rss:
            best_params, best_rss = params, rss
    if best_params is not None and family.start_fn is None:
        # the winning start was confined to its half-cell; polish it over
        # the full box in case the optimum straddles a cell boundary
        x0 = np.clip(best_params, family.lower + 1e-12, family.upper - 1e-12)
        params, rss = _refine(y, u, family, x0, family.lower, family.upper)
        if rss < best_rss:
            best_params, best_rss = params, rss
    if best_params is None:
        return FitResult(label=CurveLabel.OUTLIER, family=family.name, rss=np.inf)
    return FitResult(
        label=family.label, family=family.name, params=best_params, rss=best_rss
    )


def classify_by_fit(
    s: NormalizedSeries,
    fit_error_threshold: float = DEFAULT_FIT_ERROR_THRESHOLD,
    dying_epsilon: float = DEFAULT_DYING_EPSILON,
) -> FitResult:
    """Full top-down classification: rules first, then the minimum-RSS family,
    demoted to Outlier when the best RSS exceeds the threshold.
    """
    if detect_constant(s):
        return FitResult(label=CurveLabel.CONSTANT)
    if detect_dying(s, dying_epsilon):
        return FitResult(label=CurveLabel.DYING)
    best = None
    for name in FAMILY_ORDER:
        fit = fit_family(s, FAMILIES[name])
        if best is None or fit.rss < best.rss:
            best = fit
    if not np.isfinite(best.rss) or best.rss > fit_error_threshold:
        return FitResult(
            label=CurveLabel.OUTLIER,
            family=best.family if np.isfinite(best.rss) else None,
            params=best.params,
            rss=best.rss,
        )
    return best
