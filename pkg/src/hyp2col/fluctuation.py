"""The limiting law of the log colouring-count fluctuation.

In the convergent regime, ln(count) - ln E[count] tends in distribution to an
infinite weighted sum of centred Poisson cycle counts,

    sum_l  X_l * ln(1 + bias_l) - mean_l * bias_l,      X_l ~ Poisson(mean_l),

truncated here at a configurable level.  The truncation tail (measured by the
second-moment series) is held below a threshold or flagged.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .core import ModelParams, derive_rng
from .errors import DivergenceError, ParameterError, ResourceLimitError
from .formulas import (
    CycleLaw,
    cycle_laws,
    regime_check,
    second_moment_ratio,
)

#: Truncation tails below this bound are considered negligible by default.
DEFAULT_TAIL_THRESHOLD = 1e-12

#: Poisson means beyond this raise instead of sampling (sampler overflow).
POISSON_MEAN_LIMIT = 1e18

_MAX_AUTO_LEVEL = 10_000


@dataclass(frozen=True)
class FluctuationLaw:
    """Truncated limit law: cycle laws for lengths 2..level plus tail info."""

    params: ModelParams
    level: int
    laws: Tuple[CycleLaw, ...]
    tail: float
    tail_ok: bool

    def _arrays(self):
        lam = np.array([law.poisson_mean for law in self.laws])
        log1p_bias = np.array([math.log1p(law.planted_bias) for law in self.laws])
        centre = float(np.dot(lam, log1p_bias - np.array([law.planted_bias for law in self.laws])))
        return lam, log1p_bias, centre


def make_fluctuation_law(
    params: ModelParams,
    level: Optional[int] = None,
    tail_threshold: float = DEFAULT_TAIL_THRESHOLD,
) -> FluctuationLaw:
    """Build a truncated law; level defaults to the smallest with small tail.

    Outside the limit-theorem density regime a warning is emitted (sampling
    stays defined whenever the series converges).  When no level keeps the
    tail below the threshold, the returned law carries ``tail_ok = False``.
    """
    flags = regime_check(params)
    if not flags.main_theorem_ok:
        warnings.warn(
            "parameters outside the limit-theorem regime; the sampled law is "
            "still defined but no convergence statement backs it",
            stacklevel=2,
        )
    tail = math.inf
    if flags.series_ok:
        series = second_moment_ratio(params)
        if level is None:
            level = 2
            while series.tail_bound(level) >= tail_threshold and level < _MAX_AUTO_LEVEL:
                level += 1
        tail = series.tail_bound(level)
    elif level is None:
        raise DivergenceError(
            "second-moment series diverges; an explicit truncation level is required"
        )
    if level < 2:
        raise ParameterError(f"truncation level must be >= 2, got {level}")
    law = FluctuationLaw(
        params=params,
        level=level,
        laws=cycle_laws(params, level),
        tail=tail,
        tail_ok=tail < tail_threshold,
    )
    if not law.tail_ok:
        warnings.warn(
            f"truncation tail bound {tail:g} not below {tail_threshold:g}",
            stacklevel=2,
        )
    return law


def _check_means(lam: np.ndarray) -> None:
    top = float(lam.max()) if lam.size else 0.0
    if not math.isfinite(top) or top > POISSON_MEAN_LIMIT:
        raise ResourceLimitError(
            f"Poisson mean {top:g} exceeds the sampler limit {POISSON_MEAN_LIMIT:g}"
        )


def sample_fluctuation(law: FluctuationLaw, seed: int) -> float:
    """One draw of the truncated limit variable from its own derived stream."""
    lam, log1p_bias, centre = law._arrays()
    _check_means(lam)
    rng = derive_rng(seed)
    x = rng.poisson(lam)
    return float((x - lam) @ log1p_bias + centre)


def fluctuation_samples(law: FluctuationLaw, n_samples: int, seed: int) -> np.ndarray:
    """Sorted vector of independent draws, one derived stream per sample.

    Sample i uses the stream derived from (seed, i), so partial runs and
    parallel workers reproduce the same values; results are merged by sorting.
    """
    if n_samples < 1:
        raise ParameterError(f"n_samples must be >= 1, got {n_samples}")
    lam, log1p_bias, centre = law._arrays()
    _check_means(lam)
    out = np.empty(n_samples)
    for i in range(n_samples):
        rng = derive_rng(seed, i)
        x = rng.poisson(lam)
        out[i] = (x - lam) @ log1p_bias + centre
    out.sort()
    return out


@dataclass(frozen=True)
class FluctuationMoments:
    """Analytic moments of the truncated law.

    ``mean_exp`` is exactly 1 (each Poisson term has unit exponential
    moment); ``mean_exp_sq`` equals exp of the truncated second-moment
    series; ``mean_upper`` is the exact mean of the truncated sum, which
    upper-bounds the mean of the full law and is never positive.
    """

    mean_exp: float
    mean_exp_sq: float
    mean_upper: float


def fluctuation_moments(law: FluctuationLaw) -> FluctuationMoments:
    series_partial = 0.0
    mean_upper = 0.0
    for cl in law.laws:
        series_partial += cl.poisson_mean * cl.planted_bias**2
        mean_upper += cl.poisson_mean * (math.log1p(cl.planted_bias) - cl.planted_bias)
    return FluctuationMoments(
        mean_exp=1.0,
        mean_exp_sq=math.exp(series_partial),
        mean_upper=mean_upper,
    )


def ecdf(samples: np.ndarray, x: float) -> float:
    """Empirical distribution function of a sorted sample vector."""
    return float(np.searchsorted(samples, x, side="right")) / len(samples)
