"""Closed-form and exact moment formulas for colouring counts.

Conventions shared by every function here:

* the density entering a formula is always the effective k*m/n (exact
  rational, converted to float at the last moment), never the requested one;
* log-scale floats are the canonical return type, since n * rate overflows
  the exponential scale already at a few hundred vertices;
* binomials go through lgamma on the floating path and through big integers
  on the exact path, with the exact path populated up to n = EXACT_CUTOVER.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

from .core import ModelParams
from .counting import DensityGrid
from .errors import DivergenceError, DomainError, ParameterError

#: Largest n for which the exact rational value of a moment is also returned.
EXACT_CUTOVER = 30


def _entropy2(p: float) -> float:
    """Two-point entropy -p ln p - (1-p) ln(1-p) with 0 ln 0 = 0."""
    if p < 0.0 or p > 1.0:
        raise DomainError(f"probability {p} outside [0, 1]")
    out = 0.0
    if p > 0.0:
        out -= p * math.log(p)
    if p < 1.0:
        out -= (1.0 - p) * math.log1p(-p)
    return out


def _entropy(ps: Sequence[float]) -> float:
    out = 0.0
    for p in ps:
        if p < 0.0:
            raise DomainError(f"negative probability entry {p}")
        if p > 0.0:
            out -= p * math.log(p)
    return out


def _log_binom(n: int, r: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(r + 1) - math.lgamma(n - r + 1)


# ---------------------------------------------------------------------------
# Cycle laws
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CycleLaw:
    """Limit law of the count of cycles with a given length.

    ``poisson_mean`` is the expected count under the uniform model;
    ``planted_bias`` the relative tilt of that mean after conditioning on a
    balanced colouring (alternating in sign with the length); and
    ``planted_mean = poisson_mean * (1 + planted_bias)`` the conditioned mean.
    """

    length: int
    poisson_mean: float
    planted_bias: float
    planted_mean: float


def cycle_law(params: ModelParams, length: int) -> CycleLaw:
    """Evaluate the cycle-count law constants for one length (>= 2)."""
    if length < 2:
        raise ParameterError(f"cycle length must be >= 2, got {length}")
    k = params.k
    x = float(params.d) * (k - 1)
    mean = x**length / (2 * length)
    base = 2 ** (k - 1) - 1
    sign = -1.0 if length % 2 else 1.0
    denom = base**length
    if denom <= 2**53:
        bias = sign / denom
    else:
        bias = sign * math.exp(-length * math.log(base))
    return CycleLaw(
        length=length,
        poisson_mean=mean,
        planted_bias=bias,
        planted_mean=mean * (1.0 + bias),
    )


def cycle_laws(params: ModelParams, max_len: int) -> Tuple[CycleLaw, ...]:
    """Laws for every length 2..max_len."""
    return tuple(cycle_law(params, l) for l in range(2, max_len + 1))


# ---------------------------------------------------------------------------
# Growth rates
# ---------------------------------------------------------------------------


def first_moment_rate(rho: float, params: ModelParams) -> float:
    """Per-vertex exponential growth rate of the expected count at density rho.

    Entropy of the colour split plus the log-probability rate that a uniform
    edge is bichromatic.  Symmetric about 1/2; -inf at the endpoints for
    positive density.
    """
    if rho < 0.0 or rho > 1.0:
        raise DomainError(f"colour density {rho} outside [0, 1]")
    ent = _entropy2(rho)
    d = float(params.d)
    if d == 0.0:
        return ent
    arg = 1.0 - rho**params.k - (1.0 - rho) ** params.k
    if arg <= 0.0:
        return -math.inf
    return ent + d / params.k * math.log(arg)


def pair_moment_rate(rho: Sequence, params: ModelParams) -> float:
    """Growth rate of the expected number of colouring pairs at a given overlap.

    ``rho`` is the overlap distribution (rho00, rho01, rho10, rho11); the rate
    is its 4-point entropy plus the log-rate that an edge is bichromatic under
    both colourings.  Raises :class:`DomainError` when that probability
    vanishes (e.g. a degenerate overlap concentrated on one cell).
    """
    vals = [float(x) for x in rho]
    if len(vals) != 4:
        raise DomainError("overlap must have exactly 4 entries")
    if any(v < -1e-12 for v in vals):
        raise DomainError(f"overlap entries must be nonnegative, got {vals}")
    vals = [max(v, 0.0) for v in vals]
    if abs(sum(vals) - 1.0) > 1e-9:
        raise DomainError(f"overlap entries must sum to 1, got {sum(vals)}")
    k = params.k
    r00, r01, r10, r11 = vals
    rows = (r00 + r01, r10 + r11)
    cols = (r00 + r10, r01 + r11)
    ent = _entropy(vals)
    d = float(params.d)
    if d == 0.0:
        return ent
    arg = (
        1.0
        - sum(r**k for r in rows)
        - sum(c**k for c in cols)
        + sum(v**k for v in vals)
    )
    if arg <= 0.0:
        raise DomainError(f"bichromatic probability vanished for overlap {vals}")
    return ent + d / k * math.log(arg)


def balanced_pair_moment_rate(rho00: float, params: ModelParams) -> float:
    """Pair growth rate along the balanced-marginal slice, as a map of rho00.

    Equals ln 2 + H(2 rho00) + (d/k) ln(1 - 2^{2-k} + 2 rho00^k + 2 (1/2-rho00)^k)
    and agrees with :func:`pair_moment_rate` at the flat overlap rho00 = 1/4.
    """
    if rho00 < 0.0 or rho00 > 0.5:
        raise DomainError(f"rho00 {rho00} outside [0, 1/2]")
    k = params.k
    ent = _entropy2(2.0 * rho00)
    d = float(params.d)
    out = math.log(2.0) + ent
    if d == 0.0:
        return out
    arg = 1.0 - 2.0 ** (2 - k) + 2.0 * rho00**k + 2.0 * (0.5 - rho00) ** k
    return out + d / k * math.log(arg)


# ---------------------------------------------------------------------------
# Exact moments (uniform-with-replacement model)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentValue:
    """A moment in log scale, with the exact rational attached at small n."""

    log: float
    exact: Optional[Fraction] = None


def expected_count_at_density(params: ModelParams, zeros: int) -> MomentValue:
    """Expected number of colourings with a given zero-count, exact in m.

    For the with-replacement model the edges are independent, so the expected
    count is C(n, zeros) * (1 - F/N)^m with F the number of k-sets
    monochromatic under such a colouring and N = C(n, k).  The formula is an
    identity at every n, not an asymptotic.
    """
    n, k, m = params.n, params.k, params.m
    if not 0 <= zeros <= n:
        raise ParameterError(f"zeros must lie in [0, {n}], got {zeros}")
    forb = math.comb(zeros, k) + math.comb(n - zeros, k)
    total = math.comb(n, k)
    exact = None
    if n <= EXACT_CUTOVER:
        exact = Fraction(math.comb(n, zeros)) * Fraction(total - forb, total) ** m
    if forb == total:
        return MomentValue(log=-math.inf, exact=exact)
    log = _log_binom(n, zeros) + m * math.log1p(-float(Fraction(forb, total)))
    return MomentValue(log=log, exact=exact)


def log_sum_expected_counts(params: ModelParams, zero_counts: Iterable[int]) -> float:
    """log of the sum of expected per-density counts over the given zero-counts."""
    logs = [expected_count_at_density(params, z).log for z in zero_counts]
    logs = [x for x in logs if x != -math.inf]
    if not logs:
        return -math.inf
    top = max(logs)
    return top + math.log(sum(math.exp(x - top) for x in logs))


def expected_count_total(params: ModelParams, mode: str = "exact_sum") -> float:
    """log of the expected total colouring count.

    ``exact_sum`` sums the per-density identities (exact at every n);
    ``asymptotic`` evaluates the closed-form large-n approximation
    exp[d(k-1)/(2^k-2) + n f1(1/2)] * (1 + d(k-1)/(2^{k-1}-1))^{-1/2}.
    """
    if mode == "exact_sum":
        return log_sum_expected_counts(params, range(params.n + 1))
    if mode == "asymptotic":
        k = params.k
        d = float(params.d)
        x = d * (k - 1)
        return (
            x / (2**k - 2)
            + params.n * first_moment_rate(0.5, params)
            - 0.5 * math.log1p(x / (2 ** (k - 1) - 1))
        )
    raise ParameterError(f"mode must be 'exact_sum' or 'asymptotic', got {mode!r}")


def expected_count_in_stratum(params: ModelParams, grid: DensityGrid, s: int) -> float:
    """log of the large-n approximation to the expected stratum count.

    |A^s| * sqrt(2/(pi n)) * exp[d(k-1)/(2^k-2)] * exp[n f1(centre_s)], with
    |A^s| the exact number of admissible zero-counts in the stratum; -inf when
    the stratum holds no admissible density.
    """
    if grid.n != params.n:
        raise ParameterError(f"grid built for n={grid.n}, params have n={params.n}")
    size = grid.stratum_size(s)
    if size == 0:
        return -math.inf
    k = params.k
    d = float(params.d)
    n = params.n
    return (
        math.log(size)
        + 0.5 * math.log(2.0 / (math.pi * n))
        + d * (k - 1) / (2**k - 2)
        + n * first_moment_rate(grid.stratum_centre(s), params)
    )


def expected_pair_count(params: ModelParams, counts: Sequence[int]) -> MomentValue:
    """Expected number of colouring pairs with given overlap counts, exact in m.

    multinomial(n; n00, n01, n10, n11) * (1 - F/N)^m, where F counts the
    k-sets monochromatic under at least one of the two colourings:
    F = sum_i C(row_i, k) + sum_j C(col_j, k) - sum_ij C(n_ij, k).
    An identity for the with-replacement model at every n.
    """
    n, k, m = params.n, params.k, params.m
    c = [int(x) for x in counts]
    if len(c) != 4 or any(x < 0 for x in c):
        raise ParameterError(f"counts must be 4 nonnegative integers, got {counts}")
    if sum(c) != n:
        raise ParameterError(f"counts {c} do not sum to n={n}")
    n00, n01, n10, n11 = c
    rows = (n00 + n01, n10 + n11)
    cols = (n00 + n10, n01 + n11)
    forb = (
        sum(math.comb(r, k) for r in rows)
        + sum(math.comb(x, k) for x in cols)
        - sum(math.comb(x, k) for x in c)
    )
    total = math.comb(n, k)
    multinom = (
        math.comb(n, n00)
        * math.comb(n - n00, n01)
        * math.comb(n - n00 - n01, n10)
    )
    exact = None
    if n <= EXACT_CUTOVER:
        exact = Fraction(multinom) * Fraction(total - forb, total) ** m
    if forb == total:
        return MomentValue(log=-math.inf, exact=exact)
    log = math.log(multinom) + m * math.log1p(-float(Fraction(forb, total)))
    return MomentValue(log=log, exact=exact)


# ---------------------------------------------------------------------------
# Cycle conditioning and the second-moment series
# ---------------------------------------------------------------------------


def cycle_conditioned_ratio(params: ModelParams, cycle_counts: Sequence[int]) -> float:
    """Ratio of the conditioned to unconditioned expected balanced-stratum count.

    ``cycle_counts[i]`` is the observed number of cycles of length i + 2.  The
    ratio is prod_l (1 + bias_l)^{c_l} * exp(-bias_l * mean_l).
    """
    out = 0.0
    for i, c in enumerate(cycle_counts):
        if c < 0:
            raise ParameterError(f"cycle counts must be nonnegative, got {cycle_counts}")
        law = cycle_law(params, i + 2)
        out += c * math.log1p(law.planted_bias) - law.planted_bias * law.poisson_mean
    return math.exp(out)


@dataclass(frozen=True)
class SecondMomentRatio:
    """Limit of E[count^2] / E[count]^2 for balanced strata, with its series.

    ``x`` is the series ratio d(k-1)/(2^{k-1}-1)^2; the log of the limit
    equals sum_{l>=2} x^l / (2l) = -x/2 - ln(1-x)/2.
    """

    value: float
    log_value: float
    x: float

    def partial_log(self, max_len: int) -> float:
        """sum_{l=2}^{max_len} of poisson_mean_l * bias_l^2."""
        if max_len < 2:
            raise ParameterError(f"max_len must be >= 2, got {max_len}")
        return sum(self.x**l / (2 * l) for l in range(2, max_len + 1))

    def tail_bound(self, max_len: int) -> float:
        """Upper bound on the series tail beyond max_len."""
        if max_len < 2:
            raise ParameterError(f"max_len must be >= 2, got {max_len}")
        return self.x ** (max_len + 1) / ((2 * max_len + 2) * (1.0 - self.x))


def second_moment_ratio(params: ModelParams) -> SecondMomentRatio:
    """Closed form of the second-moment ratio; diverges when x >= 1."""
    k = params.k
    x = float(params.d) * (k - 1) / (2 ** (k - 1) - 1) ** 2
    if x >= 1.0:
        raise DivergenceError(
            f"second-moment series diverges: d(k-1) = {float(params.d) * (k - 1)} "
            f">= (2^(k-1)-1)^2 = {(2 ** (k - 1) - 1) ** 2}"
        )
    log_value = -0.5 * x - 0.5 * math.log1p(-x)
    return SecondMomentRatio(value=math.exp(log_value), log_value=log_value, x=x)


# ---------------------------------------------------------------------------
# Regime flags and quadratic constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegimeFlags:
    """Which density regimes the parameters satisfy.

    ``first_moment_ok``: requested density finite (always at finite m);
    ``main_theorem_ok``: d'/k below the limit-law threshold 2^{k-1} ln 2 - 2;
    ``series_ok``: the second-moment series converges, d(k-1) < (2^{k-1}-1)^2.
    """

    first_moment_ok: bool
    main_theorem_ok: bool
    series_ok: bool


def regime_check(params: ModelParams) -> RegimeFlags:
    k = params.k
    d_req = params.d_prime if params.d_prime is not None else float(params.d)
    first_ok = math.isfinite(d_req)
    main_ok = first_ok and (d_req / k <= 2 ** (k - 1) * math.log(2.0) - 2.0)
    series_ok = float(params.d) * (k - 1) < (2 ** (k - 1) - 1) ** 2
    return RegimeFlags(
        first_moment_ok=first_ok,
        main_theorem_ok=main_ok,
        series_ok=series_ok,
    )


@dataclass(frozen=True)
class QuadraticConstants:
    """Gaussian-width constants of the density and overlap expansions.

    Two variants of the single-colouring constant circulate, differing in the
    sign of the density correction; both are reported verbatim.  Only
    ``b_plus`` (the variant used by the total-count closed form) and
    ``d_pair`` are exercised by the consistency checks; ``b_minus`` can be
    negative in much of the valid regime.
    """

    b_minus: float  # 4 (1 - d(k-1)/(2^{k-1}-1))
    b_plus: float   # 4 (1 + d(k-1)/(2^{k-1}-1))
    d_pair: float   # 4 (1 - d(k-1)/(2^{k-1}-1)^2)


def quadratic_constants(params: ModelParams) -> QuadraticConstants:
    k = params.k
    x = float(params.d) * (k - 1) / (2 ** (k - 1) - 1)
    y = float(params.d) * (k - 1) / (2 ** (k - 1) - 1) ** 2
    return QuadraticConstants(
        b_minus=4.0 * (1.0 - x),
        b_plus=4.0 * (1.0 + x),
        d_pair=4.0 * (1.0 - y),
    )
