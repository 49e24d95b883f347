"""Exact 2-colouring counts, density strata, pair counts by overlap, Gibbs sampling.

All counts are exact big integers.  The counting core enumerates assignments
per connected component (bit-parallel over blocks of 64 assignments) and
convolves the per-component density polynomials; no floating point enters this
module.

Density strata are decided on integer zero-counts.  A zero-count z lies in
stratum s of an (omega, nu) grid iff

    z/n  in  [ 1/2 - w/sqrt(n) + (2s-2)/(nu sqrt(n)),
               1/2 - w/sqrt(n) + 2s/(nu sqrt(n)) )

which after scaling by 2*n*nu is an exact comparison of the integer
nu*(2z - n) against 2*b*sqrt(n) for integer b; the comparison is resolved by
squaring, never by floating point, so boundary ties are classified exactly
(left-closed, right-open).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from numba import njit

from .core import (
    Colouring,
    Flavour,
    Hypergraph,
    ModelParams,
    OverlapMatrix,
    connected_components,
    derive_rng,
    derive_seed,
    sample_simple_hypergraph,
)
from .errors import ParameterError, RejectionLimitError, ResourceLimitError

#: Largest connected component enumerated by the dense path.
DENSE_COMPONENT_BOUND = 32

#: Largest n accepted by the 4^n pair-overlap enumeration.
PAIR_ENUMERATION_BOUND = 16

#: Retry cap for the colourability rejection step of the Gibbs sampler.
GIBBS_REJECTION_CAP = 10**6

_U64 = np.uint64
_FULL = _U64(0xFFFFFFFFFFFFFFFF)


# ---------------------------------------------------------------------------
# Enumeration kernels
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _popcount64(x):
    x = x - ((x >> _U64(1)) & _U64(0x5555555555555555))
    x = (x & _U64(0x3333333333333333)) + ((x >> _U64(2)) & _U64(0x3333333333333333))
    x = (x + (x >> _U64(4))) & _U64(0x0F0F0F0F0F0F0F0F)
    return (x * _U64(0x0101010101010101)) >> _U64(56)


@njit(cache=True)
def _hist_small(masks, nbits):
    """Ones-count histogram of proper assignments, one assignment at a time."""
    hist = np.zeros(nbits + 1, dtype=np.int64)
    nedges = masks.shape[0]
    for a in range(1 << nbits):
        au = _U64(a)
        ok = True
        for e in range(nedges):
            am = au & masks[e]
            if am == _U64(0) or am == masks[e]:
                ok = False
                break
        if ok:
            hist[int(_popcount64(au))] += 1
    return hist


@njit(cache=True)
def _hist_words(hi_masks, low0, low1, nbits):
    """Ones-count histogram, 64 assignments per word.

    Assignment a = (w << 6) | b.  For edge e, low0[e]/low1[e] mark the b
    values whose low bits are all-0 / all-1 on the edge; the edge is
    monochromatic iff its high bits agree and the b pattern matches.
    """
    nwords = 1 << (nbits - 6)
    hist = np.zeros(nbits + 1, dtype=np.int64)
    nedges = hi_masks.shape[0]
    pc6 = np.zeros(64, dtype=np.int64)
    for b in range(64):
        v = b
        c = 0
        while v:
            v &= v - 1
            c += 1
        pc6[b] = c
    for w in range(nwords):
        wu = _U64(w)
        ok = _FULL
        for e in range(nedges):
            h = wu & hi_masks[e]
            if h == _U64(0):
                ok &= ~low0[e]
            if h == hi_masks[e]:
                ok &= ~low1[e]
            if ok == _U64(0):
                break
        if ok != _U64(0):
            base = int(_popcount64(wu))
            x = ok
            while x != _U64(0):
                lsb = x & (~x + _U64(1))
                b = int(_popcount64(lsb - _U64(1)))
                hist[base + pc6[b]] += 1
                x &= x - _U64(1)
    return hist


@njit(cache=True)
def _rth_small(masks, nbits, r):
    """Return the r-th (0-based) proper assignment in increasing order, or -1."""
    nedges = masks.shape[0]
    seen = 0
    for a in range(1 << nbits):
        au = _U64(a)
        ok = True
        for e in range(nedges):
            am = au & masks[e]
            if am == _U64(0) or am == masks[e]:
                ok = False
                break
        if ok:
            if seen == r:
                return a
            seen += 1
    return -1


@njit(cache=True)
def _rth_words(hi_masks, low0, low1, nbits, r):
    nwords = 1 << (nbits - 6)
    nedges = hi_masks.shape[0]
    seen = 0
    for w in range(nwords):
        wu = _U64(w)
        ok = _FULL
        for e in range(nedges):
            h = wu & hi_masks[e]
            if h == _U64(0):
                ok &= ~low0[e]
            if h == hi_masks[e]:
                ok &= ~low1[e]
            if ok == _U64(0):
                break
        if ok == _U64(0):
            continue
        cnt = int(_popcount64(ok))
        if seen + cnt <= r:
            seen += cnt
            continue
        x = ok
        while x != _U64(0):
            lsb = x & (~x + _U64(1))
            b = int(_popcount64(lsb - _U64(1)))
            if seen == r:
                return (w << 6) | b
            seen += 1
            x &= x - _U64(1)
    return -1


def _component_masks(h: Hypergraph, verts: Sequence[int], edge_idx: Sequence[int]):
    """Local bitmask arrays for one component (vertex -> position in verts)."""
    pos = {v: i for i, v in enumerate(verts)}
    nbits = len(verts)
    masks = np.zeros(len(edge_idx), dtype=np.uint64)
    for j, ei in enumerate(edge_idx):
        mask = 0
        for v in h.edges[ei]:
            mask |= 1 << pos[v]
        masks[j] = mask
    return masks, nbits


def _split_masks(masks: np.ndarray):
    """Split full masks into word-index masks plus 64-bit block patterns."""
    nedges = len(masks)
    hi = np.zeros(nedges, dtype=np.uint64)
    low0 = np.zeros(nedges, dtype=np.uint64)
    low1 = np.zeros(nedges, dtype=np.uint64)
    for i in range(nedges):
        mask = int(masks[i])
        mlo = mask & 63
        hi[i] = mask >> 6
        m0 = 0
        m1 = 0
        for b in range(64):
            if (b & mlo) == 0:
                m0 |= 1 << b
            if (b & mlo) == mlo:
                m1 |= 1 << b
        low0[i] = m0
        low1[i] = m1
    return hi, low0, low1


def _component_hist(h: Hypergraph, verts, edge_idx, dense_bound: int) -> list[int]:
    nbits = len(verts)
    if nbits > dense_bound:
        raise ResourceLimitError(
            f"component with {nbits} vertices exceeds the dense enumeration bound {dense_bound}"
        )
    masks, nbits = _component_masks(h, verts, edge_idx)
    if nbits <= 12:
        hist = _hist_small(masks, nbits)
    else:
        hi, low0, low1 = _split_masks(masks)
        hist = _hist_words(hi, low0, low1, nbits)
    return [int(x) for x in hist]


def _convolve(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] += x * y
    return out


# ---------------------------------------------------------------------------
# Density grid
# ---------------------------------------------------------------------------


def _cmp_scaled_sqrt(a: int, b: int, n: int) -> int:
    """Sign of a - 2*b*sqrt(n) using integer arithmetic only."""
    if b == 0:
        return (a > 0) - (a < 0)
    if b > 0:
        if a <= 0:
            return -1
        diff = a * a - 4 * b * b * n
    else:
        if a >= 0:
            return 1
        diff = 4 * b * b * n - a * a
    return (diff > 0) - (diff < 0)


@dataclass(frozen=True)
class DensityGrid:
    """Half-open density strata refining the balanced window of width 2w/sqrt(n).

    Stratum s (1-based, s = 1..omega*nu) covers densities in
    [centre - 1/(nu sqrt n), centre + 1/(nu sqrt n)) around
    centre = 1/2 - omega/sqrt(n) + (2s-1)/(nu sqrt(n)).  Strata are disjoint,
    consecutive, and their union is the balanced window.
    """

    omega: int
    nu: int
    n: int

    def __post_init__(self):
        if self.omega < 1 or self.nu < 1:
            raise ParameterError("omega and nu must be positive integers")
        if self.n < 1:
            raise ParameterError("n must be positive")

    @property
    def num_strata(self) -> int:
        return self.omega * self.nu

    def stratum_centre(self, s: int) -> float:
        self._check_s(s)
        rn = math.sqrt(self.n)
        return 0.5 - self.omega / rn + (2 * s - 1) / (self.nu * rn)

    def _check_s(self, s: int) -> None:
        if not 1 <= s <= self.num_strata:
            raise ParameterError(f"stratum index {s} outside [1, {self.num_strata}]")

    def _cmp_bound(self, zeros: int, b: int) -> int:
        # sign of (zeros/n - 1/2) - b/(nu*sqrt(n)), scaled by 2*n*nu
        return _cmp_scaled_sqrt(self.nu * (2 * zeros - self.n), b, self.n)

    def in_balanced_window(self, zeros: int) -> bool:
        wn = self.omega * self.nu
        return self._cmp_bound(zeros, -wn) >= 0 and self._cmp_bound(zeros, wn) < 0

    def stratum_of(self, zeros: int) -> Optional[int]:
        """1-based stratum containing zeros/n, or None outside the window."""
        if not 0 <= zeros <= self.n:
            raise ParameterError(f"zeros must lie in [0, {self.n}]")
        if not self.in_balanced_window(zeros):
            return None
        wn = self.omega * self.nu
        # first s whose right bound exceeds the point
        for s in range(1, self.num_strata + 1):
            if self._cmp_bound(zeros, 2 * s - wn) < 0:
                return s
        return None  # unreachable: right edge of window is exclusive

    def stratum_zero_counts(self, s: int) -> list[int]:
        """Admissible integer zero-counts whose density falls in stratum s."""
        self._check_s(s)
        wn = self.omega * self.nu
        lo, hi = 2 * s - 2 - wn, 2 * s - wn
        out = []
        for z in range(self.n + 1):
            if self._cmp_bound(z, lo) >= 0 and self._cmp_bound(z, hi) < 0:
                out.append(z)
        return out

    def stratum_size(self, s: int) -> int:
        return len(self.stratum_zero_counts(s))


# ---------------------------------------------------------------------------
# Counting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CountReport:
    """Exact colouring counts, stratified by colour density.

    ``by_density[z]`` is the number of proper colourings with exactly z
    vertices coloured 0; ``total`` is their sum.  When a grid is attached,
    ``balanced_total`` counts colourings in the balanced window and
    ``by_stratum[s-1]`` those in stratum s.
    """

    n: int
    total: int
    by_density: Tuple[int, ...]
    grid: Optional[DensityGrid] = None
    balanced_total: Optional[int] = None
    by_stratum: Optional[Tuple[int, ...]] = None

    def to_json_dict(self) -> dict:
        return {
            "Z": str(self.total),
            "by_density": [str(c) for c in self.by_density],
            "Z_omega": None if self.balanced_total is None else str(self.balanced_total),
            "by_stratum": None
            if self.by_stratum is None
            else [str(c) for c in self.by_stratum],
        }


def count_colourings(
    h: Hypergraph,
    grid: Optional[DensityGrid] = None,
    dense_bound: int = DENSE_COMPONENT_BOUND,
) -> CountReport:
    """Exact number of proper 2-colourings, stratified by zero-count.

    The hypergraph is split into connected components; each component's
    assignments are enumerated with per-edge monochromaticity tests and the
    per-component ones-count polynomials are convolved.  Isolated vertices
    contribute a factor (1 + x) each.  Components larger than ``dense_bound``
    vertices raise :class:`ResourceLimitError`.
    """
    if grid is not None and grid.n != h.n:
        raise ParameterError(f"grid built for n={grid.n}, hypergraph has n={h.n}")
    isolated = 0
    poly = [1]
    for verts, edge_idx in connected_components(h):
        if not edge_idx:
            isolated += 1
            continue
        poly = _convolve(poly, _component_hist(h, verts, edge_idx, dense_bound))
    if isolated:
        poly = _convolve(poly, [math.comb(isolated, j) for j in range(isolated + 1)])
    # poly indexes the number of ones; reindex by zeros
    by_ones = poly + [0] * (h.n + 1 - len(poly))
    by_density = tuple(by_ones[h.n - z] for z in range(h.n + 1))
    total = sum(by_density)
    balanced_total = None
    by_stratum = None
    if grid is not None:
        strata = [0] * grid.num_strata
        for z, cnt in enumerate(by_density):
            if cnt == 0:
                continue
            s = grid.stratum_of(z)
            if s is not None:
                strata[s - 1] += cnt
        by_stratum = tuple(strata)
        balanced_total = sum(strata)
    return CountReport(
        n=h.n,
        total=total,
        by_density=by_density,
        grid=grid,
        balanced_total=balanced_total,
        by_stratum=by_stratum,
    )


def _proper_assignments(h: Hypergraph) -> np.ndarray:
    """All proper assignments of h as uint32 bit vectors (single pass, n <= 16)."""
    a = np.arange(1 << h.n, dtype=np.uint32)
    ok = np.ones(a.shape, dtype=bool)
    for mask in h.edge_masks:
        am = a & np.uint32(mask)
        ok &= (am != 0) & (am != mask)
    return a[ok]


def count_pairs_by_overlap(h: Hypergraph) -> Dict[OverlapMatrix, int]:
    """Exact number of proper colouring pairs per overlap matrix.

    Enumerates all pairs of proper colourings (test-scale only: n <= 16).
    The counts over all realised overlaps sum to the squared colouring count.
    """
    if h.n > PAIR_ENUMERATION_BOUND:
        raise ResourceLimitError(
            f"pair enumeration requires n <= {PAIR_ENUMERATION_BOUND}, got n={h.n}"
        )
    props = _proper_assignments(h)
    pcs = np.bitwise_count(props).astype(np.int64)
    out: Dict[Tuple[int, int, int, int], int] = {}
    n = h.n
    base = n + 1
    for sigma, psig in zip(props, pcs):
        n11 = np.bitwise_count(props & sigma).astype(np.int64)
        n10 = int(psig) - n11
        n01 = pcs - n11
        n00 = n - n11 - n10 - n01
        keys = ((n00 * base + n01) * base + n10) * base + n11
        uniq, cnts = np.unique(keys, return_counts=True)
        for key, c in zip(uniq, cnts):
            key = int(key)
            k3 = key % base
            key //= base
            k2 = key % base
            key //= base
            k1 = key % base
            k0 = key // base
            tup = (k0, k1, k2, k3)
            out[tup] = out.get(tup, 0) + int(c)
    return {OverlapMatrix(n, tup): c for tup, c in out.items()}


# ---------------------------------------------------------------------------
# Exact Gibbs sampling (uniform colourable hypergraph, then uniform colouring)
# ---------------------------------------------------------------------------


def _sample_uniform_colouring(h: Hypergraph, rng: np.random.Generator,
                              dense_bound: int = DENSE_COMPONENT_BOUND) -> Optional[Colouring]:
    """Uniform proper colouring of h, or None if none exists.

    Components are coloured independently: count each component's proper
    assignments, draw a uniform rank, then walk the enumeration to that rank.
    """
    bits = 0
    isolated: list[int] = []
    for verts, edge_idx in connected_components(h):
        if not edge_idx:
            isolated.extend(verts)
            continue
        masks, nbits = _component_masks(h, verts, edge_idx)
        if nbits > dense_bound:
            raise ResourceLimitError(
                f"component with {nbits} vertices exceeds the dense enumeration bound {dense_bound}"
            )
        if nbits <= 12:
            z = int(_hist_small(masks, nbits).sum())
            if z == 0:
                return None
            r = int(rng.integers(z))
            local = int(_rth_small(masks, nbits, r))
        else:
            hi, low0, low1 = _split_masks(masks)
            z = int(_hist_words(hi, low0, low1, nbits).sum())
            if z == 0:
                return None
            r = int(rng.integers(z))
            local = int(_rth_words(hi, low0, low1, nbits, r))
        for i, v in enumerate(verts):
            if (local >> i) & 1:
                bits |= 1 << (v - 1)
    if isolated:
        free = rng.integers(0, 2, size=len(isolated))
        for v, b in zip(isolated, free):
            if b:
                bits |= 1 << (v - 1)
    return Colouring(h.n, bits)


def sample_gibbs_pair(
    params: ModelParams,
    seed: int,
    rejection_cap: int = GIBBS_REJECTION_CAP,
    dense_bound: int = DENSE_COMPONENT_BOUND,
) -> Tuple[Hypergraph, Colouring]:
    """Exact sample from the random colouring model at test scale.

    Draws simple hypergraphs until one is 2-colourable (rejection), then a
    uniform proper colouring of it via exact per-component counts.
    """
    if params.flavour is not Flavour.SIMPLE:
        raise ParameterError("the random colouring model is defined over the simple flavour")
    for attempt in range(rejection_cap):
        h = sample_simple_hypergraph(params, derive_seed(seed, attempt, 0))
        rng = derive_rng(seed, attempt, 1)
        sigma = _sample_uniform_colouring(h, rng, dense_bound)
        if sigma is not None:
            return h, sigma
    raise RejectionLimitError(
        f"no colourable hypergraph found within {rejection_cap} rejections"
    )
