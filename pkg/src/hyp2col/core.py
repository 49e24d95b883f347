"""Domain types and the three random hypergraph models.

A hypergraph here is always k-uniform on vertices 1..n, with *positional* edge
identity: the edge list is an ordered multiset, so two equal edges drawn by the
with-replacement model are distinct objects (this matters for cycle counting).

Colourings are 0/1 vertex maps stored as bit vectors (bit v-1 holds the colour
of vertex v).  All types are immutable after construction and safe to share
across threads; generators are pure functions of (params, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DimensionError,
    InfeasibleError,
    ParameterError,
    RejectionLimitError,
)

#: Retry cap for rejection-sampled colourings in the planted model.
PLANTED_REJECTION_CAP = 10**6

#: Retry cap (in raw edge draws) for edge rejection loops.
EDGE_DRAW_CAP = 10**8

#: Batch size for vectorised edge drawing.  Fixed so that output is a pure
#: function of the seed regardless of how many edges are requested.
_EDGE_BATCH = 256


class Flavour(Enum):
    """Which random model an edge list was (or is to be) drawn from."""

    WITH_REPLACEMENT = "with_replacement"  # m i.i.d. uniform k-sets, duplicates allowed
    SIMPLE = "simple"                      # uniform m-subset of all k-sets
    PLANTED = "planted"                    # uniform colouring, then bichromatic edges


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    """Return the named, platform-independent generator for (seed, *key).

    The stream is PCG64 keyed by hashing the master seed together with the
    supplied derivation indices, so per-trial substreams are reproducible and
    independent of scheduling order.
    """
    if seed < 0:
        raise ParameterError("seed must be a nonnegative integer")
    entropy = (int(seed),) + tuple(int(x) for x in key)
    if any(x < 0 for x in entropy):
        raise ParameterError("derivation indices must be nonnegative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def derive_seed(seed: int, *key: int) -> int:
    """Hash (seed, *key) into a single substream seed (for nested derivation)."""
    if seed < 0 or any(int(x) < 0 for x in key):
        raise ParameterError("seed and derivation indices must be nonnegative")
    ss = np.random.SeedSequence((int(seed),) + tuple(int(x) for x in key))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class ModelParams:
    """Parameter record (n, k, m) threaded through every formula.

    ``d`` is the effective edge density k*m/n, kept exact as a Fraction;
    ``d_prime`` is the requested density when the record was built from one
    (then m = ceil(d_prime*n/k)).
    """

    n: int
    k: int
    m: int
    flavour: Flavour = Flavour.WITH_REPLACEMENT
    d_prime: Optional[float] = None

    def __post_init__(self):
        if self.k < 3:
            raise ParameterError(f"k must be >= 3, got {self.k}")
        if self.n < self.k:
            raise ParameterError(f"need n >= k, got n={self.n}, k={self.k}")
        if self.m < 0:
            raise ParameterError(f"m must be nonnegative, got {self.m}")
        if self.d_prime is not None and not (self.d_prime >= 0 and math.isfinite(self.d_prime)):
            raise ParameterError(f"d_prime must be a finite nonnegative real, got {self.d_prime}")

    @classmethod
    def from_density(
        cls,
        n: int,
        k: int,
        d_prime: float,
        flavour: Flavour = Flavour.WITH_REPLACEMENT,
    ) -> "ModelParams":
        """Build params from a requested density: m = ceil(d_prime * n / k)."""
        if not (d_prime >= 0 and math.isfinite(d_prime)):
            raise ParameterError(f"d_prime must be a finite nonnegative real, got {d_prime}")
        m = math.ceil(Fraction(d_prime) * n / k)
        return cls(n=n, k=k, m=m, flavour=flavour, d_prime=float(d_prime))

    @property
    def d(self) -> Fraction:
        """Effective density k*m/n, exact."""
        return Fraction(self.k * self.m, self.n)

    def with_flavour(self, flavour: Flavour) -> "ModelParams":
        return ModelParams(self.n, self.k, self.m, flavour, self.d_prime)


@dataclass(frozen=True)
class Hypergraph:
    """k-uniform hypergraph on vertices 1..n with an ordered multiset of edges.

    Every edge is a strictly increasing k-tuple of vertex ids.  Duplicate
    edges are permitted (multi-hypergraph semantics); edge identity is the
    position in ``edges``.
    """

    n: int
    k: int
    edges: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"n must be positive, got {self.n}")
        if self.k < 3:
            raise ParameterError(f"k must be >= 3, got {self.k}")
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        for e in self.edges:
            if len(e) != self.k:
                raise ParameterError(f"edge {e} does not have {self.k} vertices")
            if any(e[i] >= e[i + 1] for i in range(len(e) - 1)):
                raise ParameterError(f"edge {e} is not strictly sorted")
            if e[0] < 1 or e[-1] > self.n:
                raise ParameterError(f"edge {e} has vertices outside [1, {self.n}]")

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def incidence(self) -> Tuple[Tuple[int, ...], ...]:
        """Vertex -> incident edge indices (index 0 unused), built lazily."""
        adj: list[list[int]] = [[] for _ in range(self.n + 1)]
        for i, e in enumerate(self.edges):
            for v in e:
                adj[v].append(i)
        return tuple(tuple(a) for a in adj)

    @cached_property
    def edge_masks(self) -> Tuple[int, ...]:
        """Edges as vertex bitmasks (vertex v -> bit v-1)."""
        return tuple(sum(1 << (v - 1) for v in e) for e in self.edges)


def connected_components(h: Hypergraph) -> list[tuple[list[int], list[int]]]:
    """Components of the vertex/edge incidence structure.

    Returns (vertices, edge indices) per component, components ordered by their
    smallest vertex, vertices sorted.  Isolated vertices form singleton
    components with no edges.
    """
    seen = [False] * (h.n + 1)
    incidence = h.incidence
    comps = []
    for start in range(1, h.n + 1):
        if seen[start]:
            continue
        seen[start] = True
        verts = [start]
        edge_set: set[int] = set()
        stack = [start]
        while stack:
            v = stack.pop()
            for ei in incidence[v]:
                if ei in edge_set:
                    continue
                edge_set.add(ei)
                for w in h.edges[ei]:
                    if not seen[w]:
                        seen[w] = True
                        verts.append(w)
                        stack.append(w)
        verts.sort()
        comps.append((verts, sorted(edge_set)))
    return comps


@dataclass(frozen=True)
class Colouring:
    """A 0/1 vertex assignment stored as a bit vector (bit v-1 = colour of v)."""

    n: int
    bits: int

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"n must be positive, got {self.n}")
        if not (0 <= self.bits < (1 << self.n)):
            raise ParameterError("bits out of range for n vertices")

    @classmethod
    def from_string(cls, s: str) -> "Colouring":
        if not s or any(c not in "01" for c in s):
            raise ParameterError(f"colouring string must be nonempty over 0/1, got {s!r}")
        bits = 0
        for i, c in enumerate(s):
            if c == "1":
                bits |= 1 << i
        return cls(n=len(s), bits=bits)

    @classmethod
    def from_values(cls, values: Sequence[int]) -> "Colouring":
        return cls.from_string("".join(str(int(v)) for v in values))

    def to_string(self) -> str:
        return "".join("1" if (self.bits >> i) & 1 else "0" for i in range(self.n))

    def colour(self, v: int) -> int:
        if not 1 <= v <= self.n:
            raise ParameterError(f"vertex {v} outside [1, {self.n}]")
        return (self.bits >> (v - 1)) & 1

    @property
    def ones(self) -> int:
        return self.bits.bit_count()

    @property
    def zeros(self) -> int:
        """Number of vertices coloured 0."""
        return self.n - self.ones

    @property
    def density(self) -> Fraction:
        """Colour density: fraction of vertices coloured 0."""
        return Fraction(self.zeros, self.n)

    def complement(self) -> "Colouring":
        return Colouring(self.n, self.bits ^ ((1 << self.n) - 1))


@dataclass(frozen=True)
class OverlapMatrix:
    """2x2 contingency table of two colourings: counts = (n00, n01, n10, n11).

    Entry (i, j) counts vertices coloured i by the first colouring and j by the
    second.  Normalised entries and marginals are exact rationals.
    """

    n: int
    counts: Tuple[int, int, int, int]

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if len(self.counts) != 4 or any(c < 0 for c in self.counts):
            raise ParameterError(f"counts must be 4 nonnegative integers, got {self.counts}")
        if sum(self.counts) != self.n:
            raise ParameterError(f"counts {self.counts} do not sum to n={self.n}")

    @property
    def rho(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return tuple(Fraction(c, self.n) for c in self.counts)  # type: ignore[return-value]

    @property
    def row_counts(self) -> Tuple[int, int]:
        c = self.counts
        return (c[0] + c[1], c[2] + c[3])

    @property
    def col_counts(self) -> Tuple[int, int]:
        c = self.counts
        return (c[0] + c[2], c[1] + c[3])

    @property
    def row_marginals(self) -> Tuple[Fraction, Fraction]:
        return tuple(Fraction(c, self.n) for c in self.row_counts)  # type: ignore[return-value]

    @property
    def col_marginals(self) -> Tuple[Fraction, Fraction]:
        return tuple(Fraction(c, self.n) for c in self.col_counts)  # type: ignore[return-value]

    def transpose(self) -> "OverlapMatrix":
        c = self.counts
        return OverlapMatrix(self.n, (c[0], c[2], c[1], c[3]))


def monochromatic_edge_count(zeros: int, n: int, k: int) -> int:
    """Number of k-sets of [n] monochromatic under a colouring with ``zeros`` 0s.

    Exact big integer: C(zeros, k) + C(n - zeros, k).
    """
    if not 0 <= zeros <= n:
        raise ParameterError(f"zeros must lie in [0, {n}], got {zeros}")
    return math.comb(zeros, k) + math.comb(n - zeros, k)


def is_proper(h: Hypergraph, colouring: Colouring) -> bool:
    """True iff every edge of ``h`` sees both colours."""
    if colouring.n != h.n:
        raise DimensionError(f"colouring has n={colouring.n}, hypergraph has n={h.n}")
    bits = colouring.bits
    for mask in h.edge_masks:
        em = bits & mask
        if em == 0 or em == mask:
            return False
    return True


def overlap_matrix(sigma: Colouring, tau: Colouring) -> OverlapMatrix:
    """Joint colour counts of two colourings on the same vertex set."""
    if sigma.n != tau.n:
        raise DimensionError(f"colourings have different sizes {sigma.n} != {tau.n}")
    n = sigma.n
    n11 = (sigma.bits & tau.bits).bit_count()
    n10 = sigma.ones - n11
    n01 = tau.ones - n11
    n00 = n - n11 - n10 - n01
    return OverlapMatrix(n, (n00, n01, n10, n11))


# ---------------------------------------------------------------------------
# Random models
# ---------------------------------------------------------------------------


def _iter_uniform_edges(rng: np.random.Generator, n: int, k: int) -> Iterator[Tuple[int, ...]]:
    """Yield i.i.d. uniform k-sets of [n] as sorted tuples.

    Rows with repeated vertices are rejected, which leaves the law uniform on
    k-sets.  Batched draws with a fixed batch size keep the stream a pure
    function of the generator state.
    """
    while True:
        batch = rng.integers(1, n + 1, size=(_EDGE_BATCH, k))
        batch.sort(axis=1)
        if k > 1:
            valid = (np.diff(batch, axis=1) > 0).all(axis=1)
        else:
            valid = np.ones(len(batch), dtype=bool)
        for row in batch[valid]:
            yield tuple(int(x) for x in row)


def _take_with_replacement(rng: np.random.Generator, n: int, k: int, m: int) -> list[Tuple[int, ...]]:
    it = _iter_uniform_edges(rng, n, k)
    return [next(it) for _ in range(m)]


def sample_hypergraph_with_replacement(params: ModelParams, seed: int) -> Hypergraph:
    """Draw m edges uniformly and independently (duplicates allowed)."""
    if params.flavour is not Flavour.WITH_REPLACEMENT:
        raise ParameterError("params.flavour must be WITH_REPLACEMENT")
    rng = derive_rng(seed)
    edges = _take_with_replacement(rng, params.n, params.k, params.m)
    return Hypergraph(params.n, params.k, tuple(edges))


def sample_simple_hypergraph(params: ModelParams, seed: int) -> Hypergraph:
    """Draw a uniform m-subset of all C(n, k) edges (all edges distinct).

    Implemented as the first m distinct values of an i.i.d. uniform edge
    stream, which is exactly uniform over m-subsets.
    """
    if params.flavour is not Flavour.SIMPLE:
        raise ParameterError("params.flavour must be SIMPLE")
    total = math.comb(params.n, params.k)
    if params.m > total:
        raise InfeasibleError(
            f"cannot place {params.m} distinct edges: only C({params.n},{params.k})={total} exist"
        )
    rng = derive_rng(seed)
    edges = _take_distinct(rng, params.n, params.k, params.m, predicate=None)
    return Hypergraph(params.n, params.k, tuple(edges))


def _take_distinct(rng, n, k, m, predicate) -> list[Tuple[int, ...]]:
    it = _iter_uniform_edges(rng, n, k)
    seen: set[Tuple[int, ...]] = set()
    out: list[Tuple[int, ...]] = []
    draws = 0
    while len(out) < m:
        e = next(it)
        draws += 1
        if draws > EDGE_DRAW_CAP:
            raise RejectionLimitError(f"edge rejection loop exceeded {EDGE_DRAW_CAP} draws")
        if predicate is not None and not predicate(e):
            continue
        if e in seen:
            continue
        seen.add(e)
        out.append(e)
    return out


def _min_forbidden(n: int, k: int) -> int:
    return monochromatic_edge_count(n // 2, n, k)


def sample_planted_pair(
    params: ModelParams,
    seed: int,
    distinct_edges: bool = True,
    rejection_cap: int = PLANTED_REJECTION_CAP,
) -> Tuple[Hypergraph, Colouring]:
    """Planted model: uniform feasible colouring, then bichromatic edges.

    The colouring is rejection-sampled uniformly among all maps whose number
    of monochromatic k-sets leaves room for m bichromatic edges.  Edges are
    then drawn uniformly among the bichromatic k-sets, all distinct when
    ``distinct_edges`` is set and with replacement otherwise.  Every returned
    pair satisfies :func:`is_proper`.
    """
    if params.flavour is not Flavour.PLANTED:
        raise ParameterError("params.flavour must be PLANTED")
    n, k, m = params.n, params.k, params.m
    total = math.comb(n, k)
    if m > total - _min_forbidden(n, k):
        raise InfeasibleError(
            f"no colouring of {n} vertices leaves {m} bichromatic edges available"
        )
    rng = derive_rng(seed)
    budget = total - m
    sigma = None
    for _ in range(rejection_cap):
        raw = rng.integers(0, 2, size=n)
        bits = 0
        for i in range(n):
            if raw[i]:
                bits |= 1 << i
        cand = Colouring(n, bits)
        if monochromatic_edge_count(cand.zeros, n, k) <= budget:
            sigma = cand
            break
    if sigma is None:
        raise RejectionLimitError(
            f"no feasible colouring found within {rejection_cap} rejections"
        )

    sbits = sigma.bits
    masks_ok = _bichromatic_predicate(sbits)
    if distinct_edges:
        edges = _take_distinct(rng, n, k, m, predicate=masks_ok)
    else:
        it = _iter_uniform_edges(rng, n, k)
        edges = []
        draws = 0
        while len(edges) < m:
            e = next(it)
            draws += 1
            if draws > EDGE_DRAW_CAP:
                raise RejectionLimitError(f"edge rejection loop exceeded {EDGE_DRAW_CAP} draws")
            if masks_ok(e):
                edges.append(e)
    return Hypergraph(n, k, tuple(edges)), sigma


def _bichromatic_predicate(sigma_bits: int):
    def ok(e: Tuple[int, ...]) -> bool:
        mask = 0
        for v in e:
            mask |= 1 << (v - 1)
        em = sigma_bits & mask
        return em != 0 and em != mask

    return ok


def sample_hypergraph(params: ModelParams, seed: int) -> Hypergraph:
    """Dispatch on flavour for the two models without a planted colouring."""
    if params.flavour is Flavour.WITH_REPLACEMENT:
        return sample_hypergraph_with_replacement(params, seed)
    if params.flavour is Flavour.SIMPLE:
        return sample_simple_hypergraph(params, seed)
    raise ParameterError("use sample_planted_pair for the planted flavour")
