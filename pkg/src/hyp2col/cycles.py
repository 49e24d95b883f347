"""Exact short-cycle census and isolated-triangle detection.

A cycle of length l is counted through its rooted directed tuples: l distinct
vertices v_1..v_l and l pairwise distinct edge *objects* e_1..e_l with
{v_i, v_{i+1 mod l}} contained in e_i.  Every tuple is counted, including
cycles whose consecutive edges overlap in more than one vertex; the tuple
count D_l is divided by 2l (rotations and reflections), and exact divisibility
is asserted as an internal consistency trap.

Consequences of the tuple convention: a doubled edge yields 2-cycles (two
edges sharing all three vertices contribute C_2 = 3), and two edges count one
2-cycle per shared unordered vertex pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from .core import Hypergraph, connected_components
from .errors import ParameterError


@dataclass(frozen=True)
class CycleCensus:
    """Cycle counts (C_2, ..., C_max_len); independent of edge order."""

    max_len: int
    counts: Tuple[int, ...]

    def __post_init__(self):
        if self.max_len < 2:
            raise ParameterError(f"max_len must be >= 2, got {self.max_len}")
        if len(self.counts) != self.max_len - 1:
            raise ParameterError("counts must hold one entry per length 2..max_len")

    def count(self, length: int) -> int:
        if not 2 <= length <= self.max_len:
            raise ParameterError(f"length {length} outside [2, {self.max_len}]")
        return self.counts[length - 2]

    def csv_row(self, n: int, m: int, k: int, seed) -> str:
        head = [str(n), str(m), str(k), "" if seed is None else str(seed)]
        return ",".join(head + [str(c) for c in self.counts])


def count_cycles(h: Hypergraph, max_len: int) -> CycleCensus:
    """Count cycles of every length 2..max_len by DFS over alternating tuples.

    The walk extends (vertex, edge) alternations keeping vertices and edge
    objects distinct, closing back at the root; the raw rooted directed count
    is divided by 2l, asserting exactness.
    """
    if max_len < 2:
        raise ParameterError(f"max_len must be >= 2, got {max_len}")
    n = h.n
    edges = h.edges
    incidence = h.incidence
    raw = [0] * (max_len + 1)
    used_edge = [False] * len(edges)
    on_path = [False] * (n + 1)

    def walk(root: int, v: int, depth: int) -> None:
        for ei in incidence[v]:
            if used_edge[ei]:
                continue
            used_edge[ei] = True
            for w in edges[ei]:
                if w == root:
                    if depth >= 2:
                        raw[depth] += 1
                elif depth < max_len and not on_path[w]:
                    on_path[w] = True
                    walk(root, w, depth + 1)
                    on_path[w] = False
            used_edge[ei] = False

    for root in range(1, n + 1):
        on_path[root] = True
        walk(root, root, 1)
        on_path[root] = False

    counts = []
    for length in range(2, max_len + 1):
        d = raw[length]
        if d % (2 * length) != 0:
            raise AssertionError(
                f"rooted directed count {d} for length {length} not divisible by {2 * length}"
            )
        counts.append(d // (2 * length))
    return CycleCensus(max_len, tuple(counts))


def count_isolated_triangles(h: Hypergraph) -> int:
    """Connected components that are loose triangles.

    A loose triangle has exactly 3 edges on 3k-3 vertices with every pair of
    edges meeting in exactly one vertex.
    """
    k = h.k
    hits = 0
    for verts, edge_idx in connected_components(h):
        if len(edge_idx) != 3 or len(verts) != 3 * k - 3:
            continue
        sets = [frozenset(h.edges[ei]) for ei in edge_idx]
        if all(
            len(sets[i] & sets[j]) == 1
            for i in range(3)
            for j in range(i + 1, 3)
        ):
            hits += 1
    return hits
