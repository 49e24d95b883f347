"""Tests for the cycle census and isolated-triangle detection."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyp2col import (
    Flavour,
    Hypergraph,
    ModelParams,
    ParameterError,
    count_cycles,
    count_isolated_triangles,
    sample_hypergraph_with_replacement,
)

from oracles import brute_cycle_counts, pair_bucket_c2

TRIANGLE = Hypergraph(6, 3, ((1, 2, 3), (3, 4, 5), (1, 5, 6)))


def random_hypergraph(n, m, seed, k=3):
    p = ModelParams(n=n, k=k, m=m, flavour=Flavour.WITH_REPLACEMENT)
    return sample_hypergraph_with_replacement(p, seed)


class TestCountCycles:
    def test_single_edge_no_cycles(self):
        census = count_cycles(Hypergraph(4, 3, ((1, 2, 3),)), 5)
        assert census.counts == (0, 0, 0, 0)

    def test_two_edges_sharing_pair(self):
        census = count_cycles(Hypergraph(4, 3, ((1, 2, 3), (1, 2, 4))), 2)
        assert census.count(2) == 1

    def test_doubled_edge_counts_three(self):
        # equal edges share all three vertex pairs: one 2-cycle per pair
        census = count_cycles(Hypergraph(3, 3, ((1, 2, 3), (1, 2, 3))), 2)
        assert census.count(2) == 3

    def test_isolated_triangle_census(self):
        census = count_cycles(TRIANGLE, 3)
        assert census.count(2) == 0
        assert census.count(3) == 1

    def test_matches_tuple_oracle(self):
        rng = np.random.default_rng(3)
        for trial in range(25):
            n = int(rng.integers(3, 8))
            m = int(rng.integers(0, 6))
            h = random_hypergraph(n, m, 400 + trial)
            expected = brute_cycle_counts(h, 4)
            census = count_cycles(h, 4)
            assert list(census.counts) == expected, h.edges

    def test_matches_pair_bucket_oracle_at_scale(self):
        for trial in range(10):
            h = random_hypergraph(60, 70, 900 + trial)
            assert count_cycles(h, 2).count(2) == pair_bucket_c2(h)

    def test_relabelling_invariance(self):
        rng = np.random.default_rng(8)
        for trial in range(10):
            h = random_hypergraph(9, 8, 500 + trial)
            perm = list(rng.permutation(h.n) + 1)
            relabelled = Hypergraph(
                h.n, h.k, tuple(tuple(sorted(perm[v - 1] for v in e)) for e in h.edges)
            )
            assert count_cycles(h, 4).counts == count_cycles(relabelled, 4).counts

    def test_monotone_under_edge_addition(self):
        rng = np.random.default_rng(21)
        for trial in range(10):
            h = random_hypergraph(10, 6, 600 + trial)
            extra = tuple(sorted(int(v) + 1 for v in rng.choice(10, 3, replace=False)))
            bigger = Hypergraph(h.n, h.k, h.edges + (extra,))
            before = count_cycles(h, 4).counts
            after = count_cycles(bigger, 4).counts
            assert all(b >= a for a, b in zip(before, after))

    def test_max_len_validation(self):
        with pytest.raises(ParameterError):
            count_cycles(TRIANGLE, 1)

    def test_csv_row(self):
        census = count_cycles(TRIANGLE, 3)
        assert census.csv_row(6, 3, 3, 17) == "6,3,3,17,0,1"
        assert census.csv_row(6, 3, 3, None) == "6,3,3,,0,1"


class TestIsolatedTriangles:
    def test_empty(self):
        assert count_isolated_triangles(Hypergraph(6, 3, ())) == 0

    def test_exactly_one(self):
        assert count_isolated_triangles(TRIANGLE) == 1

    def test_touching_edge_breaks_isolation(self):
        h = Hypergraph(8, 3, TRIANGLE.edges + ((1, 7, 8),))
        assert count_isolated_triangles(h) == 0

    def test_two_triangles(self):
        shifted = tuple(tuple(v + 6 for v in e) for e in TRIANGLE.edges)
        h = Hypergraph(12, 3, TRIANGLE.edges + shifted)
        assert count_isolated_triangles(h) == 2

    def test_shared_vertex_pair_not_a_triangle(self):
        # 3 edges, but two of them intersect in 2 vertices: 7 < 3k-3 fails
        h = Hypergraph(7, 3, ((1, 2, 3), (2, 3, 4), (4, 5, 6)))
        assert count_isolated_triangles(h) == 0

    def test_k4_loose_triangle(self):
        h = Hypergraph(9, 4, ((1, 2, 3, 4), (4, 5, 6, 7), (1, 7, 8, 9)))
        assert count_isolated_triangles(h) == 1

    def test_common_core_not_counted(self):
        # pairwise intersections are all {1}: 3 edges on 7 vertices, not 3k-3=6
        h = Hypergraph(7, 3, ((1, 2, 3), (1, 4, 5), (1, 6, 7)))
        assert count_isolated_triangles(h) == 0
