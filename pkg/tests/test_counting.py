"""Tests for exact counting, density strata, overlap pair counts, Gibbs sampling."""

import math
from decimal import Decimal, getcontext
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyp2col import (
    Colouring,
    DensityGrid,
    Flavour,
    Hypergraph,
    ModelParams,
    ParameterError,
    ResourceLimitError,
    count_colourings,
    count_pairs_by_overlap,
    is_proper,
    sample_gibbs_pair,
    sample_hypergraph_with_replacement,
)

from oracles import naive_count_by_density


def random_hypergraph(n, m, seed, k=3):
    p = ModelParams(n=n, k=k, m=m, flavour=Flavour.WITH_REPLACEMENT)
    return sample_hypergraph_with_replacement(p, seed)


TRIANGLE = Hypergraph(6, 3, ((1, 2, 3), (3, 4, 5), (1, 5, 6)))


def brute_force_count(h):
    # direct bit loop, independent of the package counting path
    z = 0
    for a in range(1 << h.n):
        ok = True
        for e in h.edges:
            bits = [(a >> (v - 1)) & 1 for v in e]
            if min(bits) == max(bits):
                ok = False
                break
        if ok:
            z += 1
    return z


class TestCountColourings:
    def test_empty_graph(self):
        rep = count_colourings(Hypergraph(5, 3, ()))
        assert rep.total == 32
        assert rep.by_density == (1, 5, 10, 10, 5, 1)

    def test_single_edge(self):
        rep = count_colourings(Hypergraph(3, 3, ((1, 2, 3),)))
        assert rep.total == 6

    def test_isolated_triangle_is_26(self):
        assert brute_force_count(TRIANGLE) == 26
        assert count_colourings(TRIANGLE).total == 26

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(11)
        for trial in range(40):
            n = int(rng.integers(3, 13))
            m = int(rng.integers(0, 15))
            h = random_hypergraph(n, m, 1000 + trial)
            total, by_density = naive_count_by_density(h)
            rep = count_colourings(h)
            assert rep.total == total
            assert list(rep.by_density) == by_density

    def test_density_reflection_symmetry(self):
        for trial in range(15):
            h = random_hypergraph(10, 8, 300 + trial)
            rep = count_colourings(h)
            for z in range(h.n + 1):
                assert rep.by_density[z] == rep.by_density[h.n - z]
            assert sum(rep.by_density) == rep.total

    def test_disjoint_union_convolves(self):
        h1 = random_hypergraph(6, 5, 1)
        h2 = random_hypergraph(5, 4, 2)
        shifted = tuple(tuple(v + h1.n for v in e) for e in h2.edges)
        union = Hypergraph(h1.n + h2.n, 3, h1.edges + shifted)
        a = count_colourings(h1).by_density
        b = count_colourings(h2).by_density
        conv = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                conv[i + j] += x * y
        assert list(count_colourings(union).by_density) == conv

    def test_component_bound(self):
        # a 9-vertex loose path exceeds an artificially small bound
        h = Hypergraph(9, 3, ((1, 2, 3), (3, 4, 5), (5, 6, 7), (7, 8, 9)))
        with pytest.raises(ResourceLimitError):
            count_colourings(h, dense_bound=8)
        assert count_colourings(h, dense_bound=9).total == brute_force_count(h)

    def test_big_counts_stay_exact(self):
        # 70 isolated vertices: the total exceeds 2^64
        rep = count_colourings(Hypergraph(70, 3, ()))
        assert rep.total == 2**70

    def test_json_dict(self):
        grid = DensityGrid(omega=1, nu=1, n=6)
        rep = count_colourings(TRIANGLE, grid=grid)
        d = rep.to_json_dict()
        assert d["Z"] == "26"
        assert d["by_density"] == [str(c) for c in rep.by_density]
        assert d["Z_omega"] == str(rep.balanced_total)


class TestDensityGrid:
    def test_strata_partition_window(self):
        for n, omega, nu in [(16, 1, 2), (24, 3, 2), (100, 2, 3), (37, 1, 4)]:
            grid = DensityGrid(omega=omega, nu=nu, n=n)
            for z in range(n + 1):
                strata = [
                    s
                    for s in range(1, grid.num_strata + 1)
                    if z in grid.stratum_zero_counts(s)
                ]
                if grid.in_balanced_window(z):
                    assert len(strata) == 1
                    assert grid.stratum_of(z) == strata[0]
                else:
                    assert strata == []
                    assert grid.stratum_of(z) is None

    def test_boundary_ties_half_open(self):
        # n = 16: sqrt(n) = 4 makes every boundary rational.
        grid = DensityGrid(omega=1, nu=2, n=16)
        # window [1/4, 3/4), strata [1/4, 1/2) and [1/2, 3/4)
        assert grid.stratum_of(3) is None   # 3/16 below window
        assert grid.stratum_of(4) == 1      # exactly 1/4: left edge included
        assert grid.stratum_of(7) == 1
        assert grid.stratum_of(8) == 2      # exactly 1/2: goes right
        assert grid.stratum_of(11) == 2
        assert grid.stratum_of(12) is None  # exactly 3/4: right edge excluded

    def test_matches_high_precision_arithmetic(self):
        getcontext().prec = 60
        rng = np.random.default_rng(5)
        for _ in range(200):
            n = int(rng.integers(5, 2000))
            omega = int(rng.integers(1, 5))
            nu = int(rng.integers(1, 5))
            z = int(rng.integers(0, n + 1))
            grid = DensityGrid(omega=omega, nu=nu, n=n)
            root = Decimal(n).sqrt()
            lo = Decimal("0.5") - omega / root
            width = 2 / (nu * root)
            x = Decimal(z) / Decimal(n)
            inside = lo <= x < lo + grid.num_strata * width
            assert grid.in_balanced_window(z) == inside
            if inside:
                s = grid.stratum_of(z)
                assert lo + (s - 1) * width <= x < lo + s * width

    def test_centre_formula(self):
        grid = DensityGrid(omega=2, nu=3, n=100)
        rn = math.sqrt(100)
        for s in range(1, grid.num_strata + 1):
            assert grid.stratum_centre(s) == pytest.approx(
                0.5 - 2 / rn + (2 * s - 1) / (3 * rn)
            )

    def test_stratified_counts_sum(self):
        grid = DensityGrid(omega=2, nu=2, n=12)
        h = random_hypergraph(12, 9, 77)
        rep = count_colourings(h, grid=grid)
        assert rep.balanced_total == sum(rep.by_stratum)
        manual = sum(
            rep.by_density[z] for z in range(13) if grid.in_balanced_window(z)
        )
        assert rep.balanced_total == manual

    def test_validation(self):
        with pytest.raises(ParameterError):
            DensityGrid(omega=0, nu=1, n=10)
        grid = DensityGrid(omega=1, nu=1, n=10)
        with pytest.raises(ParameterError):
            grid.stratum_centre(2)


class TestPairsByOverlap:
    def test_empty_two_vertices(self):
        counts = count_pairs_by_overlap(Hypergraph(2, 3, ()))
        assert sum(counts.values()) == 16

    def test_single_edge_total(self):
        h = Hypergraph(3, 3, ((1, 2, 3),))
        counts = count_pairs_by_overlap(h)
        assert sum(counts.values()) == 36  # 6^2

    def test_transpose_symmetry_and_square(self):
        for seed in range(6):
            h = random_hypergraph(7, 5, 9000 + seed)
            counts = count_pairs_by_overlap(h)
            z = count_colourings(h).total
            assert sum(counts.values()) == z * z
            for om, c in counts.items():
                assert counts[om.transpose()] == c

    def test_resource_bound(self):
        with pytest.raises(ResourceLimitError):
            count_pairs_by_overlap(Hypergraph(17, 3, ()))


class TestGibbs:
    def test_always_proper_and_simple_flavour_required(self):
        p = ModelParams(n=8, k=3, m=6, flavour=Flavour.SIMPLE)
        for seed in range(20):
            h, sigma = sample_gibbs_pair(p, seed)
            assert is_proper(h, sigma)
        with pytest.raises(ParameterError):
            sample_gibbs_pair(
                ModelParams(n=8, k=3, m=6, flavour=Flavour.WITH_REPLACEMENT), 0
            )

    def test_m_zero_uniform(self):
        p = ModelParams(n=3, k=3, m=0, flavour=Flavour.SIMPLE)
        counts = {}
        trials = 16_000
        for seed in range(trials):
            _h, sigma = sample_gibbs_pair(p, seed)
            counts[sigma.to_string()] = counts.get(sigma.to_string(), 0) + 1
        assert len(counts) == 8
        se = math.sqrt((1 / 8) * (7 / 8) / trials)
        for s, c in counts.items():
            assert abs(c / trials - 1 / 8) <= 4 * se, (s, c / trials)

    @pytest.mark.slow
    def test_exact_law_single_edge(self):
        # n=3, k=3, m=1: hypergraph is always {1,2,3}; each of its 6 proper
        # colourings should appear with frequency 1/6.
        p = ModelParams(n=3, k=3, m=1, flavour=Flavour.SIMPLE)
        counts = {}
        trials = 100_000
        for seed in range(trials):
            h, sigma = sample_gibbs_pair(p, seed)
            assert h.edges == ((1, 2, 3),)
            counts[sigma.to_string()] = counts.get(sigma.to_string(), 0) + 1
        assert len(counts) == 6
        se = math.sqrt((1 / 6) * (5 / 6) / trials)
        for s, c in counts.items():
            assert abs(c / trials - 1 / 6) <= 3 * se, (s, c / trials)

    def test_deterministic(self):
        p = ModelParams(n=10, k=3, m=7, flavour=Flavour.SIMPLE)
        a = sample_gibbs_pair(p, 42)
        b = sample_gibbs_pair(p, 42)
        assert a[0].edges == b[0].edges
        assert a[1].bits == b[1].bits
