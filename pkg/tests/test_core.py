"""Tests for parameters, data types, and the three random models."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyp2col import (
    Colouring,
    DimensionError,
    Flavour,
    Hypergraph,
    InfeasibleError,
    ModelParams,
    ParameterError,
    derive_rng,
    is_proper,
    monochromatic_edge_count,
    overlap_matrix,
    sample_hypergraph_with_replacement,
    sample_planted_pair,
    sample_simple_hypergraph,
)

from oracles import exact_mean_abs_density_shift, no_duplicate_probability


def wr_params(n, k, m):
    return ModelParams(n=n, k=k, m=m, flavour=Flavour.WITH_REPLACEMENT)


def simple_params(n, k, m):
    return ModelParams(n=n, k=k, m=m, flavour=Flavour.SIMPLE)


def planted_params(n, k, m):
    return ModelParams(n=n, k=k, m=m, flavour=Flavour.PLANTED)


class TestModelParams:
    def test_validation(self):
        with pytest.raises(ParameterError):
            ModelParams(n=2, k=3, m=0)
        with pytest.raises(ParameterError):
            ModelParams(n=5, k=2, m=0)
        with pytest.raises(ParameterError):
            ModelParams(n=5, k=3, m=-1)

    def test_from_density_ceil(self):
        p = ModelParams.from_density(26, 3, 2.0)
        assert p.m == 18  # ceil(52/3)
        assert p.d == Fraction(54, 26)
        assert p.d_prime == 2.0

    def test_d_exact_rational(self):
        p = wr_params(10, 3, 7)
        assert p.d == Fraction(21, 10)


class TestColouring:
    def test_string_roundtrip(self):
        c = Colouring.from_string("0110")
        assert c.to_string() == "0110"
        assert c.zeros == 2
        assert c.density == Fraction(1, 2)
        assert [c.colour(v) for v in (1, 2, 3, 4)] == [0, 1, 1, 0]

    def test_complement(self):
        c = Colouring.from_string("0011")
        assert c.complement().to_string() == "1100"

    @given(st.integers(1, 20), st.data())
    def test_zeros_matches_bits(self, n, data):
        bits = data.draw(st.integers(0, (1 << n) - 1))
        c = Colouring(n, bits)
        assert c.zeros == c.to_string().count("0")


class TestMonochromaticEdgeCount:
    def test_all_one_colour(self):
        assert monochromatic_edge_count(0, 6, 3) == 20

    def test_balanced(self):
        assert monochromatic_edge_count(3, 6, 3) == 2

    def test_both_classes_small(self):
        assert monochromatic_edge_count(2, 4, 3) == 0

    @given(st.integers(3, 8), st.integers(3, 40), st.data())
    def test_symmetry(self, k, n, data):
        zeros = data.draw(st.integers(0, n))
        assert monochromatic_edge_count(zeros, n, k) == monochromatic_edge_count(
            n - zeros, n, k
        )


class TestWithReplacement:
    def test_empty(self):
        h = sample_hypergraph_with_replacement(wr_params(4, 3, 0), 1)
        assert h.edges == ()

    def test_single_possible_edge(self):
        h = sample_hypergraph_with_replacement(wr_params(3, 3, 2), 5)
        assert h.edges == ((1, 2, 3), (1, 2, 3))

    def test_deterministic(self):
        p = wr_params(30, 3, 25)
        a = sample_hypergraph_with_replacement(p, 99)
        b = sample_hypergraph_with_replacement(p, 99)
        assert a.edges == b.edges
        c = sample_hypergraph_with_replacement(p, 100)
        assert a.edges != c.edges

    def test_birthday_duplicates(self):
        # With 1000 draws from the 1140 possible edges, the exact probability
        # of seeing no duplicate is astronomically small.
        p_nodup = no_duplicate_probability(20, 3, 1000)
        assert p_nodup < Fraction(1, 10**100)
        p = wr_params(20, 3, 1000)
        for seed in range(100):
            h = sample_hypergraph_with_replacement(p, seed)
            assert len(set(h.edges)) < h.m, f"seed {seed} produced no duplicate"

    @pytest.mark.slow
    def test_duplicate_rate_halves_when_n_doubles(self):
        # P[duplicate] ~ const/n at k = 3 and m = n; check both sizes against
        # the exact law and the exact ratio against 2.
        trials = 4000
        rates = {}
        for n in (60, 120):
            p = wr_params(n, 3, n)
            exact = 1.0 - float(no_duplicate_probability(n, 3, n))
            hits = 0
            for t in range(trials):
                h = sample_hypergraph_with_replacement(p, 7_000 + t)
                if len(set(h.edges)) < h.m:
                    hits += 1
            emp = hits / trials
            se = math.sqrt(exact * (1 - exact) / trials)
            assert abs(emp - exact) <= 4 * se, (n, emp, exact)
            rates[n] = exact
        assert 1.8 <= rates[60] / rates[120] <= 2.2


class TestSimple:
    def test_all_subsets_when_m_max(self):
        h = sample_simple_hypergraph(simple_params(4, 3, 4), 3)
        assert sorted(h.edges) == [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]

    def test_distinct(self):
        h = sample_simple_hypergraph(simple_params(14, 3, 10), 11)
        assert len(set(h.edges)) == 10

    def test_infeasible(self):
        with pytest.raises(InfeasibleError):
            sample_simple_hypergraph(simple_params(4, 3, 5), 0)

    @pytest.mark.slow
    def test_single_edge_uniform(self):
        # n=4, k=3, m=1: each of the 4 edges should appear with frequency 1/4.
        p = simple_params(4, 3, 1)
        counts = {}
        trials = 100_000
        for seed in range(trials):
            h = sample_simple_hypergraph(p, seed)
            counts[h.edges[0]] = counts.get(h.edges[0], 0) + 1
        se = math.sqrt(0.25 * 0.75 / trials)
        for e, c in counts.items():
            assert abs(c / trials - 0.25) <= 3 * se, (e, c / trials)

    @pytest.mark.slow
    def test_fixed_edge_marginal(self):
        # Marginal inclusion probability of a fixed edge is m / C(n, k).
        p = simple_params(6, 3, 5)
        target = 5 / 20
        trials = 40_000
        hits = sum(
            (1, 2, 3) in sample_simple_hypergraph(p, 50_000 + t).edges
            for t in range(trials)
        )
        se = math.sqrt(target * (1 - target) / trials)
        assert abs(hits / trials - target) <= 4 * se


class TestPlanted:
    def test_always_proper(self):
        for n, k, m in [(6, 3, 4), (9, 3, 6), (10, 4, 5), (12, 3, 10)]:
            p = planted_params(n, k, m)
            for seed in range(25):
                h, sigma = sample_planted_pair(p, seed)
                assert is_proper(h, sigma)

    def test_with_replacement_edges_also_proper(self):
        p = planted_params(8, 3, 12)
        for seed in range(25):
            h, sigma = sample_planted_pair(p, seed, distinct_edges=False)
            assert is_proper(h, sigma)

    def test_infeasible(self):
        # n=6, k=3: a balanced colouring still blocks 2 of the 20 edges.
        with pytest.raises(InfeasibleError):
            sample_planted_pair(planted_params(6, 3, 19), 0)

    @pytest.mark.slow
    def test_conditional_edge_uniformity(self):
        # Given the planted colouring, the single edge is uniform over its
        # bichromatic edges: 4 of them for balanced colourings, 3 for 3-1
        # splits (never the monochromatic one).
        p = planted_params(4, 3, 1)
        counts: dict = {}
        trials = 100_000
        for seed in range(trials):
            h, sigma = sample_planted_pair(p, seed)
            key = sigma.to_string()
            counts.setdefault(key, {})
            e = h.edges[0]
            counts[key][e] = counts[key].get(e, 0) + 1
        for key, dist in counts.items():
            sigma = Colouring.from_string(key)
            n_bich = 4 if sigma.zeros == 2 else 3
            total = sum(dist.values())
            assert len(dist) <= n_bich
            se = math.sqrt((1 / n_bich) * (1 - 1 / n_bich) / total)
            for e, c in dist.items():
                assert sigma.colour(e[0]) != sigma.colour(e[1]) or sigma.colour(
                    e[0]
                ) != sigma.colour(e[2]), f"monochromatic edge planted under {key}"
                assert abs(c / total - 1 / n_bich) <= 4 * se, (key, e, c / total)

    @pytest.mark.slow
    def test_balanced_density_shift(self):
        # Mean |density - 1/2| of the planted colouring matches the exact
        # (feasibility-conditioned) binomial value within 5%.
        n, k, m = 1000, 3, 667
        target = float(exact_mean_abs_density_shift(n, k, m))
        p = planted_params(n, k, m)
        trials = 3000
        acc = 0.0
        for seed in range(trials):
            _h, sigma = sample_planted_pair(p, seed)
            acc += abs(float(sigma.density) - 0.5)
        assert abs(acc / trials - target) <= 0.05 * target


class TestIsProper:
    def test_no_edges(self):
        h = Hypergraph(4, 3, ())
        assert is_proper(h, Colouring.from_string("0000"))

    def test_monochromatic(self):
        h = Hypergraph(3, 3, ((1, 2, 3),))
        assert not is_proper(h, Colouring.from_string("000"))

    def test_proper(self):
        h = Hypergraph(4, 3, ((1, 2, 3), (2, 3, 4)))
        assert is_proper(h, Colouring.from_string("0110"))

    def test_dimension_mismatch(self):
        h = Hypergraph(4, 3, ())
        with pytest.raises(DimensionError):
            is_proper(h, Colouring.from_string("000"))


class TestOverlap:
    def test_self(self):
        c = Colouring.from_string("00111")
        om = overlap_matrix(c, c)
        assert om.counts == (2, 0, 0, 3)

    def test_complement(self):
        c = Colouring.from_string("00111")
        om = overlap_matrix(c, c.complement())
        assert om.counts == (0, 2, 3, 0)

    def test_hand_enumeration(self):
        om = overlap_matrix(Colouring.from_string("0011"), Colouring.from_string("0101"))
        assert om.counts == (1, 1, 1, 1)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            overlap_matrix(Colouring.from_string("00"), Colouring.from_string("000"))

    @given(st.integers(1, 16), st.data())
    def test_marginals(self, n, data):
        s = Colouring(n, data.draw(st.integers(0, (1 << n) - 1)))
        t = Colouring(n, data.draw(st.integers(0, (1 << n) - 1)))
        om = overlap_matrix(s, t)
        assert sum(om.counts) == n
        assert om.row_counts == (s.zeros, n - s.zeros)
        assert om.col_counts == (t.zeros, n - t.zeros)
        assert sum(om.rho) == 1
        assert om.transpose().counts == overlap_matrix(t, s).counts


class TestRng:
    def test_deterministic(self):
        a = derive_rng(5, 1, 2).integers(0, 2**32, size=4)
        b = derive_rng(5, 1, 2).integers(0, 2**32, size=4)
        assert (a == b).all()
        c = derive_rng(5, 1, 3).integers(0, 2**32, size=4)
        assert (a != c).any()

    def test_negative_seed_rejected(self):
        with pytest.raises(ParameterError):
            derive_rng(-1)


class TestHypergraphType:
    def test_edge_validation(self):
        with pytest.raises(ParameterError):
            Hypergraph(4, 3, ((1, 2),))
        with pytest.raises(ParameterError):
            Hypergraph(4, 3, ((3, 2, 1),))
        with pytest.raises(ParameterError):
            Hypergraph(4, 3, ((2, 3, 5),))

    def test_duplicates_allowed(self):
        h = Hypergraph(4, 3, ((1, 2, 3), (1, 2, 3)))
        assert h.m == 2

    def test_incidence(self):
        h = Hypergraph(4, 3, ((1, 2, 3), (2, 3, 4)))
        assert h.incidence[2] == (0, 1)
        assert h.incidence[1] == (0,)
