import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import graph_corpus
from scoop.encodings import build_maxpd, build_maxpes, build_minsc_penalty
from scoop.errors import ContractError, ParameterError
from scoop.metrics import (
    MetricsReport,
    aggregate,
    approximation_ratio,
    compute_metrics,
    constrained_diagonal,
    summed_top_k_probability,
)
from scoop.oracles import brute_force_polynomial, exact_constrained, index_to_bits
from scoop.postprocess import enhancement_map, enhancer_for, postprocess_distribution
from scoop.qaoa import precompute_diagonal


@pytest.fixture
def p3_setup(p3):
    poly = build_maxpd(p3)[0]
    return precompute_diagonal(poly), brute_force_polynomial(poly)


@pytest.mark.parametrize("k, expected", [(1, 0.125), (2, 0.75), (3, 1.0), (7, 1.0)])
def test_top_k_on_uniform(p3_setup, k, expected):
    dc, rec = p3_setup
    assert summed_top_k_probability(np.full(8, 1 / 8), dc, rec.value_ladder, k) == pytest.approx(expected)


def test_top_k_point_mass_on_optimum(p3_setup):
    dc, rec = p3_setup
    dist = np.zeros(8)
    dist[0b010] = 1
    assert all(summed_top_k_probability(dist, dc, rec.value_ladder, k) == 1 for k in (1, 2, 3))


def test_top_k_errors(p3_setup):
    dc, rec = p3_setup
    with pytest.raises(ContractError):
        summed_top_k_probability(np.full(8, 1 / 8), dc, (), 1)
    with pytest.raises(ParameterError):
        summed_top_k_probability(np.full(8, 1 / 8), dc, rec.value_ladder, 0)


@given(st.lists(st.floats(0, 1), min_size=64, max_size=64))
@settings(max_examples=40, deadline=None)
def test_top_k_monotone_in_k(weights):
    w = np.array(weights) + 1e-3
    dist = w / w.sum()
    g = graph_corpus(4)[2]
    poly = build_maxpd(g)[0]
    dc, rec = precompute_diagonal(poly), brute_force_polynomial(poly)
    dist = np.resize(dist, dc.costs.size)
    dist /= dist.sum()
    tops = [summed_top_k_probability(dist, dc, rec.value_ladder, k) for k in range(1, len(rec.value_ladder) + 1)]
    assert all(a <= b + 1e-15 for a, b in zip(tops, tops[1:]))
    assert tops[-1] == pytest.approx(1.0)


@pytest.mark.parametrize("e, opt, expected", [(-1.5, 2, 0.75), (-2, 2, 1.0), (-7 / 8, 2, 0.4375), (3, -4, 0.75)])
def test_approximation_ratio(e, opt, expected):
    assert approximation_ratio(e, opt) == pytest.approx(expected)


def test_approximation_ratio_zero_optimum():
    with pytest.raises(ContractError):
        approximation_ratio(-1, 0)


def test_compute_metrics_uniform(p3_setup):
    dc, rec = p3_setup
    r = compute_metrics(np.full(8, 1 / 8), dc, rec.best_value, rec.value_ladder)
    assert r.p_opt == pytest.approx(0.125) and r.p_top2 == pytest.approx(0.75) and r.p_top3 == pytest.approx(1)
    assert r.expectation == pytest.approx(-7 / 8)
    assert r.approximation_ratio == pytest.approx(0.4375)


def test_compute_metrics_zero_optimum_is_nan():
    from scoop.qaoa import DiagonalCost

    dc = DiagonalCost(np.array([0.0, 1.0]))
    r = compute_metrics(np.array([0.5, 0.5]), dc, 0.0, (0.0, 1.0))
    assert math.isnan(r.approximation_ratio)


def test_aggregate():
    r = MetricsReport(0.2, 0.5, 0.7, 0.8, -1.0)
    mean, std = aggregate([r])
    assert mean == r and std == MetricsReport(0, 0, 0, 0, 0)
    a = MetricsReport(0.2, 0.3, 0.4, 0.5, -1.0)
    b = MetricsReport(0.4, 0.5, 0.6, 0.7, -2.0)
    assert aggregate([a, b])[0].p_opt == pytest.approx(0.3)
    assert type(aggregate([a, b])[1].p_opt) is float
    assert aggregate([a, b]) == aggregate([b, a])
    with pytest.raises(ParameterError):
        aggregate([])


def test_constrained_diagonal(p3, sc3):
    cdc = constrained_diagonal("maxpd", p3)
    for i in range(8):
        expected = sum(index_to_bits(i, 3)) if i in (0b010, 0b101, 0b011, 0b110, 0b111) else math.inf
        assert cdc.values[i] == expected
    full = constrained_diagonal("minsc", sc3, n_vars=build_minsc_penalty(sc3).num_vars)
    assert full.costs.size == 2**8
    assert full.values[0b011] == 2 and full.values[0b1000_0011] == 2 and math.isinf(full.values[0b1000_0001])
    with pytest.raises(ParameterError):
        constrained_diagonal("maxpd", sc3)


@pytest.mark.parametrize("problem", ["maxpd", "maxpes"])
def test_postprocessing_dominance(problem):
    rng = np.random.default_rng(1)
    for g in graph_corpus(8):
        poly = (build_maxpd if problem == "maxpd" else build_maxpes)(g)[0]
        if poly.num_vars > 12:
            continue
        dc = precompute_diagonal(poly)
        cdc = constrained_diagonal(problem, g)
        ladder = exact_constrained(problem, g).value_ladder
        mapping = enhancement_map(poly.num_vars, enhancer_for(problem, g))
        for _ in range(3):
            dist = rng.dirichlet(np.ones(dc.costs.size) * 0.3)
            pp = postprocess_distribution(dist, None, mapping=mapping)
            for k in (1, 2, 3):
                assert summed_top_k_probability(pp, cdc, ladder, k) >= summed_top_k_probability(dist, cdc, ladder, k) - 1e-12
            # enhanced objective never exceeds offset - profit
            offset = g.n_vertices if problem == "maxpd" else g.n_edges
            assert np.all(cdc.values[mapping] <= offset - dc.values + 1e-9)
