import math
from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scoop.encodings import build_maxpd
from scoop.errors import CapacityError, ParameterError
from scoop.instances import random_regular_graph
from scoop.oracles import polynomial_values
from scoop.pbpoly import MAXIMIZE, BinaryPolynomial, negate_sense
from scoop.qaoa import (
    DiagonalCost,
    OptimizerConfig,
    QaoaParams,
    apply_cost_layer,
    apply_mixer_layer,
    apply_x_sum,
    expectation,
    finite_difference_gradient,
    gradient,
    init_plus_state,
    initial_params,
    optimize,
    precompute_diagonal,
    probabilities,
    run_circuit,
    value_and_gradient,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def dense_mixer(n, beta):
    """exp(-i*beta*X) on every qubit as an explicit Kronecker product."""
    rot = math.cos(beta) * I2 - 1j * math.sin(beta) * X
    return reduce(np.kron, [rot] * n)


def random_state(n, rng):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


@pytest.fixture
def p3_diag(p3):
    return precompute_diagonal(build_maxpd(p3)[0])


def test_p3_maxpd_diagonal(p3_diag):
    assert p3_diag.costs.tolist() == [-v for v in (0, 1, 2, 1, 1, 1, 1, 0)]
    assert p3_diag.values.tolist() == [0, 1, 2, 1, 1, 1, 1, 0]


def test_constant_and_single_variable_diagonals():
    assert precompute_diagonal(BinaryPolynomial.constant(5, 3)).costs.tolist() == [5] * 8
    assert precompute_diagonal(BinaryPolynomial.variable(0, 1)).costs.tolist() == [0, 1]


@pytest.mark.parametrize("seed", range(5))
def test_diagonal_matches_term_evaluation(seed):
    rng = np.random.default_rng(seed)
    n = 7
    terms = {tuple(sorted(rng.choice(n, size=rng.integers(0, 5), replace=False).tolist())): float(rng.integers(-5, 6)) for _ in range(15)}
    p = BinaryPolynomial(n, terms, MAXIMIZE)
    np.testing.assert_array_equal(precompute_diagonal(p).costs, polynomial_values(negate_sense(p)))


def test_qubit_cap():
    with pytest.raises(CapacityError):
        precompute_diagonal(BinaryPolynomial(25, {(0,): 1}))
    with pytest.raises(CapacityError):
        precompute_diagonal(BinaryPolynomial(6, {(0,): 1}), cap=5)


def test_diagonal_cost_length_check():
    with pytest.raises(ParameterError):
        DiagonalCost(np.zeros(6))


def test_init_plus_state():
    np.testing.assert_allclose(init_plus_state(1), [2**-0.5, 2**-0.5])
    sv = init_plus_state(3)
    assert np.isclose(np.linalg.norm(sv), 1)
    np.testing.assert_allclose(probabilities(sv), np.full(8, 1 / 8))
    with pytest.raises(ParameterError):
        init_plus_state(0)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
@pytest.mark.parametrize("beta", [0.0, 0.3, -1.1, math.pi / 2, 2.5])
def test_mixer_matches_dense_product(n, beta):
    sv = random_state(n, np.random.default_rng(n))
    np.testing.assert_allclose(apply_mixer_layer(sv, beta), dense_mixer(n, beta) @ sv, atol=1e-12)


def test_mixer_quarter_turn_flips_bit():
    out = apply_mixer_layer(np.array([1, 0], dtype=complex), math.pi / 2)
    np.testing.assert_allclose(out, [0, -1j], atol=1e-15)
    out = apply_mixer_layer(np.eye(16, dtype=complex)[0], math.pi / 2)
    assert np.isclose(probabilities(out)[15], 1.0)


def test_mixer_half_turn_is_identity_up_to_phase():
    sv = random_state(4, np.random.default_rng(0))
    np.testing.assert_allclose(probabilities(apply_mixer_layer(sv, math.pi)), probabilities(sv), atol=1e-12)


def test_x_sum_matches_dense():
    n = 4
    sv = random_state(n, np.random.default_rng(1))
    dense = sum(reduce(np.kron, [X if j == i else I2 for j in range(n)]) for i in range(n))
    np.testing.assert_allclose(apply_x_sum(sv), dense @ sv, atol=1e-12)


@given(st.integers(1, 8), st.floats(-4, 4), st.floats(-4, 4), st.integers(0, 2**31))
@settings(max_examples=60, deadline=None)
def test_layers_preserve_norm(n, gamma, beta, seed):
    rng = np.random.default_rng(seed)
    sv = random_state(n, rng)
    dc = DiagonalCost(rng.integers(-5, 6, size=1 << n).astype(float))
    after_cost = apply_cost_layer(sv, dc, gamma)
    assert abs(np.linalg.norm(after_cost) - 1) <= 1e-9
    np.testing.assert_allclose(probabilities(after_cost), probabilities(sv), rtol=0, atol=1e-12)
    assert abs(np.linalg.norm(apply_mixer_layer(after_cost, beta)) - 1) <= 1e-9


def test_cost_layer_identity_and_constant_phase():
    sv = random_state(3, np.random.default_rng(2))
    dc = DiagonalCost(np.arange(8.0))
    np.testing.assert_array_equal(apply_cost_layer(sv, dc, 0.0), sv)
    const = DiagonalCost(np.full(8, 2.5))
    out = apply_cost_layer(sv, const, 0.7)
    np.testing.assert_allclose(out / sv, np.full(8, np.exp(-1j * 0.7 * 2.5)))
    with pytest.raises(ParameterError):
        apply_cost_layer(sv, DiagonalCost(np.zeros(4)), 0.1)


def test_run_circuit_zero_angles_is_uniform(p3_diag):
    sv = run_circuit(p3_diag, QaoaParams((0.0,), (0.0,)))
    np.testing.assert_allclose(sv, init_plus_state(3))


def test_uniform_expectation(p3_diag):
    assert math.isclose(expectation(init_plus_state(3), p3_diag), -7 / 8, abs_tol=1e-12)


def test_expectation_of_basis_state(p3_diag):
    e = np.zeros(8, dtype=complex)
    e[2] = 1
    assert expectation(e, p3_diag) == -2
    assert expectation(init_plus_state(2), DiagonalCost(np.full(4, 3.0))) == pytest.approx(3.0)


def test_probabilities_examples():
    np.testing.assert_allclose(probabilities(init_plus_state(2)), [0.25] * 4)
    e = np.zeros(4, dtype=complex)
    e[3] = 1
    assert probabilities(e).tolist() == [0, 0, 0, 1]


def test_params_validation():
    with pytest.raises(ParameterError):
        QaoaParams((0.1,), (0.1, 0.2))
    with pytest.raises(ParameterError):
        QaoaParams((), ())
    p = QaoaParams.from_vector([1, 2, 3, 4])
    assert p.gammas == (1.0, 2.0) and p.betas == (3.0, 4.0) and p.p == 2


@pytest.mark.parametrize("kw", [dict(steps=0), dict(learning_rate=0), dict(decay=1.0), dict(gradient="magic")])
def test_optimizer_config_validation(kw):
    with pytest.raises(ParameterError):
        OptimizerConfig(**kw)


def test_gradient_at_symmetric_point(p3_diag):
    g = gradient(p3_diag, QaoaParams((0.0,), (0.0,)))
    assert abs(g[0]) < 1e-12


def test_gradient_of_constant_cost():
    dc = DiagonalCost(np.full(8, 1.5))
    assert np.allclose(gradient(dc, QaoaParams((0.3, 0.2), (0.1, -0.4))), 0, atol=1e-12)


@pytest.mark.parametrize("p", [1, 2, 3, 5])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_gradient_matches_finite_differences(p3, p, seed):
    rng = np.random.default_rng(seed)
    g = random_regular_graph(6, 3, seed)
    for dc in (precompute_diagonal(build_maxpd(p3)[0]), precompute_diagonal(build_maxpd(g)[0])):
        params = QaoaParams.from_vector(rng.uniform(-1.5, 1.5, 2 * p))
        val, ana = value_and_gradient(dc, params)
        assert val == pytest.approx(expectation(run_circuit(dc, params), dc), abs=1e-12)
        fd = finite_difference_gradient(dc, params, 1e-4)
        np.testing.assert_allclose(ana, fd, rtol=1e-4, atol=1e-7)


def test_initial_params_range_and_determinism():
    a = initial_params(4, 3)
    assert a == initial_params(4, 3)
    v = a.to_vector()
    assert np.all((v >= 0) & (v < 0.1))


def test_optimize_improves_on_uniform(p3_diag):
    res = optimize(p3_diag, 1, OptimizerConfig(steps=400))
    final = expectation(run_circuit(p3_diag, res.params), p3_diag)
    assert final < -7 / 8
    assert probabilities(run_circuit(p3_diag, res.params))[0b010] > 1 / 8
    assert res.trace.size == 401


def test_optimize_returns_best_seen(p3_diag):
    res = optimize(p3_diag, 2, OptimizerConfig(steps=60, learning_rate=0.2))
    best = expectation(run_circuit(p3_diag, res.params), p3_diag)
    assert best == pytest.approx(res.trace.min(), abs=1e-12)
    running = np.minimum.accumulate(res.trace)
    assert np.all(np.diff(running) <= 0)


def test_optimize_constant_cost_trace_is_flat():
    res = optimize(DiagonalCost(np.full(4, 2.0)), 2, OptimizerConfig(steps=20))
    np.testing.assert_allclose(res.trace, 2.0)


def test_optimize_is_deterministic(p3_diag):
    cfg = OptimizerConfig(steps=50, init_seed=4)
    a, b = optimize(p3_diag, 3, cfg), optimize(p3_diag, 3, cfg)
    assert a.params == b.params
    assert a.trace.tobytes() == b.trace.tobytes()


def test_finite_difference_optimizer_agrees(p3_diag):
    a = optimize(p3_diag, 1, OptimizerConfig(steps=30))
    b = optimize(p3_diag, 1, OptimizerConfig(steps=30, gradient="finite-difference"))
    np.testing.assert_allclose(a.trace, b.trace, atol=1e-6)


def test_optimize_rejects_zero_layers(p3_diag):
    with pytest.raises(ParameterError):
        optimize(p3_diag, 0)
