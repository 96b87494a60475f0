"""Dense statevector simulation of vanilla QAOA.

The cost layer is a diagonal phase ``exp(-i*gamma*C)`` and the mixer applies
``exp(-i*beta*X)`` to every qubit. Basis index bit ``i`` is qubit ``i``.
Statevectors are plain complex numpy arrays of length ``2**n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import NamedTuple, Sequence

import numba
import numpy as np

from .errors import CapacityError, ParameterError
from .pbpoly import MAXIMIZE, MINIMIZE, BinaryPolynomial, negate_sense

QUBIT_CAP = 24


@dataclass(frozen=True, eq=False)
class DiagonalCost:
    """Per-basis-state cost in minimize orientation.

    ``sense`` records the orientation of the source polynomial so that
    :attr:`values` can report e.g. profits rather than negated profits.
    """

    costs: np.ndarray
    sense: str = MINIMIZE

    def __post_init__(self):
        n = int(self.costs.size).bit_length() - 1
        if self.costs.ndim != 1 or self.costs.size != 1 << n:
            raise ParameterError(f"diagonal length {self.costs.size} is not a power of two")

    @property
    def n_qubits(self) -> int:
        return int(self.costs.size).bit_length() - 1

    @property
    def values(self) -> np.ndarray:
        return -self.costs if self.sense == MAXIMIZE else self.costs

    @cached_property
    def _levels(self) -> tuple[np.ndarray, np.ndarray]:
        return np.unique(self.costs, return_inverse=True)

    def phase(self, gamma: float) -> np.ndarray:
        """``exp(-i*gamma*costs)``, evaluated once per distinct cost level."""
        levels, inverse = self._levels
        return np.exp(-1j * gamma * levels)[inverse]


@dataclass(frozen=True)
class QaoaParams:
    gammas: tuple
    betas: tuple

    def __post_init__(self):
        if len(self.gammas) != len(self.betas) or not self.gammas:
            raise ParameterError("need p >= 1 and as many betas as gammas")
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))

    @property
    def p(self) -> int:
        return len(self.gammas)

    @classmethod
    def from_vector(cls, theta: Sequence[float]) -> "QaoaParams":
        p = len(theta) // 2
        return cls(tuple(theta[:p]), tuple(theta[p:]))

    def to_vector(self) -> np.ndarray:
        return np.array(self.gammas + self.betas)


@dataclass(frozen=True)
class OptimizerConfig:
    steps: int = 400
    learning_rate: float = 0.01
    decay: float = 0.9
    epsilon: float = 1e-8
    init_seed: int = 0
    gradient_step: float = 1e-4
    gradient: str = "adjoint"

    def __post_init__(self):
        if self.steps < 1:
            raise ParameterError("steps must be >= 1")
        if self.learning_rate <= 0:
            raise ParameterError("learning_rate must be positive")
        if not 0 < self.decay < 1:
            raise ParameterError("decay must lie in (0, 1)")
        if self.gradient not in ("adjoint", "finite-difference"):
            raise ParameterError(f"unknown gradient method {self.gradient!r}")


class OptimizeResult(NamedTuple):
    params: QaoaParams
    trace: np.ndarray


def _n_qubits(sv: np.ndarray) -> int:
    n = int(sv.size).bit_length() - 1
    if sv.size != 1 << n:
        raise ParameterError(f"state length {sv.size} is not a power of two")
    return n


def precompute_diagonal(p: BinaryPolynomial, cap: int = QUBIT_CAP) -> DiagonalCost:
    """Evaluate ``p`` (negated if maximize) on every basis state.

    Coefficients are scattered onto their monomial masks and summed over
    submasks, one bit at a time.
    """
    n = p.num_vars
    if n > cap:
        raise CapacityError(f"{n} qubits exceed the simulator cap of {cap}")
    q = negate_sense(p) if p.sense == MAXIMIZE else p
    acc = np.zeros(1 << n)
    for key, c in q.terms.items():
        acc[sum(1 << i for i in key)] += c
    for i in range(n):
        v = acc.reshape(-1, 2, 1 << i)
        v[:, 1, :] += v[:, 0, :]
    return DiagonalCost(acc, p.sense)


def init_plus_state(n: int) -> np.ndarray:
    if n < 1:
        raise ParameterError("need at least one qubit")
    return np.full(1 << n, 2 ** (-n / 2), dtype=complex)


@numba.njit(cache=True)
def _fwht(x):
    """Unnormalized in-place Walsh-Hadamard transform, two bits per pass."""
    size = x.size
    h = 1
    while 4 * h <= size:
        for blk in range(0, size, 4 * h):
            for j in range(blk, blk + h):
                a = x[j]
                b = x[j + h]
                c = x[j + 2 * h]
                d = x[j + 3 * h]
                s0 = a + b
                s1 = a - b
                s2 = c + d
                s3 = c - d
                x[j] = s0 + s2
                x[j + h] = s1 + s3
                x[j + 2 * h] = s0 - s2
                x[j + 3 * h] = s1 - s3
        h *= 4
    if h < size:
        for j in range(h):
            a = x[j]
            b = x[j + h]
            x[j] = a + b
            x[j + h] = a - b


@lru_cache(maxsize=None)
def _x_eigenvalues(n: int) -> np.ndarray:
    """Eigenvalue ``n - 2*popcount(b)`` of ``sum_i X_i`` on Hadamard basis state ``b``."""
    return n - 2 * np.bitwise_count(np.arange(1 << n)).astype(np.int64)


def _to_hadamard(sv: np.ndarray) -> np.ndarray:
    out = sv.copy()
    _fwht(out)
    out *= 2 ** (-_n_qubits(sv) / 2)
    return out


_from_hadamard = _to_hadamard


def _mixer_phase(n: int, beta: float) -> np.ndarray:
    table = np.exp(-1j * beta * np.arange(-n, n + 1))
    return table[_x_eigenvalues(n) + n]


def apply_cost_layer(sv: np.ndarray, dc: DiagonalCost, gamma: float) -> np.ndarray:
    if sv.size != dc.costs.size:
        raise ParameterError(f"state has {sv.size} amplitudes, diagonal has {dc.costs.size}")
    return sv * dc.phase(gamma)


def apply_mixer_layer(sv: np.ndarray, beta: float) -> np.ndarray:
    """``exp(-i*beta*X)`` on every qubit, applied as a phase in the Hadamard basis."""
    n = _n_qubits(sv)
    return _from_hadamard(_to_hadamard(sv) * _mixer_phase(n, beta))


def apply_x_sum(sv: np.ndarray) -> np.ndarray:
    """``(sum_i X_i) |sv>``, the mixer generator."""
    n = _n_qubits(sv)
    return _from_hadamard(_to_hadamard(sv) * _x_eigenvalues(n))


def run_circuit(dc: DiagonalCost, params: QaoaParams) -> np.ndarray:
    sv = init_plus_state(dc.n_qubits)
    for gamma, beta in zip(params.gammas, params.betas):
        sv = apply_mixer_layer(apply_cost_layer(sv, dc, gamma), beta)
    return sv


def expectation(sv: np.ndarray, dc: DiagonalCost) -> float:
    if sv.size != dc.costs.size:
        raise ParameterError(f"state has {sv.size} amplitudes, diagonal has {dc.costs.size}")
    return float(np.dot(np.abs(sv) ** 2, dc.costs))


def probabilities(sv: np.ndarray) -> np.ndarray:
    return np.abs(sv) ** 2


def value_and_gradient(dc: DiagonalCost, params: QaoaParams) -> tuple[float, np.ndarray]:
    """Expectation and its gradient, ordered as ``gammas + betas``.

    Reverse pass: ``lam = U_rest^dagger C psi`` is carried backwards and each
    angle's derivative is ``2 Im <lam| G psi>`` for its generator ``G``,
    evaluated right after the layer. The mixer generator is diagonal in the
    Hadamard basis, where the forward pass already holds the state.
    """
    n, p = dc.n_qubits, params.p
    z = _x_eigenvalues(n)
    cost_phases, mix_phases, after_cost, after_mix_h = [], [], [], []
    psi = init_plus_state(n)
    for gamma, beta in zip(params.gammas, params.betas):
        cph = dc.phase(gamma)
        mph = _mixer_phase(n, beta)
        psi = psi * cph
        after_cost.append(psi)
        chi = _to_hadamard(psi) * mph
        after_mix_h.append(chi)
        psi = _from_hadamard(chi)
        cost_phases.append(cph)
        mix_phases.append(mph)
    lam = dc.costs * psi
    value = float(np.vdot(psi, lam).real)
    grad = np.zeros(2 * p)
    for k in reversed(range(p)):
        mu = _to_hadamard(lam)
        grad[p + k] = 2.0 * np.vdot(mu, z * after_mix_h[k]).imag
        lam = _from_hadamard(mu * mix_phases[k].conj())
        grad[k] = 2.0 * np.vdot(lam, dc.costs * after_cost[k]).imag
        lam = lam * cost_phases[k].conj()
    return value, grad


def gradient(dc: DiagonalCost, params: QaoaParams) -> np.ndarray:
    return value_and_gradient(dc, params)[1]


def finite_difference_gradient(dc: DiagonalCost, params: QaoaParams, step: float = 1e-4) -> np.ndarray:
    """Central differences of the expectation in every angle."""
    theta = params.to_vector()
    grad = np.empty_like(theta)
    for j in range(theta.size):
        up, down = theta.copy(), theta.copy()
        up[j] += step
        down[j] -= step
        e_up = expectation(run_circuit(dc, QaoaParams.from_vector(up)), dc)
        e_down = expectation(run_circuit(dc, QaoaParams.from_vector(down)), dc)
        grad[j] = (e_up - e_down) / (2 * step)
    return grad


def initial_params(p: int, seed: int) -> QaoaParams:
    """Angles drawn uniformly from ``[0, 0.1)``; gammas first, then betas."""
    return QaoaParams.from_vector(np.random.default_rng(seed).uniform(0.0, 0.1, 2 * p))


def optimize(dc: DiagonalCost, p: int, cfg: OptimizerConfig = OptimizerConfig()) -> OptimizeResult:
    """RMSProp on the expectation; returns the best angles seen and the full trace.

    The trace has ``cfg.steps + 1`` entries: the expectation before every
    update and after the last one.
    """
    if p < 1:
        raise ParameterError("need at least one layer")
    theta = initial_params(p, cfg.init_seed).to_vector()
    sq_avg = np.zeros_like(theta)
    trace = []
    best_val, best_theta = np.inf, theta.copy()
    for _ in range(cfg.steps):
        params = QaoaParams.from_vector(theta)
        if cfg.gradient == "adjoint":
            val, g = value_and_gradient(dc, params)
        else:
            val = expectation(run_circuit(dc, params), dc)
            g = finite_difference_gradient(dc, params, cfg.gradient_step)
        trace.append(val)
        if val < best_val:
            best_val, best_theta = val, theta.copy()
        sq_avg = cfg.decay * sq_avg + (1 - cfg.decay) * g**2
        theta = theta - cfg.learning_rate * g / np.sqrt(sq_avg + cfg.epsilon)
    val = expectation(run_circuit(dc, QaoaParams.from_vector(theta)), dc)
    trace.append(val)
    if val < best_val:
        best_theta = theta.copy()
    return OptimizeResult(QaoaParams.from_vector(best_theta), np.array(trace))
