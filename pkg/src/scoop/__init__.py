"""Constrained graph problems, their unconstrained profit twins, and a
statevector QAOA pipeline to compare the two encodings."""

from .errors import CapacityError, ContractError, GenerationError, ParameterError, ParseError, ScoopError
from .instances import Graph, SetCoverInstance, parse_instance, serialize_instance
from .pbpoly import BinaryPolynomial, IsingPolynomial, binary_to_ising, locality_stats
from .encodings import PenaltyConfig, build_hamiltonian
from .qaoa import DiagonalCost, OptimizerConfig, QaoaParams, optimize, precompute_diagonal, run_circuit
from .metrics import MetricsReport, compute_metrics

__version__ = "0.1.0"

__all__ = [
    "BinaryPolynomial", "CapacityError", "ContractError", "DiagonalCost", "GenerationError", "Graph",
    "IsingPolynomial", "MetricsReport", "OptimizerConfig", "ParameterError", "ParseError", "PenaltyConfig",
    "QaoaParams", "ScoopError", "SetCoverInstance", "binary_to_ising", "build_hamiltonian", "compute_metrics",
    "locality_stats", "optimize", "parse_instance", "precompute_diagonal", "run_circuit", "serialize_instance",
]
