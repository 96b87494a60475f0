"""Exhaustive ground-truth solvers.

Assignments are enumerated as basis indices ``0..2**n-1`` where bit ``i`` of
the index is variable ``i``. Everything here is evaluated per term or per
constraint with bitmasks, independently of the simulator's diagonal
construction, so the two can check each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .instances import Graph, SetCoverInstance
from .pbpoly import MAXIMIZE, BinaryPolynomial

#: largest variable count any oracle will enumerate
ENUMERATION_CAP = 20

# values closer than this are the same ladder rung
_DECIMALS = 9


@dataclass(frozen=True)
class OptimumRecord:
    best_value: float
    optimal_selections: list
    value_ladder: tuple

    def to_json(self) -> dict:
        def num(v):
            return int(v) if float(v).is_integer() else float(v)

        return {
            "best_value": num(self.best_value),
            "optimal_selections": ["".join(map(str, s)) for s in self.optimal_selections],
            "value_ladder": [num(v) for v in self.value_ladder],
        }


def _check_cap(n: int, what: str):
    if n > ENUMERATION_CAP:
        raise CapacityError(f"{what} has {n} variables; enumeration cap is {ENUMERATION_CAP}")


def basis_indices(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def index_to_bits(index: int, n: int) -> tuple:
    return tuple((index >> i) & 1 for i in range(n))


def bits_to_index(bits) -> int:
    return sum(1 << i for i, b in enumerate(bits) if b)


def mask_of(indices) -> int:
    return sum(1 << i for i in indices)


def popcount(idx: np.ndarray) -> np.ndarray:
    return np.bitwise_count(idx).astype(np.int64)


def polynomial_values(p: BinaryPolynomial) -> np.ndarray:
    """Value of ``p`` at every assignment, in ``p``'s own orientation."""
    _check_cap(p.num_vars, "polynomial")
    idx = basis_indices(p.num_vars)
    out = np.zeros(idx.size)
    for key, c in p.terms.items():
        m = mask_of(key)
        out += c * ((idx & m) == m)
    return out


def _record(values: np.ndarray, n: int, maximize: bool, feasible=None) -> OptimumRecord:
    vals = np.round(values, _DECIMALS)
    if feasible is not None:
        vals = np.where(feasible, vals, np.nan)
    distinct = np.unique(vals[~np.isnan(vals)])
    ladder = tuple(distinct[::-1] if maximize else distinct)
    best = ladder[0]
    winners = np.flatnonzero(vals == best)
    # enumeration order: popcount first, then numeric
    order = np.lexsort((winners, popcount(winners)))
    return OptimumRecord(float(best), [index_to_bits(int(w), n) for w in winners[order]], tuple(float(v) for v in ladder))


def brute_force_polynomial(p: BinaryPolynomial) -> OptimumRecord:
    return _record(polynomial_values(p), p.num_vars, p.sense == MAXIMIZE)


# -- constraint masks, vectorized over all assignments -------------------


def dominating_mask(g: Graph, idx: np.ndarray) -> np.ndarray:
    ok = np.ones(idx.size, dtype=bool)
    for v in range(g.n_vertices):
        ok &= (idx & mask_of({v} | g.adjacency[v])) != 0
    return ok


def dominated_count(g: Graph, idx: np.ndarray) -> np.ndarray:
    return sum(((idx & mask_of({v} | g.adjacency[v])) != 0).astype(np.int64) for v in range(g.n_vertices))


def matching_mask(g: Graph, idx: np.ndarray) -> np.ndarray:
    ok = np.ones(idx.size, dtype=bool)
    for inc in g.incident_edges:
        ok &= popcount(idx & mask_of(inc)) <= 1
    return ok


def _closed_edge_masks(g: Graph) -> list:
    return [mask_of(g.incident_edges[u]) | mask_of(g.incident_edges[v]) for u, v in g.edges]


def edge_cover_mask(g: Graph, idx: np.ndarray) -> np.ndarray:
    """Selections (as edge subsets) covering every edge of ``g``."""
    ok = np.ones(idx.size, dtype=bool)
    for m in _closed_edge_masks(g):
        ok &= (idx & m) != 0
    return ok


def covered_edge_count(g: Graph, idx: np.ndarray) -> np.ndarray:
    return sum(((idx & m) != 0).astype(np.int64) for m in _closed_edge_masks(g))


def set_cover_mask(sc: SetCoverInstance, idx: np.ndarray) -> np.ndarray:
    ok = np.ones(idx.size, dtype=bool)
    for holders in sc.containing:
        ok &= (idx & mask_of(holders)) != 0
    return ok


def covered_element_count(sc: SetCoverInstance, idx: np.ndarray) -> np.ndarray:
    return sum(((idx & mask_of(h)) != 0).astype(np.int64) for h in sc.containing)


# -- constrained optima ----------------------------------------------------


def exact_min_dominating_set(g: Graph) -> OptimumRecord:
    _check_cap(g.n_vertices, "graph")
    idx = basis_indices(g.n_vertices)
    return _record(popcount(idx).astype(float), g.n_vertices, False, dominating_mask(g, idx))


def exact_min_maximal_matching(g: Graph) -> OptimumRecord:
    _check_cap(g.n_edges, "edge set")
    idx = basis_indices(g.n_edges)
    feasible = matching_mask(g, idx) & edge_cover_mask(g, idx)
    return _record(popcount(idx).astype(float), g.n_edges, False, feasible)


def exact_min_set_cover(sc: SetCoverInstance) -> OptimumRecord:
    _check_cap(sc.n_subsets, "family")
    idx = basis_indices(sc.n_subsets)
    return _record(popcount(idx).astype(float), sc.n_subsets, False, set_cover_mask(sc, idx))


def exact_constrained(problem: str, inst) -> OptimumRecord:
    """Constrained optimum for a problem id or its profit twin."""
    from .encodings import TWIN_OF

    constrained = TWIN_OF.get(problem, problem)
    solver = {"minds": exact_min_dominating_set, "m3": exact_min_maximal_matching, "minsc": exact_min_set_cover}
    return solver[constrained](inst)
