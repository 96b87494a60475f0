"""Feasibility checks and the enhancement algorithms that map twin solutions
into the constrained feasible space without lowering their profit.

Selections are 0/1 sequences indexed by vertex, edge or family member.
Every loop visits candidates in ascending index order so results are
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ContractError, ParameterError
from .instances import Graph, SetCoverInstance, edge_neighbors, neighbors
from .oracles import bits_to_index, index_to_bits


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    violated: list = field(default_factory=list)
    witness: Optional[int] = None

    def __bool__(self):
        return self.feasible


def _check_len(sel: Sequence[int], n: int, what: str):
    if len(sel) != n:
        raise ParameterError(f"selection has length {len(sel)}, expected {n} ({what})")


def _chosen(sel: Sequence[int]) -> set:
    return {i for i, b in enumerate(sel) if b}


def _bits(chosen: set, n: int) -> tuple:
    return tuple(1 if i in chosen else 0 for i in range(n))


# -- dominating sets -------------------------------------------------------


def _undominated(g: Graph, chosen: set) -> list:
    return [v for v in range(g.n_vertices) if v not in chosen and not (neighbors(g, v) & chosen)]


def is_dominating_set(g: Graph, s: Sequence[int]) -> FeasibilityReport:
    _check_len(s, g.n_vertices, "vertices")
    bad = _undominated(g, _chosen(s))
    if bad:
        return FeasibilityReport(False, ["domination"], bad[0])
    return FeasibilityReport(True)


def pd_profit(g: Graph, s: Sequence[int]) -> int:
    """Dominated vertices minus selected vertices."""
    _check_len(s, g.n_vertices, "vertices")
    chosen = _chosen(s)
    return g.n_vertices - len(_undominated(g, chosen)) - len(chosen)


def enhance_pd_to_ds(g: Graph, s: Sequence[int]) -> tuple:
    """Add initially undominated vertices until every vertex is dominated.

    A vertex is re-checked right before it would be added and skipped if an
    earlier addition already dominates it, so each addition gains at least
    as much as it costs.
    """
    _check_len(s, g.n_vertices, "vertices")
    chosen = _chosen(s)
    for v in _undominated(g, chosen):
        if v not in chosen and not (neighbors(g, v) & chosen):
            chosen.add(v)
    return _bits(chosen, g.n_vertices)


# -- edge sets and matchings ----------------------------------------------


def _covers(g: Graph, chosen: set) -> list:
    """Edges not covered by ``chosen``."""
    return [e for e in range(g.n_edges) if e not in chosen and not (edge_neighbors(g, e) & chosen)]


def covers_all_edges(g: Graph, m: Sequence[int]) -> FeasibilityReport:
    _check_len(m, g.n_edges, "edges")
    bad = _covers(g, _chosen(m))
    if bad:
        return FeasibilityReport(False, ["edge cover"], bad[0])
    return FeasibilityReport(True)


def is_matching(g: Graph, m: Sequence[int]) -> FeasibilityReport:
    _check_len(m, g.n_edges, "edges")
    chosen = _chosen(m)
    for v, inc in enumerate(g.incident_edges):
        if len(chosen.intersection(inc)) > 1:
            return FeasibilityReport(False, ["matching"], v)
    return FeasibilityReport(True)


def is_maximal_matching(g: Graph, m: Sequence[int]) -> FeasibilityReport:
    """Witness is a shared vertex for a matching violation, else an addable edge."""
    rep = is_matching(g, m)
    if not rep:
        return rep
    addable = _covers(g, _chosen(m))
    if addable:
        return FeasibilityReport(False, ["maximality"], addable[0])
    return FeasibilityReport(True)


def pes_profit(g: Graph, m: Sequence[int]) -> int:
    """Covered edges minus selected edges."""
    _check_len(m, g.n_edges, "edges")
    chosen = _chosen(m)
    return g.n_edges - len(_covers(g, chosen)) - len(chosen)


def enhance_pes_to_maximal(g: Graph, m: Sequence[int]) -> tuple:
    """Add initially uncovered edges (skipping ones covered meanwhile) until all edges are covered."""
    _check_len(m, g.n_edges, "edges")
    chosen = _chosen(m)
    for e in _covers(g, chosen):
        if e not in chosen and not (edge_neighbors(g, e) & chosen):
            chosen.add(e)
    return _bits(chosen, g.n_edges)


def _first_adjacent_pair(g: Graph, chosen: set):
    ordered = sorted(chosen)
    for i, a in enumerate(ordered):
        for b in ordered[i + 1:]:
            if b in edge_neighbors(g, a):
                return a, b
    return None


def maximal_pes_to_matching(g: Graph, m: Sequence[int]) -> tuple:
    """Turn an edge set covering every edge into a maximal matching no larger than it.

    For the first adjacent pair ``a=(u,v), b=(v,w)``: drop ``a`` if the rest
    still covers everything, else drop ``b`` if that works, else swap ``b``
    for an edge ``(w,z)`` that only ``b`` covers. The scan restarts after
    every change. Each change removes an edge or removes at least one
    adjacent pair, so the loop terminates.
    """
    _check_len(m, g.n_edges, "edges")
    chosen = _chosen(m)
    if _covers(g, chosen):
        raise ContractError("input edge set does not cover every edge")
    while (pair := _first_adjacent_pair(g, chosen)) is not None:
        a, b = pair
        if not _covers(g, chosen - {a}):
            chosen.discard(a)
            continue
        if not _covers(g, chosen - {b}):
            chosen.discard(b)
            continue
        v = (set(g.edges[a]) & set(g.edges[b])).pop()
        w = g.edges[b][0] if g.edges[b][1] == v else g.edges[b][1]
        swap = [
            f for f in g.incident_edges[w]
            if f != b and v not in g.edges[f] and ({f} | edge_neighbors(g, f)) & chosen == {b}
        ]
        if not swap:
            raise ContractError(f"no edge at vertex {w} is covered only by edge {g.edges[b]}")
        chosen.discard(b)
        chosen.add(swap[0])
    return _bits(chosen, g.n_edges)


def enhance_pes_to_matching(g: Graph, m: Sequence[int]) -> tuple:
    """Both steps: cover every edge, then reduce to a maximal matching."""
    return maximal_pes_to_matching(g, enhance_pes_to_maximal(g, m))


# -- set cover -------------------------------------------------------------


def _uncovered(sc: SetCoverInstance, chosen: set) -> list:
    return [a for a, holders in enumerate(sc.containing) if not chosen.intersection(holders)]


def is_set_cover(sc: SetCoverInstance, y: Sequence[int]) -> FeasibilityReport:
    _check_len(y, sc.n_subsets, "family")
    bad = _uncovered(sc, _chosen(y))
    if bad:
        return FeasibilityReport(False, ["set cover"], bad[0])
    return FeasibilityReport(True)


def psc_profit(sc: SetCoverInstance, y: Sequence[int]) -> int:
    """Covered elements minus chosen subsets."""
    _check_len(y, sc.n_subsets, "family")
    chosen = _chosen(y)
    return sc.universe_size - len(_uncovered(sc, chosen)) - len(chosen)


def enhance_psc_to_cover(sc: SetCoverInstance, y: Sequence[int]) -> tuple:
    """For each uncovered element, add the lowest-indexed subset holding it.

    Coverage is refreshed after each addition so no subset is added for an
    element that is already covered.
    """
    _check_len(y, sc.n_subsets, "family")
    chosen = _chosen(y)
    for a in _uncovered(sc, chosen):
        if not chosen.intersection(sc.containing[a]):
            chosen.add(sc.containing[a][0])
    return _bits(chosen, sc.n_subsets)


# -- distributions ----------------------------------------------------------


def enhancement_map(n_vars: int, enhancer: Callable, decoder: Callable = None, encoder: Callable = None) -> np.ndarray:
    """Basis index each basis index is sent to by ``enhancer``."""
    decoder = decoder or (lambda i: index_to_bits(i, n_vars))
    encoder = encoder or bits_to_index
    return np.array([encoder(enhancer(decoder(i))) for i in range(1 << n_vars)], dtype=np.int64)


def postprocess_distribution(dist: np.ndarray, enhancer: Callable, decoder: Callable = None, encoder: Callable = None, *, mapping: np.ndarray = None) -> np.ndarray:
    """Move each basis state's probability onto its enhanced state.

    ``mapping`` may carry a precomputed :func:`enhancement_map` when the same
    instance is post-processed repeatedly.
    """
    dist = np.asarray(dist, dtype=float)
    n = int(dist.size).bit_length() - 1
    if mapping is None:
        mapping = enhancement_map(n, enhancer, decoder, encoder)
    return np.bincount(mapping, weights=dist, minlength=dist.size)


def enhancer_for(problem: str, inst) -> Callable:
    """Selection -> feasible selection for a profit twin."""
    table = {
        "maxpd": enhance_pd_to_ds,
        "maxpes": enhance_pes_to_matching,
        "maxpsc": enhance_psc_to_cover,
    }
    if problem not in table:
        raise ParameterError(f"no enhancer for problem {problem!r}")
    fn = table[problem]
    return lambda sel: fn(inst, sel)


def feasibility_for(problem: str, inst) -> Callable:
    """Selection -> FeasibilityReport for the constrained problem behind ``problem``."""
    from .encodings import TWIN_OF

    constrained = TWIN_OF.get(problem, problem)
    table = {"minds": is_dominating_set, "m3": is_maximal_matching, "minsc": is_set_cover}
    fn = table[constrained]
    return lambda sel: fn(inst, sel)
