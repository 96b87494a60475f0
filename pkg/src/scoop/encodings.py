"""Cost polynomials for the profit twins and their penalty baselines.

Profit twins (``maxpd``, ``maxpes``, ``maxpsc``) are penalty-free and come
back with maximize sense together with an :class:`ObjectiveLink`; a feasible
selection of size ``k`` has profit ``offset - k``. The penalty baselines
(``minds``, ``m3``, ``minsc``) are minimize-sense and need a
:class:`PenaltyConfig`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

from .errors import ParameterError
from .instances import Graph, SetCoverInstance, edge_neighbors, neighbors
from .pbpoly import MAXIMIZE, MINIMIZE, BinaryPolynomial, expand_product_of_complements

TWINS = ("maxpd", "maxpes", "maxpsc")
PENALTY_BASELINES = ("minds", "m3", "minsc")
PROBLEMS = TWINS + PENALTY_BASELINES

#: constrained problem solved through each profit twin, and vice versa
TWIN_OF = {"maxpd": "minds", "maxpes": "m3", "maxpsc": "minsc"}
PROFIT_TWIN_OF = {v: k for k, v in TWIN_OF.items()}


@dataclass(frozen=True)
class ObjectiveLink:
    """Affine map ``f(profit) = offset - profit`` between twin objectives."""

    offset: int

    def __call__(self, value: int) -> int:
        return self.offset - value


@dataclass(frozen=True)
class PenaltyConfig:
    A: float = 3.0
    B: float = 2.0
    C: float = 1.0


def objective_from_profit(link: ObjectiveLink, profit: int) -> int:
    return link.offset - profit


def m3_default_penalties(g: Graph) -> PenaltyConfig:
    """``B = 2(|E|+1)``, ``C = 1`` and ``A = max(1, maxdeg-1) * B``.

    With ``y_v`` replaced by an edge count, a vertex matched ``k >= 2`` times
    makes each maximality term towards an unmatched neighbour negative, by
    ``k - 1``. Those savings are at most ``(maxdeg-2)`` times the matching
    penalty, so this ``A`` keeps every non-matching above ``B > C*|E|``, which
    exceeds the energy of any maximal matching.
    """
    big = 2.0 * (g.n_edges + 1)
    max_deg = max(g.degree(v) for v in range(g.n_vertices))
    return PenaltyConfig(A=max(1, max_deg - 1) * big, B=big, C=1.0)


def _require_a_gt_b(pc: PenaltyConfig):
    if not pc.A > pc.B > 0:
        raise ParameterError(f"penalties need A > B > 0, got A={pc.A}, B={pc.B}")


def _coverage_sum(num_vars: int, closed_nbhds) -> BinaryPolynomial:
    """Sum over items of ``1 - prod_{j in closed nbhd}(1 - x_j)``: the covered-item count."""
    total = BinaryPolynomial(num_vars)
    for nb in closed_nbhds:
        total = total + (1 - expand_product_of_complements(nb, num_vars))
    return total


def _size(num_vars: int) -> BinaryPolynomial:
    return BinaryPolynomial(num_vars, {(i,): 1.0 for i in range(num_vars)})


def build_maxpd(g: Graph) -> tuple[BinaryPolynomial, ObjectiveLink]:
    """Dominated-vertex count minus selection size, over one variable per vertex."""
    n = g.n_vertices
    closed = [{v} | neighbors(g, v) for v in range(n)]
    poly = _coverage_sum(n, closed) - _size(n)
    return poly.with_sense(MAXIMIZE), ObjectiveLink(n)


def build_minds_penalty(g: Graph, pc: PenaltyConfig = PenaltyConfig()) -> BinaryPolynomial:
    _require_a_gt_b(pc)
    n = g.n_vertices
    undominated = BinaryPolynomial(n)
    for v in range(n):
        undominated = undominated + expand_product_of_complements({v} | neighbors(g, v), n)
    return (pc.A * undominated + pc.B * _size(n)).with_sense(MINIMIZE)


def build_maxpes(g: Graph) -> tuple[BinaryPolynomial, ObjectiveLink]:
    """Covered-edge count minus selection size, over one variable per edge."""
    m = g.n_edges
    closed = [{e} | edge_neighbors(g, e) for e in range(m)]
    poly = _coverage_sum(m, closed) - _size(m)
    return poly.with_sense(MAXIMIZE), ObjectiveLink(m)


def build_m3_penalty(g: Graph, pc: Optional[PenaltyConfig] = None) -> BinaryPolynomial:
    """Matching, maximality and size terms over edge variables only.

    The vertex indicator ``y_v`` is replaced by ``sum_{e at v} x_e``, which
    equals the indicator whenever the matching term vanishes.
    """
    pc = pc or m3_default_penalties(g)
    if min(pc.A, pc.B, pc.C) <= 0:
        raise ParameterError(f"M3 penalties must be positive, got {pc}")
    m = g.n_edges
    x = [BinaryPolynomial.variable(e, m) for e in range(m)]
    y = [sum((x[e] for e in g.incident_edges[v]), BinaryPolynomial(m)) for v in range(g.n_vertices)]
    h_a = BinaryPolynomial(m)
    for inc in g.incident_edges:
        for e1, e2 in itertools.combinations(inc, 2):
            h_a = h_a + x[e1] * x[e2]
    h_b = BinaryPolynomial(m)
    for u, v in g.edges:
        h_b = h_b + (1 - y[u]) * (1 - y[v])
    return (pc.A * h_a + pc.B * h_b + pc.C * _size(m)).with_sense(MINIMIZE)


def build_maxpsc(sc: SetCoverInstance) -> tuple[BinaryPolynomial, ObjectiveLink]:
    """Covered-element count minus number of chosen subsets.

    Membership indicators are instance constants, so each element's product
    only runs over the subsets that contain it.
    """
    m = sc.n_subsets
    poly = _coverage_sum(m, sc.containing) - _size(m)
    return poly.with_sense(MAXIMIZE), ObjectiveLink(sc.universe_size)


def minsc_layout(sc: SetCoverInstance) -> list[list[int]]:
    """Variable indices of the counting bits ``x_{a,1..N(a)}`` for each element ``a``.

    Subset variables occupy ``0..m-1``; counting bits follow, grouped by element.
    """
    out, nxt = [], sc.n_subsets
    for holders in sc.containing:
        out.append(list(range(nxt, nxt + len(holders))))
        nxt += len(holders)
    return out


def build_minsc_penalty(sc: SetCoverInstance, pc: PenaltyConfig = PenaltyConfig()) -> BinaryPolynomial:
    _require_a_gt_b(pc)
    m = sc.n_subsets
    layout = minsc_layout(sc)
    nv = m + sum(len(b) for b in layout)
    var = lambda i: BinaryPolynomial.variable(i, nv)  # noqa: E731
    zero = BinaryPolynomial(nv)
    one_hot = zero
    count = zero
    for alpha, bits in enumerate(layout):
        picked = sum((var(b) for b in bits), zero)
        one_hot = one_hot + (1 - picked) * (1 - picked)
        counted = sum((k * var(b) for k, b in enumerate(bits, 1)), zero)
        chosen = sum((var(i) for i in sc.containing[alpha]), zero)
        diff = counted - chosen
        count = count + diff * diff
    size = sum((var(i) for i in range(m)), zero)
    return (pc.A * one_hot + pc.A * count + pc.B * size).with_sense(MINIMIZE)


def build_hamiltonian(
    problem: str,
    inst: Union[Graph, SetCoverInstance],
    pc: Optional[PenaltyConfig] = None,
) -> tuple[BinaryPolynomial, Optional[ObjectiveLink]]:
    """Dispatch by problem id; the link is ``None`` for penalty baselines."""
    graph_problems = ("maxpd", "minds", "maxpes", "m3")
    if problem not in PROBLEMS:
        raise ParameterError(f"unknown problem {problem!r}; choose from {PROBLEMS}")
    if problem in graph_problems and not isinstance(inst, Graph):
        raise ParameterError(f"{problem} needs a graph instance")
    if problem not in graph_problems and not isinstance(inst, SetCoverInstance):
        raise ParameterError(f"{problem} needs a set-cover instance")
    if problem == "maxpd":
        return build_maxpd(inst)
    if problem == "maxpes":
        return build_maxpes(inst)
    if problem == "maxpsc":
        return build_maxpsc(inst)
    if problem == "minds":
        return build_minds_penalty(inst, pc or PenaltyConfig()), None
    if problem == "m3":
        return build_m3_penalty(inst, pc), None
    return build_minsc_penalty(inst, pc or PenaltyConfig()), None


def resolve_penalties(problem: str, inst, A=None, B=None, C=None) -> Optional[PenaltyConfig]:
    """Problem defaults with any of ``A``, ``B``, ``C`` overridden.

    Returns ``None`` for profit twins, which carry no penalties.
    """
    if problem in TWINS:
        return None
    base = m3_default_penalties(inst) if problem == "m3" else PenaltyConfig()
    return PenaltyConfig(
        base.A if A is None else float(A),
        base.B if B is None else float(B),
        base.C if C is None else float(C),
    )
