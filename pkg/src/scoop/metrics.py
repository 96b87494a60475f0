"""Evaluation metrics: summed top-k probabilities and approximation ratios."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Sequence

import numpy as np

from .errors import ContractError, ParameterError
from .instances import Graph, SetCoverInstance
from .oracles import (
    basis_indices,
    dominating_mask,
    edge_cover_mask,
    matching_mask,
    popcount,
    set_cover_mask,
)
from .pbpoly import MAXIMIZE, MINIMIZE
from .qaoa import DiagonalCost

# values within this distance of a ladder rung count as attaining it
RANK_TOL = 1e-9


@dataclass(frozen=True)
class MetricsReport:
    p_opt: float
    p_top2: float
    p_top3: float
    approximation_ratio: float
    expectation: float


def summed_top_k_probability(dist: np.ndarray, dc: DiagonalCost, ladder: Sequence[float], k: int) -> float:
    """Mass on basis states whose value is among the ``k`` best distinct ladder values.

    ``ladder`` is best-first in the orientation of ``dc.sense``; ranks count
    distinct values, not states.
    """
    if not len(ladder):
        raise ContractError("empty value ladder")
    if k < 1:
        raise ParameterError("k must be >= 1")
    cutoff = ladder[min(k, len(ladder)) - 1]
    vals = dc.values
    with np.errstate(invalid="ignore"):
        if dc.sense == MAXIMIZE:
            hit = vals >= cutoff - RANK_TOL
        else:
            hit = vals <= cutoff + RANK_TOL
    # clip summation round-off so the value stays a probability
    return min(float(np.sum(np.asarray(dist)[hit])), 1.0)


def approximation_ratio(expectation: float, optimum: float) -> float:
    """``|expectation| / |optimum|``; undefined for a zero optimum."""
    if optimum == 0:
        raise ContractError("approximation ratio is undefined for a zero optimum")
    return abs(expectation) / abs(optimum)


def compute_metrics(
    dist: np.ndarray,
    dc: DiagonalCost,
    optimum: float,
    ladder: Sequence[float],
    rank_dc: DiagonalCost = None,
) -> MetricsReport:
    """Metrics of one distribution.

    The expectation is taken over ``dc`` (minimize orientation) and compared
    with ``optimum``; ranks are read from ``rank_dc`` against ``ladder``,
    which defaults to the same diagonal. A zero optimum gives a NaN ratio.
    """
    rank_dc = rank_dc or dc
    tops = [summed_top_k_probability(dist, rank_dc, ladder, k) for k in (1, 2, 3)]
    exp_val = float(np.dot(dist, dc.costs))
    try:
        ratio = approximation_ratio(exp_val, optimum)
    except ContractError:
        ratio = math.nan
    return MetricsReport(*tops, ratio, exp_val)


def aggregate(reports: Sequence[MetricsReport]) -> tuple[MetricsReport, MetricsReport]:
    """Fieldwise mean and population standard deviation."""
    if not reports:
        raise ParameterError("nothing to aggregate")
    names = [f.name for f in fields(MetricsReport)]
    table = np.array([[getattr(r, n) for n in names] for r in reports], dtype=float)
    return MetricsReport(*map(float, table.mean(axis=0))), MetricsReport(*map(float, table.std(axis=0)))


def constrained_diagonal(problem: str, inst, n_vars: int = None) -> DiagonalCost:
    """Constrained objective (selection size) per basis state, ``inf`` where infeasible.

    ``problem`` may name the constrained problem or its profit twin. For the
    set-cover penalty encoding pass its full ``n_vars``; only the leading
    subset bits are read.
    """
    from .encodings import TWIN_OF

    constrained = TWIN_OF.get(problem, problem)
    if constrained == "minds" and isinstance(inst, Graph):
        idx = basis_indices(inst.n_vertices)
        ok = dominating_mask(inst, idx)
    elif constrained == "m3" and isinstance(inst, Graph):
        idx = basis_indices(inst.n_edges)
        ok = matching_mask(inst, idx) & edge_cover_mask(inst, idx)
    elif constrained == "minsc" and isinstance(inst, SetCoverInstance):
        idx = basis_indices(inst.n_subsets)
        ok = set_cover_mask(inst, idx)
    else:
        raise ParameterError(f"no constrained objective for {problem!r} on {type(inst).__name__}")
    vals = np.where(ok, popcount(idx).astype(float), np.inf)
    if n_vars is not None and n_vars > int(idx.size).bit_length() - 1:
        vals = vals[basis_indices(n_vars) & (idx.size - 1)]
    return DiagonalCost(vals, MINIMIZE)


def report_dict(r: MetricsReport) -> dict:
    return asdict(r)
