"""Experiment orchestration: build, optimize, post-process and score a corpus.

A sweep is described by a flat ``key = value`` file (an INI file with an
optional ``[experiment]`` header); see :data:`CONFIG_KEYS`. Results are
written as

* ``<problem>.csv``: one row per (instance, p, seed, raw/post-processed),
* ``<problem>_aggregate.csv``: means and standard deviations per (n, p),
* ``records/<problem>.jsonl``: one result record per line.

Everything is deterministic for a fixed configuration.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .encodings import TWIN_OF, TWINS, build_hamiltonian, resolve_penalties
from .errors import ContractError, ParameterError, ScoopError
from .instances import Graph, parse_instance, random_regular_graph, random_set_cover
from .metrics import MetricsReport, aggregate, compute_metrics, constrained_diagonal
from .oracles import brute_force_polynomial, exact_constrained
from .postprocess import enhancement_map, enhancer_for, postprocess_distribution
from .qaoa import OptimizerConfig, QaoaParams, optimize, precompute_diagonal, probabilities, run_circuit

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "instance_id", "n", "p_layers", "seed", "expectation", "approx_ratio",
    "p_opt", "p_top2", "p_top3", "postprocessed",
)
_METRIC_FIELDS = ("expectation", "approximation_ratio", "p_opt", "p_top2", "p_top3")
AGGREGATE_COLUMNS = ("n", "p_layers", "postprocessed", "count") + tuple(
    f"{s}_{m}" for m in ("expectation", "approx_ratio", "p_opt", "p_top2", "p_top3") for s in ("mean", "std")
)

NORM_TOL = 1e-9
DEFAULT_MAX_LAYERS = 8

CONFIG_KEYS = {
    "problem": "problem id (maxpd, minds, maxpes, m3, maxpsc, minsc)",
    "instances": "instance JSON files, comma or whitespace separated",
    "generator": "regular | setcover, used when no instance files are given",
    "n": "vertex count(s) for regular graphs or universe size(s) for set cover",
    "d": "degree of the regular graphs",
    "count": "instances generated per size",
    "seed": "corpus seed",
    "subsets": "family size for generated set-cover instances",
    "density": "membership probability for generated set-cover instances",
    "p_min": "smallest layer count",
    "p_max": "largest layer count",
    "p_values": "explicit layer counts (overrides p_min/p_max)",
    "max_layers": "upper bound on any layer count",
    "seeds": "optimizer initialization seeds",
    "steps": "RMSProp steps",
    "learning_rate": "RMSProp learning rate",
    "decay": "RMSProp decay",
    "epsilon": "RMSProp epsilon",
    "gradient_step": "finite-difference step",
    "A": "penalty A", "B": "penalty B", "C": "penalty C",
    "baseline": "also run the penalty baseline of a profit twin (true/false)",
    "output": "output directory",
    "record_top": "distribution entries kept per record (0 keeps all)",
}


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str
    instance_files: tuple = ()
    generator: str = "regular"
    sizes: tuple = (6,)
    degree: int = 3
    count: int = 1
    seed: int = 0
    subsets: int = 5
    density: float = 0.4
    p_values: tuple = (1,)
    max_layers: int = DEFAULT_MAX_LAYERS
    init_seeds: tuple = (0,)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    penalties: Optional[dict] = None  # overrides of A, B, C
    baseline: bool = False
    output_dir: Optional[str] = None
    record_top: int = 64

    def __post_init__(self):
        from .encodings import PROBLEMS

        if self.problem not in PROBLEMS:
            raise ParameterError(f"unknown problem {self.problem!r}")
        if self.count < 1:
            raise ParameterError("count must be >= 1")
        if not self.p_values or min(self.p_values) < 1:
            raise ParameterError("layer counts must be >= 1")
        if max(self.p_values) > self.max_layers:
            raise ParameterError(f"layer count {max(self.p_values)} exceeds max_layers={self.max_layers}")
        if self.baseline and self.problem not in TWINS:
            raise ParameterError("baseline runs are only defined for profit twins")
        if self.generator not in ("regular", "setcover"):
            raise ParameterError(f"unknown generator {self.generator!r}")


def _ints(text: str) -> tuple:
    return tuple(int(t) for t in text.replace(",", " ").split())


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    raw = path.read_text()
    if not any(line.lstrip().startswith("[") for line in raw.splitlines()):
        raw = "[experiment]\n" + raw
    parser = configparser.ConfigParser()
    parser.optionxform = str
    try:
        parser.read_string(raw)
        sec = dict(parser["experiment"])
    except (configparser.Error, KeyError) as exc:
        raise ParameterError(f"bad config {path}: {exc}") from exc
    unknown = set(sec) - set(CONFIG_KEYS)
    if unknown:
        raise ParameterError(f"unknown config keys: {sorted(unknown)}")
    return config_from_mapping(sec, base_dir=path.parent)


def config_from_mapping(sec: dict, base_dir: Path = Path(".")) -> ExperimentConfig:
    try:
        if "p_values" in sec:
            p_values = _ints(sec["p_values"])
        else:
            p_values = tuple(range(int(sec.get("p_min", 1)), int(sec.get("p_max", sec.get("p_min", 1))) + 1))
        opt = OptimizerConfig(
            steps=int(sec.get("steps", 400)),
            learning_rate=float(sec.get("learning_rate", 0.01)),
            decay=float(sec.get("decay", 0.9)),
            epsilon=float(sec.get("epsilon", 1e-8)),
            gradient_step=float(sec.get("gradient_step", 1e-4)),
        )
        penalties = {k: float(sec[k]) for k in "ABC" if k in sec} or None
        files = tuple(str(Path(base_dir, f)) for f in sec.get("instances", "").replace(",", " ").split())
        return ExperimentConfig(
            problem=sec["problem"],
            instance_files=files,
            generator=sec.get("generator", "setcover" if sec["problem"] in ("maxpsc", "minsc") else "regular"),
            sizes=_ints(sec.get("n", "6")),
            degree=int(sec.get("d", 3)),
            count=int(sec.get("count", 1)),
            seed=int(sec.get("seed", 0)),
            subsets=int(sec.get("subsets", 5)),
            density=float(sec.get("density", 0.4)),
            p_values=p_values,
            max_layers=int(sec.get("max_layers", DEFAULT_MAX_LAYERS)),
            init_seeds=_ints(sec.get("seeds", "0")),
            optimizer=opt,
            penalties=penalties,
            baseline=sec.get("baseline", "false").strip().lower() in ("1", "true", "yes", "on"),
            output_dir=sec.get("output"),
            record_top=int(sec.get("record_top", 64)),
        )
    except KeyError as exc:
        raise ParameterError(f"missing config key {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, ScoopError):
            raise
        raise ParameterError(f"bad config value: {exc}") from exc


def corpus_seed(seed: int, k: int) -> int:
    """Seed of the ``k``-th generated instance of a corpus."""
    return int(np.random.SeedSequence([seed, k]).generate_state(1)[0])


def build_corpus(cfg: ExperimentConfig) -> list:
    """``(instance_id, size, instance)`` triples in config order."""
    out = []
    for f in cfg.instance_files:
        inst = parse_instance(Path(f).read_bytes())
        out.append((Path(f).stem, instance_size(inst), inst))
    if out:
        return out
    for n in cfg.sizes:
        for k in range(cfg.count):
            s = corpus_seed(cfg.seed, k)
            if cfg.generator == "regular":
                inst = random_regular_graph(n, cfg.degree, s)
                iid = f"rr-n{n}-d{cfg.degree}-s{cfg.seed}-{k}"
            else:
                inst = random_set_cover(n, cfg.subsets, s, cfg.density)
                iid = f"sc-n{n}-m{cfg.subsets}-s{cfg.seed}-{k}"
            out.append((iid, n, inst))
    return out


def instance_size(inst) -> int:
    return inst.n_vertices if isinstance(inst, Graph) else inst.universe_size


# -- distribution records ---------------------------------------------------


def bits_string(index: int, n: int) -> str:
    """Character ``i`` is variable ``i``."""
    return "".join("1" if (index >> i) & 1 else "0" for i in range(n))


def distribution_entries(dist: np.ndarray, top: int = 0) -> list:
    """``[{bits, prob}]`` sorted by descending probability, ties by index."""
    n = int(dist.size).bit_length() - 1
    order = np.lexsort((np.arange(dist.size), -dist))
    if top:
        order = order[:top]
    return [{"bits": bits_string(int(i), n), "prob": float(dist[i])} for i in order if dist[i] > 0 or top]


def distribution_from_entries(entries: Sequence[dict], n: Optional[int] = None) -> np.ndarray:
    if n is None:
        if not entries:
            raise ParameterError("empty distribution")
        n = len(entries[0]["bits"])
    dist = np.zeros(1 << n)
    for e in entries:
        bits = e["bits"]
        if len(bits) != n or set(bits) - {"0", "1"}:
            raise ParameterError(f"bad bitstring {bits!r}")
        dist[int(bits[::-1], 2)] += float(e["prob"])
    return dist


def result_record(instance_id, problem, p, seed, params: QaoaParams, expectation, trace, dist, top=0, postprocessed=False) -> dict:
    trace = np.asarray(trace)
    return {
        "instance_id": instance_id,
        "problem": problem,
        "p": p,
        "seed": seed,
        "params": {"gammas": list(params.gammas), "betas": list(params.betas)},
        "expectation": expectation,
        "trace_summary": {
            "steps": int(trace.size - 1),
            "initial": float(trace[0]),
            "final": float(trace[-1]),
            "best": float(trace.min()),
        } if trace.size else {},
        "postprocessed": postprocessed,
        "distribution": distribution_entries(dist, top),
    }


def audit_normalized(dist: np.ndarray, context: str):
    total = float(dist.sum())
    if abs(total - 1.0) > NORM_TOL or np.any(dist < 0):
        raise ContractError(f"{context}: distribution not normalized (total {total!r})")


def audit_feasible(dist: np.ndarray, cdc, context: str):
    bad = np.flatnonzero((dist > 0) & ~np.isfinite(cdc.values))
    if bad.size:
        raise ContractError(f"{context}: post-processed mass on infeasible state {int(bad[0])}")


# -- the sweep ----------------------------------------------------------------


@dataclass
class ProblemResult:
    problem: str
    rows: list = field(default_factory=list)
    records: list = field(default_factory=list)
    reports: dict = field(default_factory=dict)  # (instance_id, n, p, seed, postprocessed) -> MetricsReport


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    problems: dict = field(default_factory=dict)


def _row(iid, n, p, seed, rep: MetricsReport, postprocessed: bool) -> dict:
    return {
        "instance_id": iid, "n": n, "p_layers": p, "seed": seed,
        "expectation": rep.expectation, "approx_ratio": rep.approximation_ratio,
        "p_opt": rep.p_opt, "p_top2": rep.p_top2, "p_top3": rep.p_top3,
        "postprocessed": int(postprocessed),
    }


def run_problem(problem: str, corpus, cfg: ExperimentConfig) -> ProblemResult:
    result = ProblemResult(problem)
    for iid, size, inst in corpus:
        try:
            poly, _ = build_hamiltonian(problem, inst, resolve_penalties(problem, inst, **(cfg.penalties or {})))
            dc = precompute_diagonal(poly)
            poly_rec = brute_force_polynomial(poly)
            twin = problem in TWINS
            if twin:
                c_rec = exact_constrained(problem, inst)
                cdc = constrained_diagonal(problem, inst)
                enhance = enhancer_for(problem, inst)
                mapping = enhancement_map(poly.num_vars, enhance)
            for p in cfg.p_values:
                for s in cfg.init_seeds:
                    ctx = f"{iid} {problem} p={p} seed={s}"
                    res = optimize(dc, p, replace(cfg.optimizer, init_seed=s))
                    dist = probabilities(run_circuit(dc, res.params))
                    audit_normalized(dist, ctx)
                    raw = compute_metrics(dist, dc, poly_rec.best_value, poly_rec.value_ladder)
                    result.reports[(iid, size, p, s, False)] = raw
                    result.rows.append(_row(iid, size, p, s, raw, False))
                    result.records.append(result_record(iid, problem, p, s, res.params, raw.expectation, res.trace, dist, cfg.record_top))
                    if twin:
                        pp = postprocess_distribution(dist, None, mapping=mapping)
                        audit_normalized(pp, ctx + " post-processed")
                        audit_feasible(pp, cdc, ctx)
                        rep = compute_metrics(pp, dc, poly_rec.best_value, c_rec.value_ladder, rank_dc=cdc)
                        result.reports[(iid, size, p, s, True)] = rep
                        result.rows.append(_row(iid, size, p, s, rep, True))
                        result.records.append(
                            result_record(iid, problem, p, s, res.params, rep.expectation, res.trace, pp, cfg.record_top, True)
                        )
                    log.info("%s: <C>=%.6g p_opt=%.4f", ctx, raw.expectation, raw.p_opt)
        except ScoopError as exc:
            raise type(exc)(f"instance {iid}: {exc}") from exc
    return result


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    corpus = build_corpus(cfg)
    problems = [cfg.problem] + ([TWIN_OF[cfg.problem]] if cfg.baseline else [])
    out = ExperimentResult(cfg)
    for prob in problems:
        out.problems[prob] = run_problem(prob, corpus, cfg)
    if cfg.output_dir:
        write_outputs(out, Path(cfg.output_dir))
    return out


def aggregate_rows(pr: ProblemResult) -> list:
    groups: dict = {}
    for (iid, n, p, s, post), rep in pr.reports.items():
        groups.setdefault((n, p, post), []).append(rep)
    rows = []
    for (n, p, post), reps in groups.items():
        mean, std = aggregate(reps)
        row = {"n": n, "p_layers": p, "postprocessed": int(post), "count": len(reps)}
        for name, col in zip(_METRIC_FIELDS, ("expectation", "approx_ratio", "p_opt", "p_top2", "p_top3")):
            row[f"mean_{col}"] = getattr(mean, name)
            row[f"std_{col}"] = getattr(std, name)
        rows.append(row)
    return rows


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return "nan" if math.isnan(v) else repr(float(v))
    return str(v)


def to_csv(rows: list, columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def write_outputs(result: ExperimentResult, out_dir: Path):
    (out_dir / "records").mkdir(parents=True, exist_ok=True)
    for prob, pr in result.problems.items():
        (out_dir / f"{prob}.csv").write_text(to_csv(pr.rows, CSV_COLUMNS))
        (out_dir / f"{prob}_aggregate.csv").write_text(to_csv(aggregate_rows(pr), AGGREGATE_COLUMNS))
        with open(out_dir / "records" / f"{prob}.jsonl", "w") as fh:
            for rec in pr.records:
                fh.write(json.dumps(rec) + "\n")
