import json
from pathlib import Path

import numpy as np
import pytest

from scoop.errors import ParameterError
from scoop.experiment import (
    CSV_COLUMNS,
    ExperimentConfig,
    build_corpus,
    corpus_seed,
    distribution_entries,
    distribution_from_entries,
    load_config,
    run_experiment,
)
from scoop.qaoa import OptimizerConfig

FAST = OptimizerConfig(steps=20)


def test_bit_strings_are_variable_ordered():
    dist = np.zeros(8)
    dist[0b001] = 0.75
    dist[0b110] = 0.25
    entries = distribution_entries(dist)
    assert entries == [{"bits": "100", "prob": 0.75}, {"bits": "011", "prob": 0.25}]
    np.testing.assert_array_equal(distribution_from_entries(entries), dist)


def test_distribution_entries_truncation():
    dist = np.full(16, 1 / 16)
    assert len(distribution_entries(dist, top=3)) == 3
    assert [e["bits"] for e in distribution_entries(dist, top=2)] == ["0000", "1000"]


def test_distribution_from_entries_validates():
    with pytest.raises(ParameterError):
        distribution_from_entries([{"bits": "01", "prob": 1.0}], 3)
    with pytest.raises(ParameterError):
        distribution_from_entries([{"bits": "0a1", "prob": 1.0}])


def test_single_record_sweep():
    res = run_experiment(ExperimentConfig(problem="maxpd", sizes=(6,), count=1, p_values=(1,), optimizer=FAST))
    pr = res.problems["maxpd"]
    raw = [r for r in pr.records if not r["postprocessed"]]
    assert len(raw) == 1
    assert {r["postprocessed"] for r in pr.rows} == {0, 1}


def test_sweep_cardinality():
    cfg = ExperimentConfig(problem="maxpd", sizes=(6,), count=3, seed=7, p_values=(1, 2), init_seeds=(0, 1), optimizer=FAST)
    pr = run_experiment(cfg).problems["maxpd"]
    assert len([r for r in pr.rows if r["postprocessed"] == 0]) == 3 * 2 * 2
    assert len(pr.records) == 2 * 3 * 2 * 2


def test_baseline_and_penalty_rows():
    cfg = ExperimentConfig(problem="maxpd", sizes=(6,), count=1, p_values=(1,), optimizer=FAST, baseline=True)
    res = run_experiment(cfg)
    assert set(res.problems) == {"maxpd", "minds"}
    assert {r["postprocessed"] for r in res.problems["minds"].rows} == {0}


def test_set_cover_sweep():
    cfg = ExperimentConfig(problem="maxpsc", generator="setcover", sizes=(4,), subsets=4, count=2, p_values=(1,), optimizer=FAST)
    rows = run_experiment(cfg).problems["maxpsc"].rows
    assert len(rows) == 4
    for r in rows:
        assert 0 <= r["p_opt"] <= r["p_top2"] <= r["p_top3"] <= 1


def test_config_validation():
    with pytest.raises(ParameterError):
        ExperimentConfig(problem="maxpd", p_values=(9,))
    ExperimentConfig(problem="maxpd", p_values=(9,), max_layers=9)
    with pytest.raises(ParameterError):
        ExperimentConfig(problem="maxpd", count=0)
    with pytest.raises(ParameterError):
        ExperimentConfig(problem="minds", baseline=True)
    with pytest.raises(ParameterError):
        ExperimentConfig(problem="maxcut")


def test_load_config(tmp_path):
    inst = tmp_path / "p3.json"
    inst.write_text('{"type":"graph","n":3,"edges":[[0,1],[1,2]]}')
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text("problem = minds\ninstances = p3.json\np_min = 1\np_max = 3\nseeds = 0, 2\nsteps = 5\nA = 4\n")
    cfg = load_config(cfg_file)
    assert cfg.p_values == (1, 2, 3)
    assert cfg.init_seeds == (0, 2)
    assert cfg.optimizer.steps == 5
    assert cfg.penalties == {"A": 4.0}
    corpus = build_corpus(cfg)
    assert [c[0] for c in corpus] == ["p3"] and corpus[0][1] == 3


@pytest.mark.parametrize("header", ["", "[experiment]\n", "# leading comment\n[experiment]\n", "# comment only\n"])
def test_load_config_header_optional(tmp_path, header):
    f = tmp_path / "exp.cfg"
    f.write_text(header + "problem = maxpd\nn = 6\np_values = 1\n")
    cfg = load_config(f)
    assert cfg.problem == "maxpd" and cfg.sizes == (6,) and cfg.p_values == (1,)


@pytest.mark.parametrize("path", sorted((Path(__file__).parents[1] / "configs").glob("*.cfg")), ids=lambda p: p.name)
def test_shipped_configs_load(path):
    assert load_config(path).p_values


@pytest.mark.parametrize("text", ["problem = maxpd\nlayers = 3\n", "problem = maxpd\nsteps = many\n", "p_min = 1\n"])
def test_load_config_rejects(tmp_path, text):
    f = tmp_path / "bad.cfg"
    f.write_text(text)
    with pytest.raises(ParameterError):
        load_config(f)


def test_outputs_written(tmp_path):
    cfg = ExperimentConfig(problem="maxpes", sizes=(6,), count=2, p_values=(1, 2), optimizer=FAST, output_dir=str(tmp_path))
    run_experiment(cfg)
    header = (tmp_path / "maxpes.csv").read_text().splitlines()[0]
    assert header.split(",") == list(CSV_COLUMNS)
    agg = (tmp_path / "maxpes_aggregate.csv").read_text().splitlines()
    assert len(agg) == 1 + 2 * 2
    for line in agg[1:]:
        [float(cell) for cell in line.split(",")]
    recs = [json.loads(line) for line in (tmp_path / "records" / "maxpes.jsonl").read_text().splitlines()]
    assert len(recs) == 2 * 2 * 2
    for rec in recs:
        assert set(rec) >= {"instance_id", "problem", "p", "seed", "params", "expectation", "trace_summary", "distribution"}
        probs = [e["prob"] for e in rec["distribution"]]
        assert probs == sorted(probs, reverse=True)


def test_corpus_seed_is_stable():
    assert corpus_seed(7, 0) == corpus_seed(7, 0) != corpus_seed(7, 1)
