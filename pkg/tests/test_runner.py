import json
import math

import pytest

from appbench.runner import (
    ConfigError, RunConfig, aggregate, estimate_work, load_results, plan, run_suite, save_results, timing_path,
)
from appbench.circuit import Circuit
from appbench.seeding import derive_seed
from appbench.simulator import NoiseModel


def test_bv1_noiseless_example():
    res = run_suite(RunConfig(benchmarks=["BV1"], min_size=2, max_size=4, num_circuits=3))
    assert len(res.records) == 9
    assert all(r.error is None and r.fidelity["f_normalized"] == 1.0 for r in res.records)
    assert [(g.n, g.count, g.mean_fidelity) for g in res.groups] == [(2, 3, 1.0), (3, 3, 1.0), (4, 3, 1.0)]


def test_record_count_and_clipping_notes():
    cfg = RunConfig(benchmarks=["HS", "VQE1", "DJ"], min_size=2, max_size=6, num_circuits=2, num_params=3)
    cells, notes = plan(cfg.validate())
    assert ("HS", 3) not in cells and ("VQE1", 2) not in cells
    assert any(n.startswith("HS:") for n in notes) and any(n.startswith("VQE1:") for n in notes)
    res = run_suite(cfg)
    # VQE1 is parametric: circuits x params records; the rest one per circuit
    expected = 3 * 2 + 2 * 2 * 3 + 5 * 2
    assert len(res.records) == expected


def test_seeds_follow_derivation():
    cfg = RunConfig(benchmarks=["QFT1"], min_size=3, max_size=3, num_circuits=2, master_seed=11)
    res = run_suite(cfg)
    assert [r.seed for r in res.records] == [derive_seed(11, "QFT1", 3, ci, 0) for ci in range(2)]


def test_group_mean_is_exact_mean():
    cfg = RunConfig(benchmarks=["GROVER", "QFT2"], min_size=2, max_size=4, num_circuits=3,
                    noise=NoiseModel(0.01, 0.05), shots=300)
    res = run_suite(cfg)
    for g in res.groups:
        members = [r.fidelity["f_normalized"] for r in res.records if (r.benchmark, r.n) == (g.benchmark, g.n)]
        assert g.mean_fidelity == math.fsum(members) / len(members)


def test_parallel_equals_serial(tmp_path):
    base = dict(benchmarks=["BV2", "PE", "MC2"], min_size=3, max_size=5, num_circuits=2,
                noise=NoiseModel(0.003, 0.03), shots=200)
    a = run_suite(RunConfig(**base, workers=1))
    b = run_suite(RunConfig(**base, workers=3))
    save_results(a, tmp_path / "a.json")
    save_results(b, tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_repeated_runs_byte_identical(tmp_path):
    cfg = dict(benchmarks=["DJ", "AE"], min_size=3, max_size=4, num_circuits=2, noise=NoiseModel(0.003, 0.03))
    for name in ("x", "y"):
        run_suite(RunConfig(**cfg, output=str(tmp_path / f"{name}.json")))
    assert (tmp_path / "x.json").read_bytes() == (tmp_path / "y.json").read_bytes()
    assert timing_path(tmp_path / "x.json").exists()


def test_save_load_roundtrip(tmp_path):
    res = run_suite(RunConfig(benchmarks=["HS"], min_size=2, max_size=4, num_circuits=1, shots=50))
    path, side = save_results(res, tmp_path / "r.json")
    doc = json.loads(path.read_text())
    assert doc["schema_version"] == 1
    assert "timing" not in doc["records"][0]
    back = load_results(path)
    assert [r.to_dict(with_timing=True) for r in back.records] == [r.to_dict(with_timing=True) for r in res.records]
    assert back.config.to_dict() == res.config.to_dict()
    assert json.loads(side.read_text())["records"][0]["key"] == ["HS", 2, 0, 0]


def test_failures_become_error_records():
    res = run_suite(RunConfig(benchmarks=["SHOR1", "BV1"], min_size=2, max_size=2, num_circuits=1, width_limit=6))
    shor, bv = res.records
    assert shor.error and "width" in shor.error and shor.fidelity is None
    assert bv.error is None
    assert res.groups[0].errors == 1 and res.groups[0].mean_fidelity is None


def test_work_budget_guard():
    res = run_suite(RunConfig(benchmarks=["GROVER"], min_size=6, max_size=6, num_circuits=1, work_budget=10.0))
    assert res.records[0].error.startswith("WorkBudgetExceeded")


def test_estimate_work_modes():
    c = Circuit(3, 3).rx(0.1, 0).cx(0, 1).measure_all()
    assert estimate_work(c, None, 1000) == len(c) * 8
    assert estimate_work(c, NoiseModel(0.01, 0.1), 1000) > estimate_work(c, None, 1000)
    c.reset(0)
    assert estimate_work(c, None, 1000) == len(c) * 8 * 1000


def test_classical_hook_called():
    seen = []
    run_suite(RunConfig(benchmarks=["BV1"], min_size=2, max_size=3, num_circuits=1),
              classical_hook=lambda inst, circ: seen.append((inst.n, circ.width)))
    assert seen == [(2, 3), (3, 4)]


@pytest.mark.parametrize("bad", [
    dict(benchmarks=[]), dict(benchmarks=["NOPE"]), dict(min_size=5, max_size=4), dict(shots=0),
    dict(master_seed=-1), dict(workers=0),
])
def test_config_validation(bad):
    with pytest.raises(ConfigError):
        RunConfig(**bad).validate()


def test_config_from_dict_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"shots": 10, "colour": "red"})
    cfg = RunConfig.from_dict({"noise": "0.001,0.01", "benchmarks": ["bv1"]}).validate()
    assert cfg.noise == NoiseModel(0.001, 0.01) and cfg.benchmarks == ["BV1"]


def test_aggregate_empty():
    assert aggregate([]) == []
