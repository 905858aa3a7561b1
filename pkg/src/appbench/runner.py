"""Suite execution: width sweep, circuit loop, parameter loop, then persistence.

Results go to a JSON document that is byte-identical for identical
configurations. Wall-clock timings are environment-dependent, so they are
written to a separate sidecar file (``<name>.timing.json``).
"""
from __future__ import annotations

import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import benchmarks as bm
from .circuit import Circuit, depth
from .metrics import normalized_fidelity
from .seeding import derive_seed, mix
from .simulator import DEFAULT_WIDTH_LIMIT, ExecTiming, NoiseModel, sample_noisy
from .transpile import transpile_standard

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_WORK_BUDGET = 2e10
# ideal distributions that need a full simulation rather than a formula
SIMULATED_IDEAL = {"HAMSIM", "VQE1", "SHOR1", "SHOR2"}


class ConfigError(ValueError):
    pass


class WorkBudgetExceeded(RuntimeError):
    pass


@dataclass
class RunConfig:
    benchmarks: list[str] = field(default_factory=lambda: [b.value for b in bm.BenchmarkId])
    min_size: int = 2
    max_size: int = 12
    num_circuits: int = 3
    num_params: int = 1
    shots: int = 1000
    noise: NoiseModel | None = None
    master_seed: int = 0
    output: str | None = None
    width_limit: int = DEFAULT_WIDTH_LIMIT
    work_budget: float = DEFAULT_WORK_BUDGET
    workers: int = 1

    def validate(self) -> "RunConfig":
        if not self.benchmarks:
            raise ConfigError("no benchmarks selected")
        names = []
        for b in self.benchmarks:
            try:
                names.append(bm.family(b).id.value)
            except KeyError as e:
                raise ConfigError(str(e)) from None
        self.benchmarks = names
        if self.min_size > self.max_size:
            raise ConfigError("min_size must not exceed max_size")
        if self.shots < 1 or self.num_circuits < 1 or self.num_params < 1:
            raise ConfigError("shots, num_circuits and num_params must be >= 1")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["noise"] = None if self.noise is None else [self.noise.p1, self.noise.p2]
        d.pop("output")
        d.pop("workers")  # does not affect results
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        noise = d.pop("noise", None)
        if isinstance(noise, str):
            noise = NoiseModel.parse(noise)
        elif noise is not None:
            noise = NoiseModel(*noise)
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        return cls(noise=noise, **d)


@dataclass
class BenchmarkRecord:
    benchmark: str
    n: int
    circuit_idx: int
    param_idx: int
    seed: int
    width: int | None = None
    algorithmic_depth: int | None = None
    normalized_depth: int | None = None
    fidelity: dict | None = None
    instance: dict = field(default_factory=dict)
    timing: ExecTiming = field(default_factory=ExecTiming)
    error: str | None = None

    @property
    def key(self) -> tuple:
        return (self.benchmark, self.n, self.circuit_idx, self.param_idx)

    def to_dict(self, with_timing: bool = False) -> dict:
        d = asdict(self)
        if not with_timing:
            d.pop("timing")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "BenchmarkRecord":
        d = dict(d)
        timing = ExecTiming(**d.pop("timing", {}) or {})
        return cls(timing=timing, **d)


@dataclass
class GroupAggregate:
    benchmark: str
    n: int
    width: int | None
    count: int
    errors: int
    mean_fidelity: float | None
    mean_raw_fidelity: float | None
    mean_algorithmic_depth: float | None
    mean_normalized_depth: float | None
    mean_t_create: float | None = None
    mean_t_compile: float | None = None
    mean_t_quantum: float | None = None

    def to_dict(self, with_timing: bool = False) -> dict:
        d = asdict(self)
        if not with_timing:
            for k in ("mean_t_create", "mean_t_compile", "mean_t_quantum"):
                d.pop(k)
        return d


@dataclass
class SuiteResult:
    config: RunConfig
    records: list[BenchmarkRecord]
    groups: list[GroupAggregate]
    notes: list[str] = field(default_factory=list)
    qv: dict | None = None


def _mean(vals) -> float | None:
    vals = [v for v in vals if v is not None]
    return math.fsum(vals) / len(vals) if vals else None


def aggregate(records: Sequence[BenchmarkRecord]) -> list[GroupAggregate]:
    groups: dict[tuple[str, int], list[BenchmarkRecord]] = {}
    for r in records:
        groups.setdefault((r.benchmark, r.n), []).append(r)
    out = []
    for (b, n), rs in groups.items():
        ok = [r for r in rs if r.error is None]
        out.append(GroupAggregate(
            benchmark=b, n=n, width=rs[0].width, count=len(rs), errors=len(rs) - len(ok),
            mean_fidelity=_mean(r.fidelity["f_normalized"] for r in ok),
            mean_raw_fidelity=_mean(r.fidelity["f_s"] for r in ok),
            mean_algorithmic_depth=_mean(r.algorithmic_depth for r in ok),
            mean_normalized_depth=_mean(r.normalized_depth for r in ok),
            mean_t_create=_mean(r.timing.t_create for r in ok),
            mean_t_compile=_mean(r.timing.t_compile for r in ok),
            mean_t_quantum=_mean(r.timing.t_quantum for r in ok),
        ))
    return out


# -- cost guard ------------------------------------------------------------------------
def estimate_work(circuit: Circuit, noise: NoiseModel | None, shots: int) -> float:
    """Rough amplitude-update count for sampling ``circuit`` (a transpiled circuit)."""
    gates = len(circuit)
    size = 2.0 ** circuit.width
    if any(g.name == "reset" or g.condition is not None for g in circuit):
        # mid-circuit logic runs shot by shot
        return gates * size * shots
    if noise is None or noise.is_zero:
        return gates * size
    p_clean = 1.0
    for g in circuit:
        arity = len(g.qubits) if g.name not in ("measure", "reset", "barrier") else 0
        if arity == 1:
            p_clean *= 1 - noise.p1
        elif arity == 2:
            p_clean *= 1 - noise.p2
    return gates * size * (1 + shots * (1 - p_clean))


def _ideal_work(benchmark: str, circuit: Circuit) -> float:
    if benchmark not in SIMULATED_IDEAL:
        return 0.0
    mids = sum(1 for g in circuit if g.name == "measure")
    branches = 2.0 ** min(mids, 16) if benchmark == "SHOR2" else 1.0
    return len(circuit) * 2.0 ** circuit.width * branches


# -- execution --------------------------------------------------------------------------
def _run_one(cfg: RunConfig, inst: bm.ProblemInstance, ci: int, pi: int, seed: int,
             classical_hook: Callable | None) -> BenchmarkRecord:
    fam = bm.family(inst.benchmark)
    rec = BenchmarkRecord(benchmark=inst.benchmark, n=inst.n, circuit_idx=ci, param_idx=pi, seed=seed,
                          width=fam.width(inst.n), instance=inst.summary())
    try:
        if rec.width > cfg.width_limit:
            raise WorkBudgetExceeded(f"width {rec.width} exceeds the simulator limit {cfg.width_limit}")
        t0 = time.perf_counter()
        circ = bm.build_circuit(inst)
        t1 = time.perf_counter()
        if classical_hook is not None:
            classical_hook(inst, circ)
        compiled = transpile_standard(circ)
        t2 = time.perf_counter()
        rec.algorithmic_depth = depth(circ)
        rec.normalized_depth = depth(compiled)
        work = estimate_work(compiled, cfg.noise, cfg.shots) + _ideal_work(inst.benchmark, circ)
        if work > cfg.work_budget:
            raise WorkBudgetExceeded(f"estimated work {work:.3g} exceeds budget {cfg.work_budget:.3g}")
        ideal = bm.ideal_distribution(inst)
        raw, timing = sample_noisy(compiled, cfg.noise, cfg.shots, mix(seed, "shots"), cfg.width_limit)
        out = bm.postprocess(inst, raw)
        rec.fidelity = normalized_fidelity(ideal, out).to_dict()
        rec.timing = ExecTiming(t_create=t1 - t0, t_compile=t2 - t1, t_quantum=timing.t_quantum, shots=cfg.shots)
    except Exception as e:  # recorded, never fatal to the suite
        rec.error = f"{type(e).__name__}: {e}"
        log.info("%s n=%d circuit %d param %d failed: %s", inst.benchmark, inst.n, ci, pi, rec.error)
    return rec


def _cell_records(cfg: RunConfig, benchmark: str, n: int, ci: int, classical_hook) -> list[BenchmarkRecord]:
    fam = bm.family(benchmark)
    seed0 = derive_seed(cfg.master_seed, benchmark, n, ci, 0)
    inst = bm.sample_instances(benchmark, n, 1, np.random.default_rng(seed0))[0]
    out = []
    for pi in range(cfg.num_params if fam.parametric else 1):
        seed = derive_seed(cfg.master_seed, benchmark, n, ci, pi)
        this = inst
        if pi:
            this = replace(inst, payload={**inst.payload, **fam.sample(n, np.random.default_rng(seed))})
        out.append(_run_one(cfg, this, ci, pi, seed, classical_hook))
    return out


def plan(cfg: RunConfig) -> tuple[list[tuple[str, int]], list[str]]:
    """(benchmark, n) cells to run and notes about clipped sizes."""
    cells, notes = [], []
    for b in cfg.benchmarks:
        sizes = bm.valid_sizes(b, cfg.min_size, cfg.max_size)
        skipped = sorted(set(range(cfg.min_size, cfg.max_size + 1)) - set(sizes))
        if skipped:
            notes.append(f"{b}: sizes {skipped} outside the valid range, skipped")
        cells.extend((b, n) for n in sizes)
    return cells, notes


def run_suite(cfg: RunConfig, classical_hook: Callable | None = None, progress=None) -> SuiteResult:
    cfg.validate()
    cells, notes = plan(cfg)
    for note in notes:
        log.warning(note)
    tasks = [(b, n, ci) for b, n in cells for ci in range(cfg.num_circuits)]

    def work(t):
        recs = _cell_records(cfg, *t, classical_hook)
        if progress:
            progress(recs)
        return recs

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as ex:
            chunks = list(ex.map(work, tasks))
    else:
        chunks = [work(t) for t in tasks]
    records = sorted((r for c in chunks for r in c), key=lambda r: (cfg.benchmarks.index(r.benchmark),) + r.key[1:])
    result = SuiteResult(cfg, records, aggregate(records), notes)
    if cfg.output:
        save_results(result, cfg.output)
    return result


# -- persistence --------------------------------------------------------------------------
def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, allow_nan=False) + "\n"


def timing_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".timing.json")


def results_document(result: SuiteResult) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "config": result.config.to_dict(),
        "notes": list(result.notes),
        "records": [r.to_dict() for r in result.records],
        "groups": [g.to_dict() for g in result.groups],
        "qv": result.qv,
        "nonreproducible": {"timing": "stored in the <stem>.timing.json sidecar"},
    }


def save_results(result: SuiteResult, path: str | Path) -> tuple[Path, Path]:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_dump(results_document(result)))
    side = timing_path(path)
    side.write_text(_dump({
        "schema_version": SCHEMA_VERSION,
        "records": [{"key": list(r.key), **asdict(r.timing)} for r in result.records],
    }))
    return path, side


def load_results(path: str | Path) -> SuiteResult:
    path = Path(path)
    doc = json.loads(path.read_text())
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported results schema {doc.get('schema_version')!r}")
    cfg = RunConfig.from_dict(doc["config"])
    records = [BenchmarkRecord.from_dict(r) for r in doc["records"]]
    side = timing_path(path)
    if side.exists():
        times = {tuple(t.pop("key")): t for t in json.loads(side.read_text())["records"]}
        for r in records:
            if r.key in times:
                r.timing = ExecTiming(**times[r.key])
    return SuiteResult(cfg, records, aggregate(records), doc.get("notes", []), doc.get("qv"))
