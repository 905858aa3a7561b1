"""Command line entry point: ``appbench run|qv|report|list``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import benchmarks as bm
from .qv import QvResult, measure_qv
from .report import Background, InvalidQv, bucket, qv_circuit_depth, render
from .runner import ConfigError, RunConfig, load_results, run_suite, save_results
from .simulator import NoiseModel

log = logging.getLogger("appbench")

# CLI flag -> RunConfig field
FLAG_FIELDS = {
    "benchmarks": "benchmarks", "min_size": "min_size", "max_size": "max_size", "shots": "shots",
    "num_circuits": "num_circuits", "num_params": "num_params", "noise": "noise", "seed": "master_seed",
    "out": "output", "width_limit": "width_limit", "work_budget": "work_budget", "workers": "workers",
}


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: not valid JSON ({e})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return data


def _noise(value) -> NoiseModel | None:
    if value is None or isinstance(value, NoiseModel):
        return value
    if isinstance(value, (list, tuple)):
        return NoiseModel(*value)
    return NoiseModel.parse(str(value))


def build_config(args: argparse.Namespace) -> tuple[RunConfig, dict]:
    """Merge defaults, config file, then command-line flags (highest precedence)."""
    file_cfg = _load_config_file(args.config)
    extras = {k: file_cfg.pop(k) for k in ("qv", "qv_file") if k in file_cfg}
    merged: dict = {}
    for key, value in file_cfg.items():
        field = FLAG_FIELDS.get(key, key)
        merged[field] = value
    for flag, field in FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is not None:
            merged[field] = value
    if isinstance(merged.get("benchmarks"), str):
        merged["benchmarks"] = [b for b in merged["benchmarks"].split(",") if b]
    if "noise" in merged:
        merged["noise"] = _noise(merged["noise"])
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(merged) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if getattr(args, "qv", None) is not None:
        extras["qv"] = args.qv
    return RunConfig(**merged).validate(), extras


def _background(vq, qv_n: int | None = None) -> Background | None:
    if vq is None:
        return None
    vq = int(vq)
    k = vq.bit_length() - 1
    return Background(vq, qv_circuit_depth(qv_n or k) if k >= 2 else None)


def _render(result, out_dir: Path, vq) -> list[Path]:
    if vq is None and result.qv:
        vq = result.qv.get("qv") if result.qv.get("qv", 1) >= 2 else None
    return render(bucket(result.records), _background(vq), result.groups, out_dir)


def cmd_run(args) -> int:
    cfg, extras = build_config(args)
    out = Path(cfg.output or "results/results.json")
    cfg.output = None

    def progress(recs):
        for r in recs:
            status = r.error or f"fidelity {r.fidelity['f_normalized']:.3f}"
            log.info("%s n=%d circuit %d param %d: %s", r.benchmark, r.n, r.circuit_idx, r.param_idx, status)

    result = run_suite(cfg, progress=progress)
    if extras.get("qv_file"):
        result.qv = json.loads(Path(extras["qv_file"]).read_text())["qv"]
    path, side = save_results(result, out)
    files = _render(result, out.parent / (out.stem + "_report"), extras.get("qv"))
    print(f"wrote {path} ({len(result.records)} records), timings in {side.name}, {len(files)} report files")
    return 0


def cmd_qv(args) -> int:
    noise = _noise(args.noise) or NoiseModel()
    res = measure_qv(noise, args.max_size, circuits_per_n=args.num_circuits, shots=args.shots, seed=args.seed,
                     stderr_method=args.stderr,
                     progress=lambda r: log.info("n=%d mean HOP %.4f stderr %.4f %s", r.n, r.mean_hop, r.stderr,
                                                 "pass" if r.passed else "fail"))
    text = json.dumps({"schema_version": 1, "qv": res.to_dict()}, indent=1, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
    print(f"quantum volume {res.qv}")
    for r in res.records:
        print(f"  n={r.n}: mean HOP {r.mean_hop:.4f} +- {r.stderr:.4f} {'pass' if r.passed else 'fail'}")
    return 0


def cmd_report(args) -> int:
    result = load_results(args.results)
    vq = args.qv
    if args.qv_file:
        vq = QvResult.from_dict(json.loads(Path(args.qv_file).read_text())["qv"]).qv
    out = Path(args.out or Path(args.results).with_suffix("").as_posix() + "_report")
    files = _render(result, out, vq)
    print(f"wrote {len(files)} files to {out}")
    return 0


def cmd_list(args) -> int:
    for fam in bm.FAMILIES.values():
        sizes = bm.valid_sizes(fam.id, 2, 12)
        lo, hi = sizes[0], sizes[-1]
        print(f"{fam.id.value:7s} {fam.group:10s} n {lo}-{hi}  width {fam.width(lo)}-{fam.width(hi)}  {fam.description}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="appbench", description="Application-oriented quantum benchmarks on a simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="execute the benchmark suite")
    r.add_argument("--config", help="JSON file with any of the run options")
    r.add_argument("--benchmarks", help="comma-separated ids (default: all)")
    r.add_argument("--min-size", dest="min_size", type=int)
    r.add_argument("--max-size", dest="max_size", type=int)
    r.add_argument("--shots", type=int)
    r.add_argument("--num-circuits", dest="num_circuits", type=int)
    r.add_argument("--num-params", dest="num_params", type=int)
    r.add_argument("--noise", help="p1,p2 or none")
    r.add_argument("--seed", type=int)
    r.add_argument("--out", help="results JSON path (default results/results.json)")
    r.add_argument("--qv", type=int, help="quantum volume for the chart background")
    r.add_argument("--width-limit", dest="width_limit", type=int)
    r.add_argument("--work-budget", dest="work_budget", type=float)
    r.add_argument("--workers", type=int)
    r.set_defaults(func=cmd_run)

    q = sub.add_parser("qv", help="measure quantum volume under a noise model")
    q.add_argument("--noise", default="0.003,0.03")
    q.add_argument("--max-size", dest="max_size", type=int, default=8)
    q.add_argument("--num-circuits", dest="num_circuits", type=int, default=200)
    q.add_argument("--shots", type=int, default=1000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--stderr", choices=("sample", "binomial"), default="sample")
    q.add_argument("--out")
    q.set_defaults(func=cmd_qv)

    rep = sub.add_parser("report", help="re-render charts from a results file")
    rep.add_argument("results")
    rep.add_argument("--qv", type=int)
    rep.add_argument("--qv-file", dest="qv_file", help="output of 'appbench qv --out'")
    rep.add_argument("--out", help="output directory")
    rep.set_defaults(func=cmd_report)

    ls = sub.add_parser("list", help="list the benchmarks")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ConfigError, InvalidQv, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
