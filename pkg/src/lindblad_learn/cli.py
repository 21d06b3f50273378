"""Command-line entry point: ``lindblad-learn <command> ...``.

Exit codes: 0 success, 2 usage error, 3 data/schema error, 4 numerical failure.
Setting LINDBLAD_PROBE_SEED overrides any ``--seed``.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .bernstein import BernsteinRate
from .dataset import generate_dataset, read_jsonl, simulate_sample, write_jsonl
from .errors import SchemaError, SimulationError, TrainingError
from .inversion import invert_jc, invert_theorem1, invert_theorem2
from .models import ModelId, get_spec, instantiate
from .nn.checkpoint import load_checkpoint, save_checkpoint
from .nn.training import evaluate
from .pipeline import build_features, default_config, read_feature_table, train_on_table, write_feature_table
from .simulate import evolve

log = logging.getLogger("lindblad_learn")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
MODEL_CHOICES = [m.value for m in ModelId]


def _seed(args) -> int:
    env = os.environ.get("LINDBLAD_PROBE_SEED")
    return int(env) if env not in (None, "") else int(args.seed)


def _write_config(path: Path, config: dict) -> None:
    path.write_text(json.dumps(config, indent=2) + "\n")


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise SchemaError(f"--params entries must be key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k] = int(v) if k == "n" else float(v)
    return out


def cmd_simulate(args) -> int:
    spec = get_spec(args.model)
    seed = _seed(args)
    overrides = _parse_params(args.params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rec = simulate_sample(spec, 0, seed, substeps=args.substeps, overrides=overrides)
    write_jsonl([rec], out / "sample.jsonl")
    with open(out / "trajectory.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", *spec.observables])
        for k, t in enumerate(rec.times):
            w.writerow([repr(float(t)), *(repr(float(rec.series[o][k])) for o in spec.observables)])
    _write_config(out / "run_config.json", {"command": "simulate", "model": spec.id.value, "seed": seed,
                                           "params": overrides, "substeps": args.substeps})
    return EXIT_OK


def cmd_generate(args) -> int:
    spec = get_spec(args.model)
    seed = _seed(args)
    gen = generate_dataset(spec, args.n, seed, substeps=args.substeps, workers=args.workers)
    out = Path(args.out)
    n = write_jsonl(gen, out)
    _write_config(out.with_name(out.name + ".config.json"), {
        "command": "generate", "model": spec.id.value, "n": args.n, "seed": seed,
        "substeps": args.substeps, "written": n, "skipped": len(gen.skipped)})
    if gen.skipped:
        log.warning("%d samples skipped", len(gen.skipped))
    return EXIT_OK


def cmd_features(args) -> int:
    records = read_jsonl(args.input)
    table = build_features(records, args.set)
    out = Path(args.out)
    write_feature_table(table, out)
    _write_config(out.with_name(out.name + ".config.json"), {
        "command": "features", "in": str(args.input), "set": args.set, "samples": len(table.sample_ids)})
    return EXIT_OK


def cmd_train(args) -> int:
    table = read_feature_table(args.features)
    if args.model_id and args.model_id != table.model:
        raise SchemaError(f"features were built for {table.model}, not {args.model_id}")
    overrides = {}
    if args.config:
        overrides = json.loads(Path(args.config).read_text())
        if not isinstance(overrides, dict):
            raise SchemaError("--config must hold a flat JSON object")
    seed = _seed(args)
    overrides.setdefault("seed", seed)
    n_features = table.features.shape[1] // len(table.channels)
    try:
        config = default_config(table.model, n_features=n_features, **overrides)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad training config: {exc}") from exc
    trained, metrics = train_on_table(table, config, train_frac=args.train_frac, split_seed=seed)
    out = Path(args.out_ckpt)
    save_checkpoint(trained, out)
    _write_config(out.with_name(out.name + ".config.json"), {
        "command": "train", "features": str(args.features), "model_id": table.model, "seed": seed,
        "train_frac": args.train_frac, "regressor": config.to_dict()})
    log.info("test R2: %s", metrics["r2"])
    return EXIT_OK


def _write_report(metrics: dict, report_dir: Path, extra: dict) -> None:
    report_dir.mkdir(parents=True, exist_ok=True)
    summary = {"r2": metrics["r2"], "mse": metrics["mse"], **extra}
    (report_dir / "metrics.json").write_text(json.dumps(summary, indent=2) + "\n")
    for name, pairs in metrics["scatter"].items():
        with open(report_dir / f"scatter_{name}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["true", "predicted"])
            w.writerows([[repr(float(a)), repr(float(b))] for a, b in pairs])


def cmd_eval(args) -> int:
    trained = load_checkpoint(args.ckpt)
    table = read_feature_table(args.features)
    if trained.meta.get("model") not in (None, table.model):
        raise SchemaError(f"checkpoint is for {trained.meta.get('model')}, features are {table.model}")
    if table.features.shape[1] != trained.config.input_dim:
        raise SchemaError("feature dimension does not match the checkpoint")
    rows = list(range(len(table.sample_ids)))
    test_ids = trained.meta.get("test_ids")
    subset = "all"
    if test_ids and not args.all:
        wanted = set(test_ids)
        rows = [i for i, sid in enumerate(table.sample_ids) if sid in wanted]
        subset = "test"
        if not rows:
            raise SchemaError("none of the checkpoint's test samples are in the feature file")
    metrics = evaluate(trained, table.features[rows], table.targets[rows])
    _write_report(metrics, Path(args.report_dir), {"model": table.model, "subset": subset, "n": len(rows)})
    return EXIT_OK


def _true_rates(spec, targets: dict) -> dict[str, BernsteinRate]:
    """Ground-truth rate functions reconstructed from a record's targets."""
    rates = {}
    for prefix in ("gamma_plus", "gamma_minus", "kappa", "gamma"):
        if prefix in targets:
            rates[prefix] = BernsteinRate.constant(targets[prefix], spec.t_span)
        elif f"{prefix}_0" in targets:
            rates[prefix] = BernsteinRate(tuple(targets[f"{prefix}_{j}"] for j in range(3)), spec.t_span)
    return rates


def cmd_invert(args) -> int:
    records = read_jsonl(args.input)
    rows = []
    for rec in records:
        spec = get_spec(rec.model)
        s = rec.series
        try:
            if args.method == "t1":
                estimates = [invert_theorem1(s["sz"], rec.times)]
            elif args.method == "t2":
                estimates = list(invert_theorem2(s["sx"], s["sy"], s["sz"], rec.times))
            else:
                if spec.id is not ModelId.JC:
                    raise SchemaError("the jc method needs Jaynes-Cummings records")
                inst = instantiate(spec, np.random.default_rng(rec.seed))
                traj = evolve(inst.system, inst.rho0, spec.times, inst.observables, record_states=True)
                if not np.allclose(traj.series["sz"], s["sz"], atol=1e-9):
                    raise SchemaError(f"sample {rec.sample_id}: re-simulation does not match the record")
                estimates = list(invert_jc(traj, rec.params))
        except KeyError as exc:
            raise SchemaError(f"sample {rec.sample_id} lacks series {exc}") from exc
        truth = _true_rates(spec, rec.targets)
        for est in estimates:
            ref = truth.get(est.label)
            true_vals = ref(est.times) if ref is not None else None
            for k, t in enumerate(est.times):
                rows.append([rec.sample_id, est.label, repr(float(t)),
                             "" if not est.valid[k] else repr(float(est.values[k])),
                             "" if true_vals is None else repr(float(true_vals[k])),
                             int(est.valid[k])])
    out = Path(args.out)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sample_id", "rate", "time", "estimate", "true_value", "valid"])
        w.writerows(rows)
    _write_config(out.with_name(out.name + ".config.json"),
                  {"command": "invert", "in": str(args.input), "method": args.method})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lindblad-learn", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="simulate one sampled instance")
    s.add_argument("--model", required=True, choices=MODEL_CHOICES)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--params", nargs="*", metavar="KEY=VALUE", help="override sampled values")
    s.add_argument("--substeps", type=int, default=10)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("generate", help="generate a dataset as JSON Lines")
    s.add_argument("--model", required=True, choices=MODEL_CHOICES)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--substeps", type=int, default=10)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("features", help="extract feature vectors")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--set", choices=["f18", "f10"], default=None)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_features)

    s = sub.add_parser("train", help="train the transformer regressor")
    s.add_argument("--features", required=True)
    s.add_argument("--model-id", choices=MODEL_CHOICES, default=None)
    s.add_argument("--config", default=None, help="flat JSON file with regressor overrides")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--train-frac", type=float, default=0.8)
    s.add_argument("--out-ckpt", required=True)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("eval", help="evaluate a checkpoint")
    s.add_argument("--ckpt", required=True)
    s.add_argument("--features", required=True)
    s.add_argument("--report-dir", required=True)
    s.add_argument("--all", action="store_true", help="use every sample, not just the held-out split")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("invert", help="analytic rate recovery")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--method", choices=["t1", "t2", "jc"], required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_invert)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SchemaError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (SimulationError, TrainingError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
