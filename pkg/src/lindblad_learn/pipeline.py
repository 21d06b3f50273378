"""End-to-end helpers: records -> feature matrices -> trained regressor -> metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import SampleRecord, generate_dataset, split
from .errors import SchemaError
from .features import FEATURE_SETS, extract
from .models import ModelId, get_spec
from .nn.training import TrainedRegressor, evaluate, train
from .nn.transformer import RegressorConfig


@dataclass
class FeatureTable:
    sample_ids: list[int]
    features: np.ndarray
    targets: np.ndarray
    target_names: list[str]
    channels: list[str]
    feature_set: str
    model: str


def build_features(records: list[SampleRecord], feature_set: str | None = None) -> FeatureTable:
    """Feature vectors (channel-major) and target vectors for a list of records."""
    if not records:
        raise ValueError("no records")
    spec = get_spec(records[0].model)
    feature_set = feature_set or spec.feature_set
    if feature_set not in FEATURE_SETS:
        raise ValueError(f"unknown feature set {feature_set!r}")
    channels = list(spec.observables)
    rows, ys, ids = [], [], []
    for rec in records:
        if rec.model != spec.id.value:
            raise SchemaError(f"mixed models in one dataset: {rec.model} vs {spec.id.value}")
        missing = [c for c in channels if c not in rec.series]
        if missing:
            raise SchemaError(f"sample {rec.sample_id} lacks series {missing}")
        dt = float(rec.times[1] - rec.times[0])
        rows.append(extract(rec.series, channels, dt, feature_set))
        ys.append([rec.targets[name] for name in spec.targets])
        ids.append(rec.sample_id)
    return FeatureTable(ids, np.array(rows), np.array(ys), list(spec.targets), channels, feature_set,
                        spec.id.value)


def default_config(model, n_features: int | None = None, **overrides) -> RegressorConfig:
    """Training recipe per model: 2 layers / 4 heads for sq-const,
    3 layers / 8 heads for sq-const-two, otherwise 4 / 8; batch 64 for jc."""
    spec = get_spec(model)
    kw = {
        "n_channels": len(spec.observables),
        "n_features": n_features or len(FEATURE_SETS[spec.feature_set]),
        "n_outputs": spec.n_targets,
    }
    if spec.id is ModelId.SQ_CONST:
        kw.update(n_layers=2, n_heads=4)
    elif spec.id is ModelId.SQ_CONST_TWO:
        kw.update(n_layers=3, n_heads=8)
    if spec.id is ModelId.JC:
        kw["batch_size"] = 64
    kw.update(overrides)
    return RegressorConfig(**kw)


def train_on_table(table: FeatureTable, config: RegressorConfig, train_frac: float = 0.8,
                   split_seed: int = 0) -> tuple[TrainedRegressor, dict]:
    """80/20 split by sample, train, evaluate on the held-out part."""
    idx = list(range(len(table.sample_ids)))
    tr_idx, te_idx = split(idx, train_frac, split_seed)
    tr_idx, te_idx = sorted(tr_idx), sorted(te_idx)
    trained = train(config, table.features[tr_idx], table.targets[tr_idx], table.target_names)
    trained.meta.update(
        model=table.model, feature_set=table.feature_set, channels=table.channels,
        split_seed=split_seed, train_frac=train_frac,
        test_ids=[table.sample_ids[i] for i in te_idx],
    )
    metrics = evaluate(trained, table.features[te_idx], table.targets[te_idx])
    return trained, metrics


def run_experiment(model, n_samples: int, seed: int, feature_set: str | None = None,
                   workers: int = 1, **config_overrides):
    """Generate, featurize, train and evaluate one model end to end."""
    spec = get_spec(model)
    records = list(generate_dataset(spec, n_samples, seed, workers=workers))
    table = build_features(records, feature_set)
    config = default_config(spec.id, n_features=len(FEATURE_SETS[table.feature_set]),
                            seed=seed, **config_overrides)
    trained, metrics = train_on_table(table, config, split_seed=seed)
    return records, table, trained, metrics


FEATURE_SCHEMA_VERSION = 1


def write_feature_table(table: FeatureTable, path) -> None:
    """One JSON line per sample; the shared header fields repeat on every line."""
    from .dataset import dumps

    with open(path, "w", encoding="utf-8") as fh:
        for sid, x, y in zip(table.sample_ids, table.features, table.targets):
            fh.write(dumps({
                "schema_version": FEATURE_SCHEMA_VERSION,
                "sample_id": sid,
                "model": table.model,
                "feature_set": table.feature_set,
                "channels": table.channels,
                "target_names": table.target_names,
                "features": x,
                "targets": y,
            }))
            fh.write("\n")


def read_feature_table(path) -> FeatureTable:
    import json

    ids, xs, ys = [], [], []
    head = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            try:
                d = json.loads(line)
                if d.get("schema_version") != FEATURE_SCHEMA_VERSION:
                    raise SchemaError(f"feature schema {d.get('schema_version')} != {FEATURE_SCHEMA_VERSION}")
                key = (d["model"], d["feature_set"], tuple(d["channels"]), tuple(d["target_names"]))
                ids.append(int(d["sample_id"]))
                xs.append(d["features"])
                ys.append(d["targets"])
            except (KeyError, TypeError, ValueError) as exc:
                if isinstance(exc, SchemaError):
                    raise
                raise SchemaError(f"malformed feature line: {exc}") from exc
            if head is None:
                head = key
            elif key != head:
                raise SchemaError("inconsistent header fields across feature lines")
    if head is None:
        raise SchemaError(f"{path} contains no feature vectors")
    model, feature_set, channels, names = head
    return FeatureTable(ids, np.array(xs, dtype=float), np.array(ys, dtype=float), list(names),
                        list(channels), feature_set, model)
