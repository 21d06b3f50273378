"""Single-file ``.npz`` checkpoints: parameters plus a JSON header."""
from __future__ import annotations

import json

import numpy as np

from ..errors import SchemaError
from ..features import Standardizer
from .training import TrainedRegressor
from .transformer import RegressorConfig, TransformerRegressor

SCHEMA_VERSION = 1


def save_checkpoint(trained: TrainedRegressor, path) -> None:
    header = {
        "schema_version": SCHEMA_VERSION,
        "config": trained.config.to_dict(),
        "target_names": trained.target_names,
        "history": trained.history,
        "meta": trained.meta,
    }
    arrays = {f"param/{k}": v for k, v in trained.model.params.items()}
    arrays["scaler/x_mean"] = trained.feature_scaler.mean
    arrays["scaler/x_scale"] = trained.feature_scaler.scale
    arrays["scaler/y_mean"] = trained.target_scaler.mean
    arrays["scaler/y_scale"] = trained.target_scaler.scale
    with open(path, "wb") as fh:
        np.savez(fh, __header__=np.array(json.dumps(header)), **arrays)


def load_checkpoint(path) -> TrainedRegressor:
    with np.load(path, allow_pickle=False) as data:
        try:
            header = json.loads(str(data["__header__"]))
        except KeyError:
            raise SchemaError(f"{path} is not a regressor checkpoint") from None
        if header.get("schema_version") != SCHEMA_VERSION:
            raise SchemaError(f"checkpoint schema {header.get('schema_version')} != {SCHEMA_VERSION}")
        config = RegressorConfig.from_dict(header["config"])
        params = {k[len("param/"):]: data[k].copy() for k in data.files if k.startswith("param/")}
        fx = Standardizer(data["scaler/x_mean"].copy(), data["scaler/x_scale"].copy())
        fy = Standardizer(data["scaler/y_mean"].copy(), data["scaler/y_scale"].copy())
    model = TransformerRegressor(config, params=params)
    return TrainedRegressor(model, fx, fy, header["target_names"], header["history"], header["meta"])
