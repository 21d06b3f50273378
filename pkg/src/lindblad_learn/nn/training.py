"""Training, evaluation and gradient checking for the regressor."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import TrainingError
from ..features import Standardizer
from .optim import AdamW, EarlyStopping, ReduceLROnPlateau, clip_grad_norm
from .transformer import RegressorConfig, TransformerRegressor, mse_loss

log = logging.getLogger(__name__)


@dataclass
class TrainedRegressor:
    """A model together with the normalization it was trained with."""

    model: TransformerRegressor
    feature_scaler: Standardizer
    target_scaler: Standardizer
    target_names: list[str] = field(default_factory=list)
    history: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def config(self) -> RegressorConfig:
        return self.model.config

    def predict(self, features: np.ndarray) -> np.ndarray:
        """Raw features -> targets in physical units."""
        z = self.model.predict(self.feature_scaler.apply(features))
        return self.target_scaler.invert(z)


def carve_validation(n: int, val_frac: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic (fit, validation) index split of a training partition."""
    perm = np.random.default_rng([seed, 1]).permutation(n)
    n_val = max(1, int(round(n * val_frac))) if n >= 2 else 0
    return np.sort(perm[n_val:]), np.sort(perm[:n_val])


def train(config: RegressorConfig, features: np.ndarray, targets: np.ndarray,
          target_names=None, log_every: int = 0) -> TrainedRegressor:
    """Fit a regressor on raw (unstandardized) features and targets.

    A ``config.val_frac`` slice of the data drives the plateau scheduler and
    early stopping; the weights with the best validation loss are restored.
    """
    X = np.asarray(features, dtype=float)
    Y = np.asarray(targets, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if len(X) == 0:
        raise ValueError("empty training set")
    if X.shape[1] != config.input_dim or Y.shape[1] != config.n_outputs:
        raise ValueError(f"data shapes {X.shape}, {Y.shape} do not match the config")

    fit_idx, val_idx = carve_validation(len(X), config.val_frac, config.seed)
    if len(val_idx) == 0:
        val_idx = fit_idx
    fx = Standardizer.fit(X[fit_idx])
    fy = Standardizer.fit(Y[fit_idx])
    Xf, Yf = fx.apply(X[fit_idx]), fy.apply(Y[fit_idx])
    Xv, Yv = fx.apply(X[val_idx]), fy.apply(Y[val_idx])

    rng = np.random.default_rng(config.seed)
    model = TransformerRegressor(config, rng=rng)
    opt = AdamW(model.params, lr=config.lr, betas=config.betas, eps=config.eps,
                weight_decay=config.weight_decay)
    sched = ReduceLROnPlateau(opt, factor=config.plateau_factor, patience=config.plateau_patience)
    stopper = EarlyStopping(config.early_stop_patience)
    best = {k: v.copy() for k, v in model.params.items()}
    history = []

    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(len(Xf))
        total = 0.0
        for b, start in enumerate(range(0, len(order), config.batch_size)):
            idx = order[start:start + config.batch_size]
            pred, cache = model.forward(Xf[idx], train=True, rng=rng, return_cache=True)
            loss, dout = mse_loss(pred, Yf[idx])
            if not np.isfinite(loss):
                raise TrainingError(f"non-finite loss at epoch {epoch}, batch {b}, lr {opt.lr:.3g}",
                                    epoch=epoch, batch=b, lr=opt.lr)
            grads = model.backward(dout, cache)
            clip_grad_norm(grads, config.grad_clip_norm)
            opt.step(grads)
            total += loss * len(idx)
        train_loss = total / len(Xf)
        val_loss, _ = mse_loss(model.predict(Xv), Yv)
        if not np.isfinite(val_loss):
            raise TrainingError(f"non-finite validation loss at epoch {epoch}, lr {opt.lr:.3g}",
                                epoch=epoch, lr=opt.lr)
        history.append({"epoch": epoch, "train_loss": train_loss, "val_loss": val_loss, "lr": opt.lr})
        if stopper.step(val_loss, epoch):
            best = {k: v.copy() for k, v in model.params.items()}
        sched.step(val_loss)
        if log_every and epoch % log_every == 0:
            log.info("epoch %d train %.4g val %.4g lr %.2g", epoch, train_loss, val_loss, opt.lr)
        if stopper.should_stop:
            break

    for k in model.params:
        model.params[k][...] = best[k]
    meta = {"best_epoch": stopper.best_epoch, "best_val_loss": stopper.best, "epochs_run": len(history)}
    return TrainedRegressor(model, fx, fy, list(target_names or []), history, meta)


def r2_score(y_true: np.ndarray, y_pred: np.ndarray):
    """Coefficient of determination, or None when the targets are constant."""
    ss_tot = float(np.sum((y_true - y_true.mean()) ** 2))
    if ss_tot == 0.0:
        return None
    return 1.0 - float(np.sum((y_true - y_pred) ** 2)) / ss_tot


def regression_metrics(y_true, y_pred, names=None) -> dict:
    """R^2, MSE and (true, predicted) pairs per output dimension."""
    y_true = np.asarray(y_true, dtype=float).reshape(len(y_true), -1)
    y_pred = np.asarray(y_pred, dtype=float).reshape(len(y_pred), -1)
    names = list(names) if names else [f"y{j}" for j in range(y_true.shape[1])]
    out = {"r2": {}, "mse": {}, "scatter": {}}
    for j, name in enumerate(names):
        out["r2"][name] = r2_score(y_true[:, j], y_pred[:, j])
        out["mse"][name] = float(np.mean((y_true[:, j] - y_pred[:, j]) ** 2))
        out["scatter"][name] = np.column_stack([y_true[:, j], y_pred[:, j]])
    return out


def evaluate(trained: TrainedRegressor, features: np.ndarray, targets: np.ndarray) -> dict:
    """Metrics in physical units on a held-out set."""
    return regression_metrics(targets, trained.predict(features), trained.target_names or None)


def grad_check(model: TransformerRegressor, x: np.ndarray, y: np.ndarray, n_checks: int = 200,
               step: float = 1e-5, rng: np.random.Generator | None = None) -> dict:
    """Compare backprop with central differences on random parameter entries.

    Dropout is disabled (eval mode). Returns the max relative error
    |analytic - numeric| / max(|analytic|, |numeric|, 1e-8) and the samples.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    pred, cache = model.forward(x, return_cache=True)
    _, dout = mse_loss(pred, y)
    grads = model.backward(dout, cache)
    names = list(model.params)
    sizes = np.array([model.params[n].size for n in names], dtype=float)
    errors, picks = [], []
    for _ in range(n_checks):
        name = names[rng.choice(len(names), p=sizes / sizes.sum())]
        arr = model.params[name]
        flat = int(rng.integers(arr.size))
        idx = np.unravel_index(flat, arr.shape)
        orig = arr[idx]
        arr[idx] = orig + step
        lp, _ = mse_loss(model.forward(x), y)
        arr[idx] = orig - step
        lm, _ = mse_loss(model.forward(x), y)
        arr[idx] = orig
        numeric = (lp - lm) / (2 * step)
        analytic = float(grads[name][idx])
        err = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-8)
        errors.append(err)
        picks.append((name, idx, analytic, numeric))
    return {"max_rel_error": float(max(errors)), "errors": errors, "checks": picks}
