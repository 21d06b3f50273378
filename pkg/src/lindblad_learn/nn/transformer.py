"""Transformer-encoder regressor in plain numpy with manual backprop.

Each observable channel becomes one token: its feature slice goes through
its own linear projection, then LayerNorm -> ReLU -> Dropout, plus a
learned positional embedding. The encoder layers are post-norm
(x = LN(x + MHA(x)); x = LN(x + FFN(x))). Tokens are mean-pooled and fed
to a ReLU MLP head with a linear output layer.

All arrays are float64.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

LN_EPS = 1e-5


@dataclass
class RegressorConfig:
    n_channels: int = 1
    n_features: int = 18  # per channel
    n_outputs: int = 1
    d_model: int = 128
    n_layers: int = 4
    n_heads: int = 8
    d_ff: int = 512
    mlp_head: tuple[int, ...] = (256, 128, 64)
    dropout: float = 0.1
    batch_size: int = 32
    lr: float = 1e-3
    weight_decay: float = 0.01
    betas: tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8
    plateau_factor: float = 0.5
    plateau_patience: int = 20
    early_stop_patience: int = 30
    max_epochs: int = 300
    grad_clip_norm: float = 1.0
    val_frac: float = 0.1
    seed: int = 0

    def __post_init__(self):
        self.mlp_head = tuple(int(x) for x in self.mlp_head)
        self.betas = tuple(float(b) for b in self.betas)
        if self.d_model % self.n_heads:
            raise ValueError(f"d_model={self.d_model} is not divisible by n_heads={self.n_heads}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")

    @property
    def input_dim(self) -> int:
        return self.n_channels * self.n_features

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mlp_head"] = list(self.mlp_head)
        d["betas"] = list(self.betas)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RegressorConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


def attention(Q: np.ndarray, K: np.ndarray, V: np.ndarray, d_k: int | None = None) -> np.ndarray:
    """softmax(Q K^T / sqrt(d_k)) V over the last two axes."""
    Q, K, V = (np.asarray(m, dtype=float) for m in (Q, K, V))
    if Q.shape[-1] != K.shape[-1] or K.shape[-2] != V.shape[-2]:
        raise ValueError(f"incompatible shapes Q{Q.shape} K{K.shape} V{V.shape}")
    d_k = Q.shape[-1] if d_k is None else d_k
    return softmax(Q @ np.swapaxes(K, -1, -2) / np.sqrt(d_k)) @ V


def softmax(s: np.ndarray) -> np.ndarray:
    e = np.exp(s - s.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def _ln_forward(x, g, b):
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    inv = 1.0 / np.sqrt((xc * xc).mean(axis=-1, keepdims=True) + LN_EPS)
    xhat = xc * inv
    return xhat * g + b, (xhat, inv, g)


def _ln_backward(dy, cache):
    xhat, inv, g = cache
    axes = tuple(range(dy.ndim - 1))
    dg = (dy * xhat).sum(axis=axes)
    db = dy.sum(axis=axes)
    dxhat = dy * g
    dx = inv * (dxhat - dxhat.mean(axis=-1, keepdims=True)
                - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True))
    return dx, dg, db


def _linear(x, W, b):
    shape = x.shape
    return (x.reshape(-1, shape[-1]) @ W + b).reshape(*shape[:-1], W.shape[1])


def _linear_backward(dy, x, W):
    x2 = x.reshape(-1, x.shape[-1])
    dy2 = dy.reshape(-1, dy.shape[-1])
    return (dy2 @ W.T).reshape(x.shape), x2.T @ dy2, dy2.sum(axis=0)


class TransformerRegressor:
    """Parameters live in ``self.params`` (name -> array)."""

    def __init__(self, config: RegressorConfig, rng: np.random.Generator | None = None,
                 params: dict[str, np.ndarray] | None = None):
        self.config = config
        if params is None:
            params = self._init_params(rng if rng is not None else np.random.default_rng(config.seed))
        self.params = params

    # -- parameters -------------------------------------------------------
    def _init_params(self, rng):
        c = self.config
        D, C, F = c.d_model, c.n_channels, c.n_features
        p = {}

        def uniform(shape, fan_in):
            bound = 1.0 / np.sqrt(fan_in)
            return rng.uniform(-bound, bound, size=shape)

        def xavier(fan_in, fan_out):
            bound = np.sqrt(6.0 / (fan_in + fan_out))
            return rng.uniform(-bound, bound, size=(fan_in, fan_out))

        p["proj.W"] = uniform((C, F, D), F)
        p["proj.b"] = uniform((C, D), F)
        p["proj_ln.g"] = np.ones(D)
        p["proj_ln.b"] = np.zeros(D)
        p["pos"] = rng.normal(0.0, 0.02, size=(C, D))
        for i in range(c.n_layers):
            pre = f"layer{i}."
            for name in ("q", "k", "v", "o"):
                p[pre + f"W{name}"] = xavier(D, D)
                p[pre + f"b{name}"] = np.zeros(D)
            p[pre + "ln1.g"] = np.ones(D)
            p[pre + "ln1.b"] = np.zeros(D)
            p[pre + "W1"] = uniform((D, c.d_ff), D)
            p[pre + "b1"] = uniform(c.d_ff, D)
            p[pre + "W2"] = uniform((c.d_ff, D), c.d_ff)
            p[pre + "b2"] = uniform(D, c.d_ff)
            p[pre + "ln2.g"] = np.ones(D)
            p[pre + "ln2.b"] = np.zeros(D)
        widths = (D, *c.mlp_head, c.n_outputs)
        for k, (fi, fo) in enumerate(zip(widths[:-1], widths[1:])):
            p[f"head{k}.W"] = uniform((fi, fo), fi)
            p[f"head{k}.b"] = uniform(fo, fi)
        return p

    @property
    def n_params(self) -> int:
        return sum(v.size for v in self.params.values())

    # -- forward / backward ----------------------------------------------
    def forward(self, x: np.ndarray, train: bool = False, rng: np.random.Generator | None = None,
                return_cache: bool = False):
        """Standardized features (B, C*F) -> standardized targets (B, n_outputs)."""
        c, p = self.config, self.params
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or x.shape[1] != c.input_dim:
            raise ValueError(f"expected input of shape (batch, {c.input_dim}), got {x.shape}")
        B, C, D, H = x.shape[0], c.n_channels, c.d_model, c.n_heads
        dk = D // H
        cache = {"x": x.reshape(B, C, c.n_features)}

        proj = np.einsum("bcf,cfd->bcd", cache["x"], p["proj.W"]) + p["proj.b"]
        ln, cache["proj_ln"] = _ln_forward(proj, p["proj_ln.g"], p["proj_ln.b"])
        act = np.maximum(ln, 0.0)
        cache["proj_relu"] = ln > 0
        if train and c.dropout > 0:
            mask = (rng.random(act.shape) >= c.dropout) / (1.0 - c.dropout)
            act = act * mask
            cache["drop"] = mask
        h = act + p["pos"]

        for i in range(c.n_layers):
            pre = f"layer{i}."
            lc = {"h_in": h}
            q = _linear(h, p[pre + "Wq"], p[pre + "bq"]).reshape(B, C, H, dk).transpose(0, 2, 1, 3)
            k = _linear(h, p[pre + "Wk"], p[pre + "bk"]).reshape(B, C, H, dk).transpose(0, 2, 1, 3)
            v = _linear(h, p[pre + "Wv"], p[pre + "bv"]).reshape(B, C, H, dk).transpose(0, 2, 1, 3)
            a = softmax(q @ k.transpose(0, 1, 3, 2) / np.sqrt(dk))
            o = (a @ v).transpose(0, 2, 1, 3).reshape(B, C, D)
            attn = _linear(o, p[pre + "Wo"], p[pre + "bo"])
            h1, lc["ln1"] = _ln_forward(h + attn, p[pre + "ln1.g"], p[pre + "ln1.b"])
            f1 = _linear(h1, p[pre + "W1"], p[pre + "b1"])
            f1r = np.maximum(f1, 0.0)
            f2 = _linear(f1r, p[pre + "W2"], p[pre + "b2"])
            h, lc["ln2"] = _ln_forward(h1 + f2, p[pre + "ln2.g"], p[pre + "ln2.b"])
            lc.update(q=q, k=k, v=v, a=a, o=o, h1=h1, f1r=f1r)
            cache[pre] = lc

        z = h.mean(axis=1)
        n_head = len(c.mlp_head) + 1
        zs = [z]
        for j in range(n_head):
            z = z @ p[f"head{j}.W"] + p[f"head{j}.b"]
            if j < n_head - 1:
                z = np.maximum(z, 0.0)
            zs.append(z)
        cache["head"] = zs
        return (z, cache) if return_cache else z

    def backward(self, dout: np.ndarray, cache: dict) -> dict[str, np.ndarray]:
        """Gradients of all parameters given dLoss/dOutput."""
        c, p = self.config, self.params
        B, C, D, H = dout.shape[0], c.n_channels, c.d_model, c.n_heads
        dk = D // H
        g = {}

        zs = cache["head"]
        n_head = len(c.mlp_head) + 1
        dz = dout
        for j in reversed(range(n_head)):
            if j < n_head - 1:
                dz = dz * (zs[j + 1] > 0)
            g[f"head{j}.W"] = zs[j].T @ dz
            g[f"head{j}.b"] = dz.sum(axis=0)
            dz = dz @ p[f"head{j}.W"].T

        dh = np.repeat(dz[:, None, :] / C, C, axis=1)

        for i in reversed(range(c.n_layers)):
            pre = f"layer{i}."
            lc = cache[pre]
            dr2, g[pre + "ln2.g"], g[pre + "ln2.b"] = _ln_backward(dh, lc["ln2"])
            df1r, g[pre + "W2"], g[pre + "b2"] = _linear_backward(dr2, lc["f1r"], p[pre + "W2"])
            df1 = df1r * (lc["f1r"] > 0)
            dh1, g[pre + "W1"], g[pre + "b1"] = _linear_backward(df1, lc["h1"], p[pre + "W1"])
            dh1 = dh1 + dr2
            dr1, g[pre + "ln1.g"], g[pre + "ln1.b"] = _ln_backward(dh1, lc["ln1"])
            do, g[pre + "Wo"], g[pre + "bo"] = _linear_backward(dr1, lc["o"], p[pre + "Wo"])
            do = do.reshape(B, C, H, dk).transpose(0, 2, 1, 3)
            a, q, k, v = lc["a"], lc["q"], lc["k"], lc["v"]
            da = do @ v.transpose(0, 1, 3, 2)
            dv = a.transpose(0, 1, 3, 2) @ do
            ds = a * (da - (da * a).sum(axis=-1, keepdims=True)) / np.sqrt(dk)
            dq = ds @ k
            dkk = ds.transpose(0, 1, 3, 2) @ q
            h_in = lc["h_in"]
            dh = dr1.copy()
            for name, dproj in (("q", dq), ("k", dkk), ("v", dv)):
                dproj = dproj.transpose(0, 2, 1, 3).reshape(B, C, D)
                dx, g[pre + f"W{name}"], g[pre + f"b{name}"] = _linear_backward(dproj, h_in, p[pre + f"W{name}"])
                dh += dx

        g["pos"] = dh.sum(axis=0)
        dact = dh * cache["drop"] if "drop" in cache else dh
        dln = dact * cache["proj_relu"]
        dproj, g["proj_ln.g"], g["proj_ln.b"] = _ln_backward(dln, cache["proj_ln"])
        g["proj.W"] = np.einsum("bcf,bcd->cfd", cache["x"], dproj)
        g["proj.b"] = dproj.sum(axis=0)
        return g

    def predict(self, x: np.ndarray, batch_size: int = 256) -> np.ndarray:
        """Eval-mode forward in chunks."""
        x = np.asarray(x, dtype=float)
        return np.concatenate([self.forward(x[i:i + batch_size]) for i in range(0, len(x), batch_size)]) \
            if len(x) else np.zeros((0, self.config.n_outputs))


def mse_loss(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean squared error over all entries and its gradient."""
    diff = pred - target
    return float(np.mean(diff * diff)), 2.0 * diff / diff.size
