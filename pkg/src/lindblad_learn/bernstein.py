"""Bernstein-polynomial rate functions.

A rate is stored as non-negative coefficients a_0..a_n over a time window
``t_span`` that is mapped affinely onto [0, 1]; with a_j >= 0 the rate is
non-negative everywhere on the window.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_DEGREE = 20
# Evaluation points this far outside the window (relative to its length)
# are clamped instead of rejected; RK4 stage times land on the endpoints.
_SPAN_SLACK = 1e-12


def binomial(n: int, k: int) -> int:
    """C(n, k) by the multiplicative recurrence (exact in integer arithmetic)."""
    if k < 0 or k > n:
        return 0
    k = min(k, n - k)
    c = 1
    for i in range(1, k + 1):
        c = c * (n - k + i) // i
    return c


def basis_eval(j: int, n: int, t):
    """Evaluate b_{j,n}(t) = C(n,j) t^j (1-t)^(n-j) for t in [0, 1]."""
    if not 0 <= n <= MAX_DEGREE:
        raise ValueError(f"degree must be in [0, {MAX_DEGREE}], got {n}")
    if not 0 <= j <= n:
        raise ValueError(f"basis index {j} out of range for degree {n}")
    t_arr = np.asarray(t, dtype=float)
    if np.any((t_arr < 0.0) | (t_arr > 1.0)) or np.any(np.isnan(t_arr)):
        raise ValueError("Bernstein basis is defined on [0, 1] only")
    out = binomial(n, j) * t_arr**j * (1.0 - t_arr) ** (n - j)
    return float(out) if np.ndim(out) == 0 else out


def basis_matrix(n: int, t) -> np.ndarray:
    """Rows are points, columns are b_{0,n}..b_{n,n}."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    return np.stack([basis_eval(j, n, t_arr) for j in range(n + 1)], axis=-1)


@dataclass(frozen=True)
class BernsteinRate:
    """Non-negative rate gamma(t) = sum_j a_j b_{j,n}(tau(t))."""

    coeffs: tuple[float, ...]
    t_span: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        t0, t1 = (float(x) for x in self.t_span)
        if not coeffs:
            raise ValueError("at least one coefficient is required")
        if len(coeffs) - 1 > MAX_DEGREE:
            raise ValueError(f"degree capped at {MAX_DEGREE}")
        if any(c < 0 or not np.isfinite(c) for c in coeffs):
            raise ValueError(f"coefficients must be finite and non-negative: {coeffs}")
        if not t1 > t0:
            raise ValueError(f"empty time window {self.t_span}")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "t_span", (t0, t1))

    @classmethod
    def constant(cls, value: float, t_span=(0.0, 1.0)) -> "BernsteinRate":
        return cls((value,), t_span)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    def to_unit(self, t):
        t0, t1 = self.t_span
        tau = (np.asarray(t, dtype=float) - t0) / (t1 - t0)
        if np.any(tau < -_SPAN_SLACK) or np.any(tau > 1.0 + _SPAN_SLACK) or np.any(np.isnan(tau)):
            raise ValueError(f"time outside the rate window {self.t_span}")
        return np.clip(tau, 0.0, 1.0)

    def __call__(self, t):
        return rate_eval(self, t)

    def scalar(self, t: float) -> float:
        """Fast evaluation at a single time (used inside the integrator)."""
        t0, t1 = self.t_span
        tau = (t - t0) / (t1 - t0)
        if not -_SPAN_SLACK <= tau <= 1.0 + _SPAN_SLACK:
            raise ValueError(f"time {t} outside the rate window {self.t_span}")
        tau = min(max(tau, 0.0), 1.0)
        n = len(self.coeffs) - 1
        if n == 0:
            return self.coeffs[0]
        # de Casteljau: stable, no binomials needed
        b = list(self.coeffs)
        for r in range(n):
            for j in range(n - r):
                b[j] = (1.0 - tau) * b[j] + tau * b[j + 1]
        return b[0]

    def integral(self, t):
        """Closed-form integral of the rate from t_span[0] to t.

        Uses int_0^tau b_{j,n} = (1/(n+1)) sum_{k>j} b_{k,n+1}(tau).
        """
        tau = self.to_unit(t)
        n = self.degree
        up = basis_matrix(n + 1, tau)
        # tail[j] = sum_{k=j+1}^{n+1} b_{k,n+1}
        tail = np.cumsum(up[..., ::-1], axis=-1)[..., ::-1][..., 1:]
        scale = (self.t_span[1] - self.t_span[0]) / (n + 1)
        out = scale * tail @ np.asarray(self.coeffs)
        return float(out[0]) if np.ndim(t) == 0 else out

    def to_dict(self) -> dict:
        return {"degree": self.degree, "coeffs": list(self.coeffs), "t_span": list(self.t_span)}

    @classmethod
    def from_dict(cls, d: dict) -> "BernsteinRate":
        rate = cls(tuple(d["coeffs"]), tuple(d["t_span"]))
        if "degree" in d and int(d["degree"]) != rate.degree:
            raise ValueError("degree does not match number of coefficients")
        return rate


def rate_eval(rate: BernsteinRate, t):
    """Evaluate a Bernstein rate at time(s) ``t`` inside its window."""
    tau = rate.to_unit(t)
    n = rate.degree
    if n == 0:
        out = np.full(np.shape(tau), rate.coeffs[0])
    else:
        out = basis_matrix(n, tau) @ np.asarray(rate.coeffs)
        out = out.reshape(np.shape(tau))
    return float(out) if np.ndim(out) == 0 else out


def sample_rate(n: int, lo: float, hi: float, rng: np.random.Generator,
                t_span=(0.0, 1.0)) -> BernsteinRate:
    """Degree-``n`` rate with coefficients i.i.d. uniform on the open interval (lo, hi)."""
    if not 0 <= lo < hi:
        raise ValueError(f"need 0 <= lo < hi, got ({lo}, {hi})")
    return BernsteinRate(tuple(uniform_open(lo, hi, rng) for _ in range(n + 1)), t_span)


def uniform_open(lo: float, hi: float, rng: np.random.Generator) -> float:
    """Uniform draw on (lo, hi); redraws the measure-zero endpoint ``lo``."""
    while True:
        x = float(rng.uniform(lo, hi))
        if lo < x < hi:
            return x
