"""Analytic recovery of dissipation rates from observable time series.

Single qubit, H = sigma_z:

* one channel (sigma_-):  gamma = -d<sz>/dt / (1 + <sz>)
* two channels (sigma_+, sigma_-): with c = (<sx> - i<sy>)/2 = rho_01,
    d<sz>/dt = g_plus (1 - <sz>) - g_minus (1 + <sz>)
    g_plus + g_minus = -2 d/dt ln|c|

Jaynes-Cummings (qubit (x) photon, H = wc a^dag a + wq/2 sz + g(s+ a + s- a^dag)):

    d<sx>/dt = -wq <sy> + i g <(a - a^dag) sz> - gamma/2 <sx>
    d<sy>/dt =  wq <sx> - g <(a + a^dag) sz>   - gamma/2 <sy>
    d<sz>/dt =  4 g Im<a s+>                   - gamma (1 + <sz>)
    d<n>/dt  = -2 g Im<a s+>                   - kappa <n>

Derivatives are central differences on interior grid points.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bernstein import BernsteinRate
from .models import DEFAULT_FOCK_DIM, jc_operators
from .simulate import Trajectory

MIN_DENOMINATOR = 1e-3
MIN_COHERENCE = 1e-3
MAX_CONDITION = 1e6

# interior central-difference stencils: order -> (half width, weights for offsets -w..w)
_STENCILS = {
    2: (1, np.array([-0.5, 0.0, 0.5])),
    4: (2, np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0),
}


@dataclass
class RateEstimate:
    times: np.ndarray
    values: np.ndarray
    valid: np.ndarray
    underdetermined: bool = False
    label: str = ""

    def max_rel_error(self, truth) -> float:
        """Largest |estimate/truth - 1| over valid points (nan if none are valid)."""
        truth = np.broadcast_to(np.asarray(truth, dtype=float), self.values.shape)
        if not self.valid.any():
            return float("nan")
        return float(np.max(np.abs(self.values[self.valid] / truth[self.valid] - 1.0)))


def central_diff(y, times, order: int = 4) -> tuple[np.ndarray, np.ndarray, slice]:
    """Derivative on interior points; returns (interior times, dy/dt, interior slice)."""
    y = np.asarray(y)
    times = np.asarray(times, dtype=float)
    try:
        w, weights = _STENCILS[order]
    except KeyError:
        raise ValueError(f"unsupported difference order {order}; use 2 or 4") from None
    if y.shape[0] < 2 * w + 1:
        raise ValueError(f"series of length {y.shape[0]} is too short for order-{order} differences")
    h = times[1] - times[0]
    n = y.shape[0]
    dy = sum(c * y[w + s: n - w + s] for s, c in zip(range(-w, w + 1), weights) if c) / h
    inner = slice(w, n - w)
    return times[inner], dy, inner


def _check_length(*series):
    for s in series:
        if len(s) < 3:
            raise ValueError("need at least 3 samples to differentiate")


def invert_theorem1(sz, times, order: int = 4, min_denominator: float = MIN_DENOMINATOR) -> RateEstimate:
    """gamma(t) from <sigma_z(t)> of the single-channel decay model.

    Points with 1 + <sz> below ``min_denominator`` are marked invalid.
    """
    sz = np.asarray(sz, dtype=float)
    _check_length(sz)
    order = order if len(sz) >= 5 else 2
    t, dz, inner = central_diff(sz, times, order)
    denom = 1.0 + sz[inner]
    valid = denom >= min_denominator
    values = np.where(valid, -dz / np.where(valid, denom, 1.0), np.nan)
    return RateEstimate(t, values, valid, label="gamma_minus")


def invert_theorem2(sx, sy, sz, times, order: int = 4, min_coherence: float = MIN_COHERENCE,
                    max_condition: float = MAX_CONDITION) -> tuple[RateEstimate, RateEstimate]:
    """(gamma_plus(t), gamma_minus(t)) from all three Pauli series.

    The rate sum comes from the decay of |rho_01|; combined with the sigma_z
    balance this is a 2x2 linear system per time point. Points with
    |rho_01| < ``min_coherence`` or a condition number above
    ``max_condition`` are invalid. If no point is valid both estimates are
    flagged ``underdetermined`` (the sigma_z balance alone cannot separate
    the two rates).
    """
    sx, sy, sz = (np.asarray(s, dtype=float) for s in (sx, sy, sz))
    _check_length(sx, sy, sz)
    order = order if len(sz) >= 5 else 2
    coh = 0.5 * np.hypot(sx, sy)
    log_coh = np.log(np.maximum(coh, np.finfo(float).tiny))
    t, dlog, inner = central_diff(log_coh, times, order)
    _, dz, _ = central_diff(sz, times, order)
    z = sz[inner]
    rate_sum = -2.0 * dlog

    n = len(t)
    gp = np.full(n, np.nan)
    gm = np.full(n, np.nan)
    valid = coh[inner] >= min_coherence
    # rows: sigma_z balance, rate sum
    A = np.empty((n, 2, 2))
    A[:, 0, 0] = 1.0 - z
    A[:, 0, 1] = -(1.0 + z)
    A[:, 1, :] = 1.0
    cond = np.linalg.cond(A)
    valid &= cond <= max_condition
    if valid.any():
        rhs = np.stack([dz[valid], rate_sum[valid]], axis=-1)[..., None]
        sol = np.linalg.solve(A[valid], rhs)[..., 0]
        gp[valid] = sol[:, 0]
        gm[valid] = sol[:, 1]
    under = not valid.any()
    return (RateEstimate(t, gp, valid.copy(), under, "gamma_plus"),
            RateEstimate(t, gm, valid.copy(), under, "gamma_minus"))


def gamma_minus_closed_form(sx, sy, sz, times, order: int = 4) -> RateEstimate:
    """Alternative explicit gamma_minus(t) in terms of the Pauli series and
    their derivatives (real part of a complex expression).

    It coincides with the linear-system estimate only when gamma_plus = 0;
    in general its real part equals gamma_minus + gamma_plus (1+z)/(2+z).
    """
    sx, sy, sz = (np.asarray(s, dtype=float) for s in (sx, sy, sz))
    _check_length(sx, sy, sz)
    t, dx, inner = central_diff(sx, times, order)
    _, dy, _ = central_diff(sy, times, order)
    _, dz, _ = central_diff(sz, times, order)
    x, y, z = sx[inner], sy[inner], sz[inner]
    num = (4 * x * z - 1j * x * dz - 4j * y * z - y * dz
           - 2j * z * dx - 2 * z * dy - 6j * dx - 6 * dy)
    den = 2j * x * z + 4j * x + 2 * y * z + 4 * y
    valid = np.abs(den) >= MIN_DENOMINATOR
    values = np.where(valid, (num / np.where(valid, den, 1.0)).real, np.nan)
    return RateEstimate(t, values, valid, label="gamma_minus")


# -- Jaynes-Cummings --------------------------------------------------------

JC_EQUATIONS = ("sx", "sy", "sz", "n_phot")
_JC_REQUIRED = ("sx", "sy", "sz", "n_phot", "x_sz")


@dataclass
class JCResiduals:
    """Per-equation residual norms on interior points (None if not computable)."""

    max: dict[str, float | None] = field(default_factory=dict)
    rms: dict[str, float | None] = field(default_factory=dict)
    series: dict[str, np.ndarray] = field(default_factory=dict)
    times: np.ndarray | None = None

    @property
    def overall_max(self) -> float:
        return max(v for v in self.max.values() if v is not None)


def jc_cross_terms(states: np.ndarray, fock_dim: int | None = None) -> dict[str, np.ndarray]:
    """State-dependent expectation values needed by the JC equations.

    Returns ``i_a_minus_ad_sz`` = Re i<(a - a^dag) sz> and ``im_a_sp`` = Im<a s+>.
    """
    d = states.shape[-1]
    fock_dim = fock_dim or d // 2
    ops = jc_operators(fock_dim)
    a_sp = ops["a"] @ ops["sp"]
    a_minus_ad_sz = (ops["a"] - ops["ad"]) @ ops["sz"]
    ev = lambda op: np.einsum("ij,kji->k", op, states)  # noqa: E731
    return {"i_a_minus_ad_sz": (1j * ev(a_minus_ad_sz)).real, "im_a_sp": ev(a_sp).imag}


def jc_residuals(traj: Trajectory, params: dict, gamma: BernsteinRate, kappa: BernsteinRate,
                 states: np.ndarray | None = None, order: int = 4) -> JCResiduals:
    """Residuals of the four JC Heisenberg equations under candidate rates.

    The sigma_y equation needs only the recorded series (<(a+a^dag) sz> =
    sqrt(2) <x_sz>); the others need the state-dependent cross terms, taken
    from ``states`` (falling back to ``traj.states``). Without states only
    the sigma_y equation and the excitation balance
    d<sz>/dt + 2 d<n>/dt = -gamma (1+<sz>) - 2 kappa <n> are evaluated.
    """
    missing = [k for k in _JC_REQUIRED if k not in traj.series]
    if missing:
        raise ValueError(f"trajectory is missing series {missing}")
    states = states if states is not None else traj.states
    s = {k: np.asarray(traj.series[k], dtype=float) for k in _JC_REQUIRED}
    times = np.asarray(traj.times, dtype=float)
    t, _, inner = central_diff(s["sz"], times, order)
    d = {k: central_diff(s[k], times, order)[1] for k in JC_EQUATIONS}
    v = {k: s[k][inner] for k in _JC_REQUIRED}
    g_t = gamma(t)
    k_t = kappa(t)
    wq, g = float(params["omega_q"]), float(params["g"])

    res = {
        "sy": d["sy"] - (wq * v["sx"] - g * np.sqrt(2.0) * v["x_sz"] - 0.5 * g_t * v["sy"]),
        "excitation": d["sz"] + 2 * d["n_phot"] - (-g_t * (1 + v["sz"]) - 2 * k_t * v["n_phot"]),
    }
    if states is not None:
        cross = {k: val[inner] for k, val in jc_cross_terms(np.asarray(states)).items()}
        res["sx"] = d["sx"] - (-wq * v["sy"] + g * cross["i_a_minus_ad_sz"] - 0.5 * g_t * v["sx"])
        res["sz"] = d["sz"] - (4 * g * cross["im_a_sp"] - g_t * (1 + v["sz"]))
        res["n_phot"] = d["n_phot"] - (-2 * g * cross["im_a_sp"] - k_t * v["n_phot"])
    out = JCResiduals(times=t)
    for name in ("sx", "sy", "sz", "n_phot", "excitation"):
        r = res.get(name)
        out.max[name] = None if r is None else float(np.max(np.abs(r)))
        out.rms[name] = None if r is None else float(np.sqrt(np.mean(r * r)))
        if r is not None:
            out.series[name] = r
    return out


def invert_jc(traj: Trajectory, params: dict, states: np.ndarray | None = None,
              order: int = 4, min_denominator: float = MIN_DENOMINATOR) -> tuple[RateEstimate, RateEstimate]:
    """(kappa(t), gamma(t)) solved pointwise from the <n> and <sz> equations.

    Needs the simulator's density matrices for the cross term Im<a s+>.
    """
    states = states if states is not None else traj.states
    if states is None:
        raise ValueError("JC inversion needs the state history (evolve with record_states=True)")
    times = np.asarray(traj.times, dtype=float)
    n_ph = np.asarray(traj.series["n_phot"], dtype=float)
    sz = np.asarray(traj.series["sz"], dtype=float)
    t, dn, inner = central_diff(n_ph, times, order)
    _, dz, _ = central_diff(sz, times, order)
    im = jc_cross_terms(np.asarray(states))["im_a_sp"][inner]
    g = float(params["g"])
    n_in, z_in = n_ph[inner], 1.0 + sz[inner]
    k_ok = n_in >= min_denominator
    g_ok = z_in >= min_denominator
    kappa = np.where(k_ok, -(dn + 2 * g * im) / np.where(k_ok, n_in, 1.0), np.nan)
    gamma = np.where(g_ok, -(dz - 4 * g * im) / np.where(g_ok, z_in, 1.0), np.nan)
    return RateEstimate(t, kappa, k_ok, label="kappa"), RateEstimate(t, gamma, g_ok, label="gamma")


__all__ = [
    "DEFAULT_FOCK_DIM", "JCResiduals", "RateEstimate", "central_diff", "gamma_minus_closed_form",
    "invert_jc", "invert_theorem1", "invert_theorem2", "jc_cross_terms", "jc_residuals",
]
