"""Lindblad master-equation integration with time-dependent rates."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.linalg import expm

from .bernstein import BernsteinRate
from .errors import InvalidDimensionError, SimulationError
from .quantum import HERMITIAN_ATOL, is_hermitian

RETRACE_ATOL = 1e-12
SUPEROP_MAX_DIM = 4  # up to this dimension RK4 runs on vec(rho) with d^2 x d^2 matrices


@dataclass(frozen=True)
class JumpChannel:
    """Jump operator ``op`` with a non-negative rate function."""

    op: np.ndarray
    rate: BernsteinRate
    name: str = ""

    def gamma(self, t: float) -> float:
        return self.rate.scalar(t)


@dataclass(frozen=True)
class LindbladSystem:
    hamiltonian: np.ndarray
    channels: tuple[JumpChannel, ...] = ()

    def __post_init__(self):
        H = np.asarray(self.hamiltonian, dtype=complex)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise InvalidDimensionError(f"Hamiltonian must be square, got {H.shape}")
        if not is_hermitian(H, HERMITIAN_ATOL):
            raise ValueError("Hamiltonian is not Hermitian")
        for ch in self.channels:
            if ch.op.shape != H.shape:
                raise InvalidDimensionError(
                    f"jump operator {ch.name or '?'} has shape {ch.op.shape}, expected {H.shape}")
        object.__setattr__(self, "hamiltonian", H)
        object.__setattr__(self, "channels", tuple(self.channels))

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @property
    def is_time_independent(self) -> bool:
        return all(ch.rate.is_constant for ch in self.channels)


@dataclass
class Trajectory:
    """Observable time series on a uniform grid."""

    times: np.ndarray
    series: dict[str, np.ndarray]
    meta: dict = field(default_factory=dict)
    states: np.ndarray | None = None  # (M, d, d), only when requested


def _maybe_sparse(op: np.ndarray):
    """CSR copy of large, mostly-zero operators; dense otherwise."""
    d = op.shape[0]
    if d >= 16 and np.count_nonzero(op) <= 0.15 * d * d:
        return sparse.csr_matrix(op)
    return op


class _Generator:
    """Precomputed pieces of the Lindbladian.

    rhs(rho) = -i (K rho - rho K^dag) + sum_i g_i L_i rho L_i^dag,
    with K = H - (i/2) sum_i g_i L_i^dag L_i and rho Hermitian.
    """

    def __init__(self, system: LindbladSystem):
        self.channels = system.channels
        self.H = _maybe_sparse(system.hamiltonian)
        self.ops = [_maybe_sparse(ch.op) for ch in system.channels]
        self.ldl = [_maybe_sparse(ch.op.conj().T @ ch.op) for ch in system.channels]

    def __call__(self, rho: np.ndarray, t: float) -> np.ndarray:
        K_rho = self.H @ rho
        jumps = None
        for ch, L, ldl in zip(self.channels, self.ops, self.ldl):
            g = ch.gamma(t)
            if not g:
                continue
            K_rho = K_rho - (0.5j * g) * (ldl @ rho)
            # L rho L^dag = L (L rho^dag)^dag = L (L rho)^dag for Hermitian rho
            term = L @ (L @ rho).conj().T
            jumps = g * term if jumps is None else jumps + g * term
        # rho K^dag = (K rho)^dag
        out = -1j * (K_rho - K_rho.conj().T)
        if jumps is not None:
            out += jumps
        return out


class _MatrixStepper:
    """RK4 on the density matrix itself."""

    def __init__(self, system: LindbladSystem, times: np.ndarray, substeps: int):
        self.rhs = _Generator(system)
        self.times = times
        self.substeps = substeps

    def advance(self, rho: np.ndarray, k: int) -> np.ndarray:
        """Carry ``rho`` from times[k] to times[k + 1]."""
        rhs = self.rhs
        t = self.times[k]
        h = (self.times[k + 1] - t) / self.substeps
        for s in range(self.substeps):
            ts = t + s * h
            k1 = rhs(rho, ts)
            k2 = rhs(rho + 0.5 * h * k1, ts + 0.5 * h)
            k3 = rhs(rho + 0.5 * h * k2, ts + 0.5 * h)
            k4 = rhs(rho + h * k3, ts + h)
            rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return rho


class _SuperopStepper:
    """The same RK4 scheme written on vec(rho), for small systems.

    Each RK4 step of a linear ODE is a matrix. With constant rates it is
    I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24 and a recorded interval is one
    matrix power; otherwise the step matrices are built in one batch from the
    generators at all stage times.
    """

    def __init__(self, system: LindbladSystem, times: np.ndarray, substeps: int):
        self.d = d = system.dim
        L0 = _hamiltonian_superop(system.hamiltonian)
        D = np.array([_dissipator_superop(ch.op) for ch in system.channels]).reshape(-1, d * d, d * d)
        h = np.diff(times) / substeps
        self.constant = system.is_time_independent
        if self.constant:
            L = L0 + np.tensordot([ch.rate.coeffs[0] for ch in system.channels], D, axes=1)
            self._cache: dict[float, np.ndarray] = {}
            self._interval = [self._power(hk * L, substeps) for hk in h]
            return
        # stage times t_k + j h_k / 2, j = 0 .. 2 substeps
        stage_t = times[:-1, None] + 0.5 * h[:, None] * np.arange(2 * substeps + 1)
        stage_t = np.minimum(stage_t, times[-1])
        rates = np.array([ch.rate(stage_t.ravel()) for ch in system.channels])
        Ls = (L0 + np.tensordot(rates.T, D, axes=1)).reshape(h.size, 2 * substeps + 1, d * d, d * d)
        A, B, C = Ls[:, 0:-1:2], Ls[:, 1::2], Ls[:, 2::2]
        hh = h[:, None, None, None]
        # k1 = A v, k2 = K2 v, k3 = K3 v, k4 = K4 v
        K2 = B + 0.5 * hh * (B @ A)
        K3 = B + 0.5 * hh * (B @ K2)
        K4 = C + hh * (C @ K3)
        self._steps = (hh / 6.0) * (A + 2.0 * K2 + 2.0 * K3 + K4)

    def _power(self, hL: np.ndarray, substeps: int) -> np.ndarray:
        key = hL.tobytes()
        P = self._cache.get(key)
        if P is None:
            step = np.eye(hL.shape[0], dtype=complex)
            term = step
            for j in range(1, 5):
                term = term @ hL / j
                step = step + term
            P = self._cache[key] = np.linalg.matrix_power(step, substeps)
        return P

    def advance(self, rho: np.ndarray, k: int) -> np.ndarray:
        v = rho.reshape(-1)
        if self.constant:
            v = self._interval[k] @ v
        else:
            for S in self._steps[k]:
                v = v + S @ v
        return v.reshape(self.d, self.d)


def _hamiltonian_superop(H: np.ndarray) -> np.ndarray:
    # row-major vec: vec(A X B) = (A kron B^T) vec(X)
    eye = np.eye(H.shape[0])
    return -1j * (np.kron(H, eye) - np.kron(eye, H.T))


def _dissipator_superop(op: np.ndarray) -> np.ndarray:
    eye = np.eye(op.shape[0])
    ldl = op.conj().T @ op
    return np.kron(op, op.conj()) - 0.5 * np.kron(ldl, eye) - 0.5 * np.kron(eye, ldl.T)


def lindblad_rhs(system: LindbladSystem, rho: np.ndarray, t: float) -> np.ndarray:
    """Right-hand side of the Lindblad equation at time ``t``.

    Valid for arbitrary (not necessarily Hermitian) ``rho``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != system.hamiltonian.shape:
        raise InvalidDimensionError(f"rho has shape {rho.shape}, expected {system.hamiltonian.shape}")
    H = system.hamiltonian
    out = -1j * (H @ rho - rho @ H)
    for ch in system.channels:
        g = ch.gamma(t)
        L = ch.op
        Ld = L.conj().T
        LdL = Ld @ L
        out += g * (L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL))
    return out


def _observable_stack(observables: dict[str, np.ndarray], dim: int) -> tuple[list[str], np.ndarray]:
    names = list(observables)
    stack = np.empty((len(names), dim, dim), dtype=complex)
    for k, name in enumerate(names):
        obs = np.asarray(observables[name], dtype=complex)
        if obs.shape != (dim, dim):
            raise InvalidDimensionError(f"observable {name!r} has shape {obs.shape}")
        if not is_hermitian(obs, HERMITIAN_ATOL):
            raise ValueError(f"observable {name!r} is not Hermitian")
        stack[k] = obs
    # Tr(O rho) = sum_ij O_ij rho_ji; transposing O once makes it an elementwise sum
    return names, np.ascontiguousarray(stack.transpose(0, 2, 1))


def _check_grid(times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise ValueError("time grid needs at least two points")
    steps = np.diff(times)
    if np.any(steps <= 0) or np.max(np.abs(steps - steps[0])) > 1e-9 * max(1.0, abs(times[-1])):
        raise ValueError("time grid must be uniform and increasing")
    return times


def evolve(system: LindbladSystem, rho0: np.ndarray, times, observables: dict[str, np.ndarray],
           substeps: int = 10, record_states: bool = False) -> Trajectory:
    """Integrate with fixed-step RK4 and record observables on ``times``.

    ``substeps`` RK4 steps are taken per recorded interval. After each
    recorded step the state is re-Hermitized and, if its trace drifted by
    more than 1e-12, renormalized.
    """
    times = _check_grid(times)
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    rho = np.array(rho0, dtype=complex)
    if rho.shape != (system.dim, system.dim):
        raise InvalidDimensionError(f"rho0 has shape {rho.shape}, expected {(system.dim,) * 2}")
    names, obs_t = _observable_stack(observables, system.dim)
    stepper_cls = _SuperopStepper if system.dim <= SUPEROP_MAX_DIM else _MatrixStepper
    stepper = stepper_cls(system, times, substeps)

    M = times.size
    values = np.empty((len(names), M))
    states = np.empty((M, system.dim, system.dim), dtype=complex) if record_states else None

    def record(k, rho):
        values[:, k] = np.einsum("kij,ij->k", obs_t, rho).real
        if states is not None:
            states[k] = rho

    record(0, rho)
    for k in range(1, M):
        with np.errstate(over="ignore", invalid="ignore"):
            rho = stepper.advance(rho, k - 1)
        rho = 0.5 * (rho + rho.conj().T)
        tr = np.trace(rho).real
        if not (np.all(np.isfinite(rho)) and tr > 0):
            raise SimulationError(f"integration diverged at t={times[k]:.6g}", time=float(times[k]))
        if abs(tr - 1.0) > RETRACE_ATOL:
            rho = rho / tr
        record(k, rho)

    series = {name: values[i].copy() for i, name in enumerate(names)}
    return Trajectory(times=times, series=series, states=states)


def liouvillian(system: LindbladSystem) -> np.ndarray:
    """d^2 x d^2 generator acting on row-major vec(rho); constant rates only."""
    if not system.is_time_independent:
        raise ValueError("the Liouvillian matrix requires constant (degree-0) rates")
    L = _hamiltonian_superop(system.hamiltonian)
    for ch in system.channels:
        L += ch.rate.coeffs[0] * _dissipator_superop(ch.op)
    return L


def superoperator_propagate(system: LindbladSystem, rho0: np.ndarray, times,
                            observables: dict[str, np.ndarray]) -> Trajectory:
    """Exact propagation with one matrix exponential per grid step."""
    times = _check_grid(times)
    d = system.dim
    names, obs_t = _observable_stack(observables, d)
    propagator = expm(liouvillian(system) * (times[1] - times[0]))
    v = np.asarray(rho0, dtype=complex).reshape(-1)
    values = np.empty((len(names), times.size))
    for k in range(times.size):
        if k:
            v = propagator @ v
        values[:, k] = np.einsum("kij,ij->k", obs_t, v.reshape(d, d)).real
    return Trajectory(times=times, series={n: values[i].copy() for i, n in enumerate(names)})
