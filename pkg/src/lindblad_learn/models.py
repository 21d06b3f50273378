"""The seven benchmark systems: Hamiltonians, channels, initial states, observables.

Every model is identified by its CLI string (``sq-const``, ``jc`` ...).
Sampling draws parameters in a fixed order from the given generator, so a
seed fully determines an instance.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .bernstein import BernsteinRate, uniform_open
from .quantum import basis_state, density_matrix, embed, haar_random_pure, kron, ladder, pauli
from .simulate import JumpChannel, LindbladSystem

N_TIMES = 100
DEFAULT_FOCK_DIM = 21


class ModelId(str, Enum):
    SQ_CONST = "sq-const"
    SQ_CONST_TWO = "sq-const-two"
    SQ_TD = "sq-td"
    SQ_TD_TWO = "sq-td-two"
    HEISENBERG = "heisenberg"
    ISING = "ising"
    JC = "jc"


def _bern_names(prefix):
    return [f"{prefix}_{j}" for j in range(3)]


@dataclass(frozen=True)
class ModelSpec:
    id: ModelId
    dim: int
    t_span: tuple[float, float]
    observables: tuple[str, ...]
    targets: tuple[str, ...]
    feature_set: str
    n_times: int = N_TIMES
    fock_dim: int = DEFAULT_FOCK_DIM

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_span[0], self.t_span[1], self.n_times)

    @property
    def n_targets(self) -> int:
        return len(self.targets)


_TWO_QUBIT_OBS = ("sx1", "sy1", "sz1", "sx2", "sy2", "sz2")
_TWO_QUBIT_TARGETS = ("gamma_plus_1", "gamma_minus_1", "gamma_plus_2", "gamma_minus_2")

_SPECS = {
    ModelId.SQ_CONST: ModelSpec(ModelId.SQ_CONST, 2, (0.0, 10.0), ("sz",), ("gamma_minus",), "f18"),
    ModelId.SQ_CONST_TWO: ModelSpec(ModelId.SQ_CONST_TWO, 2, (0.0, 10.0), ("sx", "sy", "sz"),
                                    ("gamma_plus", "gamma_minus"), "f10"),
    ModelId.SQ_TD: ModelSpec(ModelId.SQ_TD, 2, (0.0, 10.0), ("sz",), tuple(_bern_names("gamma_minus")), "f18"),
    ModelId.SQ_TD_TWO: ModelSpec(ModelId.SQ_TD_TWO, 2, (0.0, 10.0), ("sx", "sy", "sz"),
                                 tuple(_bern_names("gamma_plus") + _bern_names("gamma_minus")), "f18"),
    ModelId.HEISENBERG: ModelSpec(ModelId.HEISENBERG, 4, (0.0, 1.0), _TWO_QUBIT_OBS, _TWO_QUBIT_TARGETS, "f10"),
    ModelId.ISING: ModelSpec(ModelId.ISING, 4, (0.0, 1.0), _TWO_QUBIT_OBS, _TWO_QUBIT_TARGETS, "f10"),
    ModelId.JC: ModelSpec(ModelId.JC, 2 * DEFAULT_FOCK_DIM, (0.0, 10.0), ("sx", "sy", "sz", "n_phot", "x_sz"),
                          tuple(_bern_names("kappa") + _bern_names("gamma")), "f18"),
}

# Open sampling intervals per model parameter.
RANGES = {
    "sq_const_rate": (0.0, 2.0),
    "sq_td_coeff": (0.1, 2.0),
    "heisenberg_J": (0.0, 2.0),
    "ising_J": (0.1, 2.0),
    "ising_h": (0.1, 2.0),
    "two_qubit_rate": (0.1, 2.0),
    "jc_omega": (0.8, 1.2),
    "jc_g": (0.01, 0.1),
    "jc_coeff": (0.01, 0.2),
    "jc_n": (1, 10),
}


def get_spec(model) -> ModelSpec:
    """Look up a model by ``ModelId`` or its string value."""
    try:
        return _SPECS[ModelId(model)]
    except ValueError:
        valid = ", ".join(m.value for m in ModelId)
        raise ValueError(f"unknown model {model!r}; expected one of: {valid}") from None


def all_specs() -> list[ModelSpec]:
    return [_SPECS[m] for m in ModelId]


@dataclass
class Instance:
    """One sampled system with its ground-truth targets."""

    system: LindbladSystem
    rho0: np.ndarray
    targets: dict[str, float]
    params: dict
    observables: dict[str, np.ndarray]


def qubit_observables() -> dict[str, np.ndarray]:
    return {"sx": pauli("X"), "sy": pauli("Y"), "sz": pauli("Z")}


def two_qubit_observables() -> dict[str, np.ndarray]:
    out = {}
    for j in (1, 2):
        for s in "xyz":
            out[f"s{s}{j}"] = embed(pauli(s.upper()), j - 1, [2, 2])
    return out


def jc_operators(fock_dim: int = DEFAULT_FOCK_DIM) -> dict[str, np.ndarray]:
    """Operators on qubit (x) photon space, qubit factor first."""
    dims = [2, fock_dim]
    a = embed(ladder(fock_dim, "lower"), 1, dims)
    ops = {
        "a": a,
        "ad": a.conj().T,
        "n": embed(ladder(fock_dim, "number"), 1, dims),
        "sm": embed(pauli("Minus"), 0, dims),
        "sp": embed(pauli("Plus"), 0, dims),
        "sz": embed(pauli("Z"), 0, dims),
    }
    ops["x_photon"] = (a + ops["ad"]) / np.sqrt(2.0)
    return ops


def jc_observables(fock_dim: int = DEFAULT_FOCK_DIM) -> dict[str, np.ndarray]:
    ops = jc_operators(fock_dim)
    dims = [2, fock_dim]
    return {
        "sx": embed(pauli("X"), 0, dims),
        "sy": embed(pauli("Y"), 0, dims),
        "sz": ops["sz"],
        "n_phot": ops["n"],
        "x_sz": ops["x_photon"] @ ops["sz"],
    }


def jc_hamiltonian(omega_c: float, omega_q: float, g: float, fock_dim: int = DEFAULT_FOCK_DIM) -> np.ndarray:
    ops = jc_operators(fock_dim)
    return (omega_c * ops["n"] + 0.5 * omega_q * ops["sz"]
            + g * (ops["sp"] @ ops["a"] + ops["sm"] @ ops["ad"]))


def observables_for(spec: ModelSpec) -> dict[str, np.ndarray]:
    if spec.id in (ModelId.HEISENBERG, ModelId.ISING):
        obs = two_qubit_observables()
    elif spec.id is ModelId.JC:
        obs = jc_observables(spec.fock_dim)
    else:
        obs = qubit_observables()
    return {name: obs[name] for name in spec.observables}


def _draw(key, overrides, name, rng):
    """Sample ``name`` from RANGES[key] unless overridden; always consumes the draw."""
    value = uniform_open(*RANGES[key], rng)
    return float(overrides.get(name, value))


def _bernstein(prefix, key, overrides, rng, t_span, degree=2):
    coeffs = [_draw(key, overrides, f"{prefix}_{j}", rng) for j in range(degree + 1)]
    return BernsteinRate(tuple(coeffs), t_span)


def instantiate(spec: ModelSpec, rng: np.random.Generator, overrides: dict | None = None,
                jc_qubit_init: str = "haar") -> Instance:
    """Sample one instance of ``spec``.

    ``overrides`` replaces sampled values by name (targets such as
    ``gamma_minus`` or physics parameters such as ``J``, ``g``, ``n``).
    All random draws still happen so that the remaining values match the
    un-overridden instance for the same generator state.
    ``jc_qubit_init`` selects the JC qubit state: ``"haar"`` or ``"ground"``.
    """
    ov = dict(overrides or {})
    unknown = set(ov) - set(spec.targets) - {"J", "h", "omega_c", "omega_q", "g", "n"}
    if unknown:
        raise ValueError(f"unknown override(s) for {spec.id.value}: {sorted(unknown)}")
    span = spec.t_span
    sz, sm, sp = pauli("Z"), pauli("Minus"), pauli("Plus")
    params: dict = {}
    targets: dict[str, float] = {}
    mid = spec.id

    if mid in (ModelId.SQ_CONST, ModelId.SQ_CONST_TWO, ModelId.SQ_TD, ModelId.SQ_TD_TWO):
        channels = []
        if mid is ModelId.SQ_CONST:
            g = _draw("sq_const_rate", ov, "gamma_minus", rng)
            channels.append(JumpChannel(sm, BernsteinRate.constant(g, span), "sigma_minus"))
            targets["gamma_minus"] = g
        elif mid is ModelId.SQ_CONST_TWO:
            gp = _draw("sq_const_rate", ov, "gamma_plus", rng)
            gm = _draw("sq_const_rate", ov, "gamma_minus", rng)
            channels += [JumpChannel(sp, BernsteinRate.constant(gp, span), "sigma_plus"),
                         JumpChannel(sm, BernsteinRate.constant(gm, span), "sigma_minus")]
            targets.update(gamma_plus=gp, gamma_minus=gm)
        else:
            if mid is ModelId.SQ_TD_TWO:
                rp = _bernstein("gamma_plus", "sq_td_coeff", ov, rng, span)
                channels.append(JumpChannel(sp, rp, "sigma_plus"))
                targets.update(zip(_bern_names("gamma_plus"), rp.coeffs))
            rm = _bernstein("gamma_minus", "sq_td_coeff", ov, rng, span)
            channels.append(JumpChannel(sm, rm, "sigma_minus"))
            targets.update(zip(_bern_names("gamma_minus"), rm.coeffs))
        if mid in (ModelId.SQ_CONST, ModelId.SQ_TD):
            psi0 = basis_state(2, 0)
        else:
            psi0 = haar_random_pure(2, rng)
        system = LindbladSystem(sz, tuple(channels))

    elif mid in (ModelId.HEISENBERG, ModelId.ISING):
        obs = two_qubit_observables()
        if mid is ModelId.HEISENBERG:
            J = _draw("heisenberg_J", ov, "J", rng)
            H = J * sum(kron(pauli(s), pauli(s)) for s in "XYZ")
            params["J"] = J
        else:
            J = _draw("ising_J", ov, "J", rng)
            h = _draw("ising_h", ov, "h", rng)
            H = J * kron(sz, sz) + h * (obs["sx1"] + obs["sx2"])
            params.update(J=J, h=h)
        channels = []
        for j in (1, 2):
            gp = _draw("two_qubit_rate", ov, f"gamma_plus_{j}", rng)
            gm = _draw("two_qubit_rate", ov, f"gamma_minus_{j}", rng)
            channels += [JumpChannel(embed(sp, j - 1, [2, 2]), BernsteinRate.constant(gp, span), f"sigma_plus_{j}"),
                         JumpChannel(embed(sm, j - 1, [2, 2]), BernsteinRate.constant(gm, span), f"sigma_minus_{j}")]
            targets.update({f"gamma_plus_{j}": gp, f"gamma_minus_{j}": gm})
        psi0 = kron(haar_random_pure(2, rng)[:, None], haar_random_pure(2, rng)[:, None])[:, 0]
        system = LindbladSystem(H, tuple(channels))

    elif mid is ModelId.JC:
        omega_c = _draw("jc_omega", ov, "omega_c", rng)
        omega_q = _draw("jc_omega", ov, "omega_q", rng)
        g = _draw("jc_g", ov, "g", rng)
        lo, hi = RANGES["jc_n"]
        n = int(ov.get("n", rng.integers(lo, hi + 1)))
        if not 0 <= n < spec.fock_dim:
            raise ValueError(f"photon number {n} does not fit in Fock dimension {spec.fock_dim}")
        kappa = _bernstein("kappa", "jc_coeff", ov, rng, span)
        gamma = _bernstein("gamma", "jc_coeff", ov, rng, span)
        ops = jc_operators(spec.fock_dim)
        H = jc_hamiltonian(omega_c, omega_q, g, spec.fock_dim)
        channels = (JumpChannel(ops["a"], kappa, "a"), JumpChannel(ops["sm"], gamma, "sigma_minus"))
        qubit = haar_random_pure(2, rng)
        if jc_qubit_init == "ground":
            qubit = basis_state(2, 1)
        elif jc_qubit_init != "haar":
            raise ValueError(f"jc_qubit_init must be 'haar' or 'ground', got {jc_qubit_init!r}")
        psi0 = np.kron(qubit, basis_state(spec.fock_dim, n))
        params.update(omega_c=omega_c, omega_q=omega_q, g=g, n=n)
        targets.update(zip(_bern_names("kappa"), kappa.coeffs))
        targets.update(zip(_bern_names("gamma"), gamma.coeffs))
        system = LindbladSystem(H, channels)
    else:  # pragma: no cover
        raise AssertionError(mid)

    targets = {name: float(targets[name]) for name in spec.targets}
    return Instance(system=system, rho0=density_matrix(psi0), targets=targets, params=params,
                    observables=observables_for(spec))
