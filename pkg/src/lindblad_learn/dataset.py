"""Bulk trajectory generation, splitting and JSON Lines persistence."""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import SchemaError, SimulationError
from .models import ModelSpec, get_spec, instantiate
from .quantum import min_eigenvalue
from .simulate import evolve

log = logging.getLogger(__name__)

SPOT_CHECK_EVERY = 100  # every 100th record (1%) gets the full state checks


@dataclass
class SampleRecord:
    sample_id: int
    model: str
    params: dict
    seed: int
    times: np.ndarray
    series: dict[str, np.ndarray]
    targets: dict[str, float]

    def to_json(self) -> str:
        return dumps({
            "sample_id": self.sample_id,
            "model": self.model,
            "params": self.params,
            "seed": self.seed,
            "times": self.times,
            "series": self.series,
            "targets": self.targets,
        })

    @classmethod
    def from_json(cls, line: str) -> "SampleRecord":
        try:
            d = json.loads(line)
            return cls(
                sample_id=int(d["sample_id"]),
                model=str(d["model"]),
                params=dict(d["params"]),
                seed=int(d["seed"]),
                times=np.asarray(d["times"], dtype=float),
                series={k: np.asarray(v, dtype=float) for k, v in d["series"].items()},
                targets={k: float(v) for k, v in d["targets"].items()},
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed sample record: {exc}") from exc


def _encode(obj) -> str:
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError("non-finite number cannot be serialized")
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    return _encode(obj)


def sample_seed(seed: int, sample_id: int) -> int:
    """Seed of one record, derived from the dataset seed and the record counter."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(sample_id,))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def simulate_sample(spec: ModelSpec, sample_id: int, seed: int, substeps: int = 10,
                    check_states: bool = False, overrides: dict | None = None) -> SampleRecord:
    """Instantiate and evolve one record with sub-seed ``seed``."""
    rng = np.random.default_rng(seed)
    inst = instantiate(spec, rng, overrides)
    traj = evolve(inst.system, inst.rho0, spec.times, inst.observables, substeps=substeps,
                  record_states=check_states)
    if check_states:
        check_state_invariants(traj.states)
    return SampleRecord(sample_id=sample_id, model=spec.id.value, params=inst.params, seed=seed,
                        times=traj.times, series=traj.series, targets=inst.targets)


def check_state_invariants(states: np.ndarray, trace_tol=1e-8, herm_tol=1e-10, eig_tol=-1e-7) -> None:
    for k, rho in enumerate(states):
        tr = abs(np.trace(rho) - 1.0)
        herm = np.max(np.abs(rho - rho.conj().T))
        lam = min_eigenvalue(rho)
        if tr > trace_tol or herm > herm_tol or lam < eig_tol:
            raise SimulationError(f"state invariant violated at index {k}: |Tr-1|={tr:.3g}, "
                                  f"herm={herm:.3g}, min eig={lam:.3g}")


def _worker(args):
    spec_id, sample_id, seed, substeps = args
    spec = get_spec(spec_id)
    sub = sample_seed(seed, sample_id)
    try:
        return simulate_sample(spec, sample_id, sub, substeps,
                               check_states=sample_id % SPOT_CHECK_EVERY == 0)
    except SimulationError as exc:
        return (sample_id, sub, str(exc))


class DatasetGenerator:
    """Iterable of SampleRecords in sample_id order.

    Records whose simulation fails are skipped and logged; ``skipped`` holds
    (sample_id, seed, message) for each after iteration.
    """

    def __init__(self, spec: ModelSpec, n_samples: int, seed: int, substeps: int = 10, workers: int = 1):
        if n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        self.spec = spec
        self.n_samples = n_samples
        self.seed = seed
        self.substeps = substeps
        self.workers = workers
        self.skipped: list[tuple[int, int, str]] = []

    def __iter__(self) -> Iterator[SampleRecord]:
        jobs = [(self.spec.id.value, k, self.seed, self.substeps) for k in range(self.n_samples)]
        self.skipped = []
        if self.workers > 1:
            from multiprocessing import Pool

            with Pool(self.workers) as pool:
                yield from self._collect(pool.imap(_worker, jobs, chunksize=4))
        else:
            yield from self._collect(map(_worker, jobs))
        if self.skipped:
            log.warning("skipped %d of %d samples", len(self.skipped), self.n_samples)

    def _collect(self, results) -> Iterator[SampleRecord]:
        for res in results:
            if isinstance(res, SampleRecord):
                yield res
            else:
                sample_id, sub, msg = res
                log.warning("sample %d (seed %d) skipped: %s", sample_id, sub, msg)
                self.skipped.append(res)


def generate_dataset(spec: ModelSpec, n_samples: int, seed: int, substeps: int = 10,
                     workers: int = 1) -> DatasetGenerator:
    return DatasetGenerator(spec, n_samples, seed, substeps, workers)


def split(records: list, train_frac: float, seed: int = 0) -> tuple[list, list]:
    """Deterministic shuffled train/test split."""
    if not 0.0 < train_frac < 1.0:
        raise ValueError("train_frac must be in (0, 1)")
    if len(records) < 2:
        raise ValueError("need at least two records to split")
    n = len(records)
    n_train = min(max(int(round(n * train_frac)), 1), n - 1)
    perm = np.random.default_rng(seed).permutation(n)
    return [records[i] for i in perm[:n_train]], [records[i] for i in perm[n_train:]]


def write_jsonl(records: Iterable[SampleRecord], path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.to_json())
            fh.write("\n")
            n += 1
    return n


def read_jsonl(path) -> list[SampleRecord]:
    out = []
    with open(Path(path), encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(SampleRecord.from_json(line))
    return out
