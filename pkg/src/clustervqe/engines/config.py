"""Engine settings and the problem bundle every engine consumes."""
from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..fermion import MolecularProblem, build_qubit_hamiltonian, build_uccsd_pool, hf_reference
from ..pauli import PauliSum, PauliWord
from ..statevector import exact_ground_state

ENGINES = ("vqe", "adapt", "iqcc", "cluster")
CLUSTER_MODES = ("spin_fallback", "fixed", "mi", "on_the_fly")


class ConfigError(ValueError):
    """Invalid engine or run configuration; ``errors`` lists every problem found."""

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass
class EngineConfig:
    engine: str = "cluster"
    epsilon: float = 1e-4
    max_iterations: int = 40
    prune_tol: float = 1e-10
    gtol: float = 1e-8
    max_evals: int = 5000
    # ClusterVQE
    clustering: str = "mi"
    n_clusters: int = 2
    capacities: tuple[int, ...] | None = None
    partition_method: str = "exhaustive"
    assignment: tuple[int, ...] | None = None
    freeze_dressers: bool = False
    # iQCC
    iqcc_exclude_used: bool = False
    seed: int = 0

    def problems(self) -> list[str]:
        errors = []
        if self.engine not in ENGINES:
            errors.append(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if not self.epsilon > 0:
            errors.append("epsilon must be > 0")
        if self.max_iterations < 1:
            errors.append("max_iterations must be >= 1")
        if self.prune_tol < 0:
            errors.append("prune_tol must be >= 0")
        if not self.gtol > 0:
            errors.append("gtol must be > 0")
        if self.max_evals < 1:
            errors.append("max_evals must be >= 1")
        if self.clustering not in CLUSTER_MODES:
            errors.append(f"clustering must be one of {CLUSTER_MODES}, got {self.clustering!r}")
        if self.n_clusters < 1:
            errors.append("n_clusters must be >= 1")
        if self.capacities is not None and len(self.capacities) != self.n_clusters:
            errors.append("capacities must list one size per cluster")
        if self.engine == "cluster" and self.clustering == "fixed" and self.assignment is None:
            errors.append("clustering 'fixed' needs an explicit assignment")
        return errors

    def validate(self) -> "EngineConfig":
        errors = self.problems()
        if errors:
            raise ConfigError(errors)
        return self

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for key in ("capacities", "assignment"):
            if d[key] is not None:
                d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "EngineConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError([f"unknown config key {k!r}" for k in unknown])
        data = dict(data)
        for key in ("capacities", "assignment"):
            if data.get(key) is not None:
                data[key] = tuple(int(v) for v in data[key])
        return cls(**data)


@dataclass
class Problem:
    """Qubit Hamiltonian, operator pool and reference for one system."""
    hamiltonian: PauliSum
    pool: tuple[PauliWord, ...]
    reference: int
    n_electrons: int | None = None
    exact_energy: float | None = None
    mi: np.ndarray | None = None
    name: str = ""
    metadata: dict = field(default_factory=dict)

    @property
    def n_qubits(self) -> int:
        return self.hamiltonian.n_qubits

    @classmethod
    def from_molecule(cls, molecule: MolecularProblem, name: str = "") -> "Problem":
        h = build_qubit_hamiltonian(molecule)
        pool = build_uccsd_pool(molecule)
        return cls(h, tuple(pool.generators), hf_reference(molecule), molecule.n_electrons,
                   name=name, metadata=dict(molecule.metadata))

    def ensure_exact(self) -> float:
        """Exact ground energy in the electron-number sector, computed once."""
        if self.exact_energy is None:
            self.exact_energy, _ = exact_ground_state(self.hamiltonian, self.n_electrons)
        return self.exact_energy

    def ground_state_mi(self) -> np.ndarray:
        if self.mi is None:
            from ..entanglement import mutual_information
            energy, state = exact_ground_state(self.hamiltonian, self.n_electrons)
            self.exact_energy = energy if self.exact_energy is None else self.exact_energy
            self.mi = mutual_information(state)
        return self.mi

    def fingerprint(self) -> str:
        """Stable hash of the Hamiltonian, pool and reference."""
        text = self.hamiltonian.to_text() + "|" + ",".join(p.label for p in self.pool)
        text += f"|{self.reference}"
        return hashlib.sha256(text.encode()).hexdigest()[:16]
