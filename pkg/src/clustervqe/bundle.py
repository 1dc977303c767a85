"""Problem bundles on disk: Hamiltonian text, pool listing and a JSON manifest."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .engines.config import Problem
from .fermion import (FcidumpError, MolecularProblem, build_uccsd_pool, fixture_path,
                      hf_reference, load_fcidump)
from .pauli import PauliSum, PauliWord

HAMILTONIAN_FILE = "hamiltonian.txt"
POOL_FILE = "pool.txt"
MANIFEST_FILE = "bundle.json"


class DataError(ValueError):
    """Unreadable or inconsistent input data."""


def problem_from_pauli(h: PauliSum, n_electrons: int, name: str = "") -> Problem:
    """Pauli-sum input: blocked-order aufbau reference and the matching qubit-UCCSD pool."""
    n = h.n_qubits // 2
    try:
        if h.n_qubits % 2:
            raise ValueError("odd qubit count cannot be split into spin blocks")
        shell = MolecularProblem(n, n_electrons, n_electrons % 2, 0.0, np.zeros((n, n)),
                                 np.zeros((n,) * 4), {})
        pool = build_uccsd_pool(shell)
    except ValueError as exc:
        raise DataError(
            f"cannot place {n_electrons} electrons on {h.n_qubits} qubits: {exc}") from exc
    return Problem(h, tuple(pool.generators), hf_reference(shell), n_electrons, name=name,
                   metadata={"source": "pauli-sum"})


def load_problem(source: str | Path, n_electrons: int | None = None) -> Problem:
    """Fixture name, FCIDUMP file, bundle directory or Pauli text file."""
    src = str(source)
    if src.startswith("fixture:"):
        name = src.split(":", 1)[1]
        path = fixture_path(name)
        if not path.exists():
            raise DataError(f"no fixture named {name!r}")
        return Problem.from_molecule(load_fcidump(path), name)
    path = Path(src)
    if not path.exists():
        raise DataError(f"input not found: {path}")
    if path.is_dir():
        return load_bundle(path)
    text = path.read_text()
    if "&FCI" in text.upper()[:200]:
        try:
            return Problem.from_molecule(load_fcidump(path), path.stem)
        except FcidumpError as exc:
            raise DataError(f"{path}: {exc}") from exc
    if n_electrons is None:
        raise DataError(f"{path}: Pauli-sum input needs an electron count")
    try:
        h = PauliSum.from_text(text)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc
    return problem_from_pauli(h, n_electrons, path.stem)


def write_bundle(problem: Problem, out: str | Path, source: str = "") -> dict:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / HAMILTONIAN_FILE).write_text(problem.hamiltonian.to_text())
    (out / POOL_FILE).write_text("".join(p.label + "\n" for p in problem.pool))
    manifest = {
        "name": problem.name,
        "source": source,
        "n_qubits": problem.n_qubits,
        "n_electrons": problem.n_electrons,
        "reference": problem.reference,
        "reference_bits": format(problem.reference, f"0{problem.n_qubits}b")[::-1],
        "n_terms": len(problem.hamiltonian),
        "pool_size": len(problem.pool),
        "fingerprint": problem.fingerprint(),
        "metadata": problem.metadata,
    }
    (out / MANIFEST_FILE).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def load_bundle(path: str | Path) -> Problem:
    path = Path(path)
    try:
        manifest = json.loads((path / MANIFEST_FILE).read_text())
        h = PauliSum.from_text((path / HAMILTONIAN_FILE).read_text())
        pool = tuple(PauliWord.from_label(line.strip())
                     for line in (path / POOL_FILE).read_text().splitlines() if line.strip())
    except FileNotFoundError as exc:
        raise DataError(f"incomplete bundle {path}: {exc.filename} missing") from exc
    except (ValueError, KeyError) as exc:
        raise DataError(f"bad bundle {path}: {exc}") from exc
    problem = Problem(h, pool, int(manifest["reference"]), manifest.get("n_electrons"),
                      name=manifest.get("name", path.name),
                      metadata=manifest.get("metadata", {}))
    if problem.fingerprint() != manifest.get("fingerprint", problem.fingerprint()):
        raise DataError(f"bundle {path} does not match its recorded fingerprint")
    return problem
