"""Reduced density matrices, von Neumann entropies and qubit mutual information.

Entropies are in nats.
"""
from __future__ import annotations

import io
from importlib import resources

import numpy as np

from .statevector import n_qubits_of

EIG_FLOOR = 1e-14
SPECTRAL_TOL = 1e-10


def _tensor(state: np.ndarray) -> np.ndarray:
    """View the state with one axis per qubit, axis k <-> qubit k."""
    n = n_qubits_of(state)
    # C-order reshape puts the most significant bit first; reverse so axis k is qubit k
    return state.reshape((2,) * n).transpose(tuple(range(n - 1, -1, -1)))


def rdm1(state: np.ndarray, i: int) -> np.ndarray:
    n = n_qubits_of(state)
    if not 0 <= i < n:
        raise IndexError(f"qubit {i} outside {n}-qubit register")
    t = np.moveaxis(_tensor(state), i, 0).reshape(2, -1)
    return t @ t.conj().T


def rdm2(state: np.ndarray, i: int, j: int) -> np.ndarray:
    """Two-qubit RDM in the ordered basis ``|q_i q_j>`` (q_i the first factor)."""
    n = n_qubits_of(state)
    if i == j:
        raise ValueError("rdm2 needs two distinct qubits")
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"qubits ({i}, {j}) outside {n}-qubit register")
    t = np.moveaxis(_tensor(state), (i, j), (0, 1)).reshape(4, -1)
    return t @ t.conj().T


def von_neumann_entropy(rho: np.ndarray) -> float:
    rho = np.asarray(rho)
    if not np.allclose(rho, rho.conj().T, atol=SPECTRAL_TOL):
        raise ValueError("density matrix is not Hermitian")
    lam = np.linalg.eigvalsh(rho)
    if lam.min() < -SPECTRAL_TOL or abs(lam.sum() - 1) > SPECTRAL_TOL:
        raise ValueError("density matrix is not positive with unit trace")
    lam = lam[lam > EIG_FLOOR]
    return float(-np.sum(lam * np.log(lam)))


def mutual_information(state: np.ndarray) -> np.ndarray:
    """``I_ij = (S_i + S_j - S_ij) / 2`` for i != j, zero diagonal."""
    n = n_qubits_of(state)
    s1 = [von_neumann_entropy(rdm1(state, i)) for i in range(n)]
    mi = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            value = 0.5 * (s1[i] + s1[j] - von_neumann_entropy(rdm2(state, i, j)))
            mi[i, j] = mi[j, i] = max(value, 0.0)
    return mi


def generalized_correlation(mi: np.ndarray, d: float) -> np.ndarray:
    """``r_ij = sqrt(1 - exp(-2 I_ij / d))``."""
    if d <= 0:
        raise ValueError("dimensionality must be positive")
    r = np.sqrt(1.0 - np.exp(-2.0 * np.asarray(mi, dtype=float) / d))
    np.fill_diagonal(r, 0.0)
    return r


def mi_to_csv(mi: np.ndarray) -> str:
    n = len(mi)
    buf = io.StringIO()
    buf.write(",".join(str(i) for i in range(n)) + "\n")
    for row in mi:
        buf.write(",".join(f"{v:.12g}" for v in row) + "\n")
    return buf.getvalue()


def mi_from_csv(text: str) -> np.ndarray:
    rows = [line for line in text.strip().splitlines() if line.strip()]
    header = [int(t) for t in rows[0].split(",")]
    mi = np.array([[float(t) for t in line.split(",")] for line in rows[1:]])
    if mi.shape != (len(header), len(header)):
        raise ValueError("MI CSV is not square or does not match its header")
    if not np.allclose(mi, mi.T, atol=1e-12):
        raise ValueError("MI CSV is not symmetric")
    return mi


def load_mi_fixture(name: str) -> np.ndarray:
    """Bundled ground-state MI matrix of a fixture, e.g. ``'lih_2.4'``."""
    path = resources.files("clustervqe") / "data" / f"{name}.mi.csv"
    if not path.is_file():
        raise FileNotFoundError(f"no MI fixture named {name!r}")
    return mi_from_csv(path.read_text())
