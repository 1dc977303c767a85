"""Dense statevector simulation.

States are plain complex numpy arrays of length ``2^n``; basis index bit q is
the occupation of qubit q (qubit 0 least significant).
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.sparse.linalg as spla

from .pauli import COEFF_TOL, DimensionError, PauliSum, PauliWord, popcount, walsh_hadamard

MAX_QUBITS = 16
_I_POWERS = np.array([1, 1j, -1, -1j])


class SizeGuardError(ValueError):
    """Register too large for dense simulation."""


def n_qubits_of(state: np.ndarray) -> int:
    n = len(state).bit_length() - 1
    if 1 << n != len(state):
        raise DimensionError(f"state length {len(state)} is not a power of two")
    return n


@lru_cache(maxsize=None)
def _basis(n: int) -> np.ndarray:
    out = np.arange(1 << n, dtype=np.int64)
    out.flags.writeable = False
    return out


def basis_state(n: int, occupation: int) -> np.ndarray:
    if occupation < 0 or occupation >= 1 << n:
        raise ValueError(f"occupation mask {occupation:#b} does not fit {n} qubits")
    psi = np.zeros(1 << n, dtype=complex)
    psi[occupation] = 1.0
    return psi


def apply_word(state: np.ndarray, x: int, z: int) -> np.ndarray:
    """``P(x, z) |state>`` in O(2^n)."""
    idx = _basis(n_qubits_of(state))
    signed = state * (1 - 2 * (popcount(idx & z) & 1))
    return _I_POWERS[int(popcount(x & z)) & 3] * signed[idx ^ x]


def apply_rotation(state: np.ndarray, p: PauliWord, theta: float) -> np.ndarray:
    """``exp(i theta P) |state> = cos(theta)|state> + i sin(theta) P|state>``."""
    if p.n_qubits != n_qubits_of(state):
        raise DimensionError(f"{p.n_qubits}-qubit word on {n_qubits_of(state)}-qubit state")
    if theta == 0:
        return state.copy()
    return np.cos(theta) * state + 1j * np.sin(theta) * apply_word(state, p.x, p.z)


def apply_sum(state: np.ndarray, h: PauliSum) -> np.ndarray:
    if h.n_qubits != n_qubits_of(state):
        raise DimensionError("operator and state sizes differ")
    out = np.zeros_like(state, dtype=complex)
    for x, z, c in zip(h.xs.tolist(), h.zs.tolist(), h.coeffs.tolist()):
        out += c * apply_word(state, x, z)
    return out


def word_expectations(state: np.ndarray, xs, zs) -> np.ndarray:
    """``<s|P_k|s>`` for every word k, vectorized over the words.

    Words sharing an x mask are handled together: the overlap profile
    ``conj(s[b^x]) s[b]`` is Walsh-Hadamard transformed once and read off at
    every z of the group.
    """
    xs = np.asarray(xs, dtype=np.int64)
    zs = np.asarray(zs, dtype=np.int64)
    n = n_qubits_of(state)
    idx = _basis(n)
    out = np.empty(len(xs), dtype=complex)
    if not len(xs):
        return out
    groups, inverse = np.unique(xs, return_inverse=True)
    chunk = max(1, (1 << 22) >> n)
    for start in range(0, len(groups), chunk):
        gx = groups[start:start + chunk]
        profile = np.conj(state[idx[None, :] ^ gx[:, None]]) * state[None, :]
        spectrum = walsh_hadamard(profile)
        sel = np.flatnonzero((inverse >= start) & (inverse < start + chunk))
        out[sel] = spectrum[inverse[sel] - start, zs[sel]]
    return out * _I_POWERS[popcount(xs & zs) & 3]


def expectation_complex(state: np.ndarray, h: PauliSum) -> complex:
    if h.n_qubits != n_qubits_of(state):
        raise DimensionError("operator and state sizes differ")
    if not len(h):
        return 0j
    return complex(np.dot(h.coeffs, word_expectations(state, h.xs, h.zs)))


def expectation(state: np.ndarray, h: PauliSum) -> float:
    """Real ``<s|H|s>`` for a Hermitian Pauli sum."""
    if not h.is_hermitian():
        raise ValueError("expectation() needs a Hermitian operator")
    value = expectation_complex(state, h)
    if abs(value.imag) > COEFF_TOL:
        raise ArithmeticError(f"expectation has imaginary part {value.imag:.3e}")
    return value.real


def overlap_gradient_term(state: np.ndarray, h: PauliSum, p_eff: PauliSum) -> float:
    """Parameter derivative ``2 Im <psi| P_eff H |psi>`` with ``|psi> = U|ref>``.

    ``d/dtheta U = i P_eff U`` gives ``dE = i<[H, P_eff]> = 2 Im <P_eff H>``;
    both operators act on the register directly, no ancilla.
    """
    if h.n_qubits != n_qubits_of(state) or p_eff.n_qubits != h.n_qubits:
        raise DimensionError("operands act on different registers")
    phi = apply_sum(state, p_eff)
    return 2.0 * float(np.vdot(phi, apply_sum(state, h)).imag)


def number_sector(n: int, n_particles: int) -> np.ndarray:
    """Basis indices with exactly ``n_particles`` set bits."""
    idx = _basis(n)
    return idx[popcount(idx) == n_particles]


def exact_ground_state(h: PauliSum, particle_sector: int | None = None,
                       *, dense_limit: int = 1024) -> tuple[float, np.ndarray]:
    """Lowest eigenpair of ``h``, optionally inside a JW particle-number sector."""
    n = h.n_qubits
    if n > MAX_QUBITS:
        raise SizeGuardError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit guard")
    mat = h.to_sparse()
    if particle_sector is not None:
        keep = number_sector(n, particle_sector)
        mat = mat[keep][:, keep]
    else:
        keep = _basis(n)
    dim = mat.shape[0]
    if dim <= dense_limit:
        vals, vecs = np.linalg.eigh(mat.toarray())
        energy, vec = vals[0], vecs[:, 0]
    else:
        v0 = np.ones(dim) / np.sqrt(dim)
        vals, vecs = spla.eigsh(mat, k=1, which="SA", v0=v0, tol=1e-12)
        energy, vec = vals[0], vecs[:, 0]
    state = np.zeros(1 << n, dtype=complex)
    state[keep] = vec
    # deterministic global phase: largest amplitude real positive
    j = int(np.argmax(np.abs(state)))
    state *= np.conj(state[j]) / abs(state[j])
    return float(energy), state / np.linalg.norm(state)
