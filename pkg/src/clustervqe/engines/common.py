"""Pieces shared by every engine: ansatz bookkeeping, gradients, dressing."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..partition import Clustering
from ..pauli import (PauliSum, PauliWord, commutator_with_word, conjugate_by_rotation,
                     gather_bits, restrict_to_cluster)
from ..statevector import apply_rotation, apply_word, basis_state, word_expectations

log = logging.getLogger("clustervqe")

INTRA, CROSS, MONOLITHIC = "intra", "cross", "monolithic"
TIE_ABS, TIE_REL = 1e-12, 1e-9


class ContractViolation(ValueError):
    """An ansatz element sits somewhere its placement forbids."""


@dataclass
class AnsatzElement:
    generator: PauliWord
    angle: float = 0.0
    selected_at: int = 0
    placement: str = MONOLITHIC
    cluster: int | None = None
    pool_index: int | None = None

    @property
    def placement_tag(self) -> str:
        return f"intra:{self.cluster}" if self.placement == INTRA else self.placement


@dataclass
class IterationRecord:
    iteration: int
    generator: str
    pool_index: int
    placement: str
    energy: float
    max_gradient: float
    term_count: int
    parameters: list[float]
    wall_time: float = 0.0
    n_evals: int = 0
    clustering: tuple[int, ...] | None = None
    n_dressers: int = 0


@dataclass
class RunResult:
    engine: str
    records: list[IterationRecord]
    converged: bool
    stop_reason: str
    final_energy: float
    final_max_gradient: float
    elements: list[AnsatzElement] = field(default_factory=list)
    clustering: Clustering | None = None
    hamiltonian_terms: int = 0
    exact_energy: float | None = None


# selection -----------------------------------------------------------------------

def select_entangler(gradients: Sequence[float]) -> int:
    """Index of the largest |gradient|; near-ties go to the smallest index."""
    g = np.abs(np.asarray(gradients, dtype=float))
    if g.size == 0:
        raise ValueError("no gradients to select from")
    top = g.max()
    return int(np.flatnonzero(g >= top - max(TIE_ABS, TIE_REL * top))[0])


def statevector_pool_gradients(h_apply: Callable[[np.ndarray], np.ndarray],
                               state: np.ndarray, pool: Sequence[PauliWord]) -> np.ndarray:
    """``dE/dtheta`` for appending ``exp(i theta P_k)`` to the state: ``-2 Im <H psi|P_k psi>``."""
    lam = h_apply(state)
    return np.array([-2.0 * np.vdot(lam, apply_word(state, p.x, p.z)).imag for p in pool])


class ProductState:
    """Tensor product of per-cluster states; expectations factorize over clusters."""

    def __init__(self, clustering: Clustering, states: Sequence[np.ndarray]):
        self.clustering = clustering
        self.groups = clustering.groups()
        self.states = list(states)
        if len(self.states) != len(self.groups):
            raise ValueError("one state per cluster required")
        for g, s in zip(self.groups, self.states):
            if len(s) != 1 << len(g):
                raise ValueError("cluster state size does not match cluster")

    @property
    def n_qubits(self) -> int:
        return self.clustering.n_qubits

    def factor_expectations(self, xs, zs) -> np.ndarray:
        """Array (n_clusters, n_words) of ``<P_k(c)>`` on each cluster."""
        xs = np.asarray(xs, dtype=np.int64)
        zs = np.asarray(zs, dtype=np.int64)
        out = np.empty((len(self.groups), len(xs)), dtype=complex)
        for c, (qubits, state) in enumerate(zip(self.groups, self.states)):
            m = len(qubits)
            keys = (gather_bits(xs, qubits) << m) | gather_bits(zs, qubits)
            uniq, inverse = np.unique(keys, return_inverse=True)
            vals = word_expectations(state, uniq >> m, uniq & ((1 << m) - 1))
            out[c] = vals[inverse]
        return out

    def word_expectations(self, xs, zs) -> np.ndarray:
        return np.prod(self.factor_expectations(xs, zs), axis=0)

    def expectation(self, h: PauliSum) -> complex:
        return complex(np.dot(h.coeffs, self.word_expectations(h.xs, h.zs)))

    def full_state(self) -> np.ndarray:
        """Reassemble the register state: amplitude(b) = prod_c state_c[b restricted to c]."""
        idx = np.arange(1 << self.n_qubits, dtype=np.int64)
        psi = np.ones(len(idx), dtype=complex)
        for qubits, state in zip(self.groups, self.states):
            psi = psi * state[gather_bits(idx, qubits)]
        return psi


def pool_gradients(h_eff: PauliSum, state, pool: Sequence[PauliWord]) -> np.ndarray:
    """``i <psi|[H_eff, P_k]|psi>`` for every pool word.

    ``state`` is a full statevector or a :class:`ProductState`; for the
    latter each commutator word is evaluated as a product of cluster
    expectations.
    """
    comms = [commutator_with_word(h_eff, p) for p in pool]
    if not comms:
        return np.zeros(0)
    xs = np.concatenate([c.xs for c in comms])
    zs = np.concatenate([c.zs for c in comms])
    cs = np.concatenate([c.coeffs for c in comms])
    owner = np.repeat(np.arange(len(comms)), [len(c) for c in comms])
    if isinstance(state, ProductState):
        vals = state.word_expectations(xs, zs)
    else:
        vals = word_expectations(state, xs, zs)
    grads = np.zeros(len(comms), dtype=complex)
    np.add.at(grads, owner, 1j * cs * vals)
    if np.any(np.abs(grads.imag) > 1e-10):
        raise ArithmeticError("pool gradient has an imaginary part")
    return grads.real


# circuits ------------------------------------------------------------------------

def circuit_state(reference: np.ndarray, words: Sequence[PauliWord], angles) -> np.ndarray:
    """``U_M ... U_1 |ref>`` with ``U_k = exp(i theta_k P_k)``; element 0 acts first."""
    psi = reference
    for w, t in zip(words, angles):
        psi = apply_rotation(psi, w, float(t))
    return psi


def circuit_energy_and_gradient(reference: np.ndarray, words: Sequence[PauliWord], angles,
                                h_apply: Callable[[np.ndarray], np.ndarray]):
    """Energy and exact angle gradient of a product-of-exponentials circuit.

    Component i is ``2 Im <psi|P_eff_i H|psi>`` with the downstream-dressed
    generator ``P_eff_i = U_{>i} P_i U_{>i}^dagger``; rather than expanding
    P_eff_i as a Pauli sum it is contracted right to left, sandwiching P_i
    between ``U_{<=i}|ref>`` and ``U_{>i}^dagger H |psi>``.
    """
    angles = np.asarray(angles, dtype=float)
    psi = circuit_state(reference, words, angles)
    lam = h_apply(psi)
    energy = float(np.vdot(psi, lam).real)
    grad = np.empty(len(words))
    phi = psi
    for i in range(len(words) - 1, -1, -1):
        w = words[i]
        grad[i] = -2.0 * np.vdot(lam, apply_word(phi, w.x, w.z)).imag
        phi = apply_rotation(phi, w, -angles[i])
        lam = apply_rotation(lam, w, -angles[i])
    return energy, grad


def effective_generator(words: Sequence[PauliWord], angles, i: int,
                        tol: float = 1e-14) -> PauliSum:
    """``P_eff_i = U_M ... U_{i+1} P_i U_{i+1}^dagger ... U_M^dagger`` as a Pauli sum."""
    p = PauliSum.from_word(words[i])
    for w, t in zip(words[i + 1:], list(angles)[i + 1:]):
        # exp(i t W) A exp(-i t W) is conjugation with angle -t
        p = conjugate_by_rotation(p, w, -float(t), tol)
    return p


def dress_hamiltonian(h: PauliSum, dressers: Sequence[tuple[PauliWord, float]],
                      tol: float = 1e-10) -> PauliSum:
    """Conjugate ``h`` by each dresser in list order, pruning after every pass.

    The first listed dresser is applied to ``h`` first (innermost); the
    ClusterVQE engine lists dressers oldest first.
    """
    out = h
    for p, theta in dressers:
        out = conjugate_by_rotation(out, p, float(theta), tol)
    return out


def dressing_chain(h: PauliSum, dressers: Sequence[tuple[PauliWord, float]],
                   tol: float = 1e-10) -> list[PauliSum]:
    """All intermediate dressed operators ``[h, C_1(h), C_2(C_1(h)), ...]``."""
    chain = [h]
    for p, theta in dressers:
        chain.append(conjugate_by_rotation(chain[-1], p, float(theta), tol))
    return chain


def restrict_element(element: AnsatzElement, qubits: Sequence[int]) -> PauliWord:
    return restrict_to_cluster(element.generator, qubits)


def cluster_reference_states(reference_mask: int, clustering: Clustering) -> list[np.ndarray]:
    return [basis_state(len(g), int(gather_bits(np.array([reference_mask]), g)[0]))
            for g in clustering.groups()]


def cluster_states(reference_mask: int, clustering: Clustering,
                   circuits: Sequence[Sequence[AnsatzElement]]) -> list[np.ndarray]:
    groups = clustering.groups()
    refs = cluster_reference_states(reference_mask, clustering)
    out = []
    for c, (qubits, ref, elems) in enumerate(zip(groups, refs, circuits)):
        words = []
        for e in elems:
            if not set(e.generator.support) <= set(qubits):
                raise ContractViolation(
                    f"{e.generator} is not contained in cluster {c} {qubits}")
            words.append(restrict_to_cluster(e.generator, qubits))
        out.append(circuit_state(ref, words, [e.angle for e in elems]))
    return out


def clustered_energy(h_d: PauliSum, clustering: Clustering,
                     circuits: Sequence[Sequence[AnsatzElement]], reference_mask: int) -> float:
    """``sum_k a_k prod_c <ref_c|C_c^dagger P_k(c) C_c|ref_c>`` over the clusters."""
    if len(circuits) != clustering.n_clusters:
        raise ValueError("one circuit per cluster required")
    state = ProductState(clustering, cluster_states(reference_mask, clustering, circuits))
    value = state.expectation(h_d)
    if abs(value.imag) > 1e-10:
        raise ArithmeticError("clustered energy has an imaginary part")
    return value.real


def placement_of(word: PauliWord, clustering: Clustering) -> tuple[str, int | None]:
    clusters = {clustering.assignment[q] for q in word.support}
    if len(clusters) == 1:
        return INTRA, clusters.pop()
    return CROSS, None
