import numpy as np
import pytest

from clustervqe.entanglement import (generalized_correlation, load_mi_fixture, mi_from_csv,
                                     mi_to_csv, mutual_information, rdm1, rdm2,
                                     von_neumann_entropy)
from clustervqe.pauli import PauliWord
from clustervqe.statevector import apply_rotation, basis_state

from conftest import random_state

LN2 = np.log(2)


def bell(n=2):
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = psi[3] = 1 / np.sqrt(2)
    return psi


def ghz(n):
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    return psi


def dense_rdm(psi, keep):
    """Partial trace through the full density matrix (independent of the tensor code)."""
    n = int(np.log2(len(psi)))
    rho = np.outer(psi, psi.conj())
    dim = 1 << len(keep)
    out = np.zeros((dim, dim), dtype=complex)
    for a in range(1 << n):
        for b in range(1 << n):
            rest = [q for q in range(n) if q not in keep]
            if any(((a >> q) & 1) != ((b >> q) & 1) for q in rest):
                continue
            # first kept qubit is the most significant factor
            ia = sum(((a >> q) & 1) << (len(keep) - 1 - k) for k, q in enumerate(keep))
            ib = sum(((b >> q) & 1) << (len(keep) - 1 - k) for k, q in enumerate(keep))
            out[ia, ib] += rho[a, b]
    return out


def test_rdm_examples(rng):
    assert np.allclose(rdm1(basis_state(3, 0), 1), np.diag([1, 0]))
    assert np.allclose(rdm1(bell(), 0), np.eye(2) / 2)
    assert np.isclose(von_neumann_entropy(rdm2(bell(), 0, 1)), 0.0, atol=1e-12)
    psi = random_state(rng, 4)
    for i in range(4):
        assert np.allclose(rdm1(psi, i), dense_rdm(psi, [i]), atol=1e-12)
    for i, j in [(0, 1), (2, 0), (1, 3)]:
        assert np.allclose(rdm2(psi, i, j), dense_rdm(psi, [i, j]), atol=1e-12)
    with pytest.raises(ValueError):
        rdm2(psi, 1, 1)
    with pytest.raises(IndexError):
        rdm1(psi, 4)


def test_rdm2_of_product_and_marginals(rng):
    a, b = random_state(rng, 1), random_state(rng, 1)
    psi = np.kron(b, a)  # qubit 0 carries a
    assert np.allclose(rdm2(psi, 0, 1), np.kron(rdm1(psi, 0), rdm1(psi, 1)), atol=1e-12)
    psi = random_state(rng, 4)
    r = rdm2(psi, 1, 3).reshape(2, 2, 2, 2)
    assert np.allclose(np.einsum("ajbj->ab", r), rdm1(psi, 1), atol=1e-12)
    assert np.allclose(np.einsum("iaib->ab", r), rdm1(psi, 3), atol=1e-12)


def test_entropy_examples():
    assert von_neumann_entropy(np.diag([1.0, 0.0])) == 0.0
    assert np.isclose(von_neumann_entropy(np.eye(2) / 2), LN2)
    assert np.isclose(von_neumann_entropy(np.diag([0.75, 0.25])), 0.562335, atol=1e-6)
    with pytest.raises(ValueError):
        von_neumann_entropy(np.diag([0.8, 0.8]))


def test_mi_unit_values():
    assert abs(mutual_information(bell())[0, 1] - LN2) < 1e-10
    mi = mutual_information(ghz(3))
    off = mi[~np.eye(3, dtype=bool)]
    assert np.allclose(off, LN2 / 2, atol=1e-10)
    assert np.allclose(np.diag(mi), 0)


def test_product_state_has_zero_mi(rng):
    psi = random_state(rng, 1)
    for _ in range(3):
        psi = np.kron(random_state(rng, 1), psi)
    assert np.abs(mutual_information(psi)).max() < 1e-12


def test_mi_properties_on_random_states(rng):
    for _ in range(5):
        psi = random_state(rng, 5)
        mi = mutual_information(psi)
        assert np.allclose(mi, mi.T) and mi.min() >= 0 and mi.max() <= 2 * LN2 + 1e-12
        for i in range(5):
            for j in range(i + 1, 5):
                s = von_neumann_entropy(rdm1(psi, i)) + von_neumann_entropy(rdm1(psi, j))
                assert von_neumann_entropy(rdm2(psi, i, j)) <= s + 1e-10
        # local unitaries on single qubits leave every entropy unchanged
        rotated = psi
        for q, label in enumerate("XYZXY"):
            word = PauliWord.from_label("I" * q + label + "I" * (4 - q))
            rotated = apply_rotation(rotated, word, rng.uniform(-2, 2))
        assert np.allclose(mutual_information(rotated), mi, atol=1e-10)


def test_generalized_correlation():
    r = generalized_correlation(np.array([[0, LN2], [LN2, 0]]), 2)
    assert np.isclose(r[0, 1], np.sqrt(0.5)) and r[0, 0] == 0
    assert generalized_correlation(np.array([[0, 0.0], [0.0, 0]]), 1)[0, 1] == 0
    assert np.isclose(generalized_correlation(np.array([[0, 50.0], [50.0, 0]]), 1)[0, 1], 1)
    with pytest.raises(ValueError):
        generalized_correlation(np.zeros((2, 2)), 0)


def test_csv_round_trip(rng):
    mi = mutual_information(random_state(rng, 4))
    assert np.allclose(mi_from_csv(mi_to_csv(mi)), mi, rtol=1e-11)
    with pytest.raises(ValueError):
        mi_from_csv("0,1\n0,1\n2,0\n")


def test_bundled_mi_fixture_matches_ground_state(h2):
    assert np.allclose(load_mi_fixture("h2_0.735"), h2.ground_state_mi(), atol=1e-10)
    with pytest.raises(FileNotFoundError):
        load_mi_fixture("nope")
