import numpy as np
import pytest

from clustervqe.engines import Problem
from clustervqe.fermion import load_fixture
from clustervqe.pauli import PauliSum, PauliWord


def word_matrix_sum(h: PauliSum) -> np.ndarray:
    """Dense matrix built word by word from Kronecker products (independent of to_sparse)."""
    dim = 1 << h.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for w, c in h:
        out += c * w.matrix()
    return out


def random_word(rng, n, allow_identity=True) -> PauliWord:
    while True:
        w = PauliWord(n, int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n)))
        if allow_identity or not w.is_identity:
            return w


def random_hermitian(rng, n, n_terms) -> PauliSum:
    words = [random_word(rng, n) for _ in range(n_terms)]
    return PauliSum.from_terms([(float(rng.normal()), w) for w in words], n)


def random_state(rng, n) -> np.ndarray:
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_PROBLEMS = {}


def problem(name: str) -> Problem:
    """Session-cached problem bundle for a committed fixture."""
    if name not in _PROBLEMS:
        p = Problem.from_molecule(load_fixture(name), name)
        p.ensure_exact()
        _PROBLEMS[name] = p
    return _PROBLEMS[name]


@pytest.fixture(scope="session")
def h2():
    return problem("h2_0.735")


@pytest.fixture(scope="session")
def lih():
    return problem("lih_1.547")


# acceptance report ---------------------------------------------------------------

ACCEPTANCE: dict[int, str] = {}


def report_criterion(number: int, ok: bool, detail: str) -> bool:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
