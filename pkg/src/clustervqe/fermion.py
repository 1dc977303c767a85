"""Molecular integrals -> qubit Hamiltonian, Hartree-Fock reference and qubit-UCCSD pool.

Spin orbitals are blocked: spatial orbital p maps to qubit p (alpha) and
qubit ``n_spatial + p`` (beta).
"""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .pauli import PauliSum, PauliWord, prune

SYMM_TOL = 1e-10


class FcidumpError(ValueError):
    """Malformed FCIDUMP input; the message carries the line number."""


@dataclass(frozen=True)
class MolecularProblem:
    n_spatial: int
    n_electrons: int
    ms2: int
    core_energy: float
    h1: np.ndarray
    h2: np.ndarray  # chemist notation (ij|kl)
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n = self.n_spatial
        if n < 1 or self.n_electrons < 1:
            raise ValueError("need at least one orbital and one electron")
        if self.n_electrons > 2 * n:
            raise ValueError(f"{self.n_electrons} electrons do not fit {n} spatial orbitals")
        if (self.n_electrons + self.ms2) % 2:
            raise ValueError("MS2 parity inconsistent with electron count")
        if self.h1.shape != (n, n) or self.h2.shape != (n, n, n, n):
            raise ValueError("integral arrays have the wrong shape")
        if not np.allclose(self.h1, self.h1.T, atol=SYMM_TOL):
            raise ValueError("one-electron integrals are not symmetric")
        g = self.h2
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if not np.allclose(g, g.transpose(perm), atol=SYMM_TOL):
                raise ValueError("two-electron integrals lack 8-fold symmetry")

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_spatial

    @property
    def n_alpha(self) -> int:
        return (self.n_electrons + self.ms2) // 2

    @property
    def n_beta(self) -> int:
        return (self.n_electrons - self.ms2) // 2


# FCIDUMP ----------------------------------------------------------------------

_HEADER_KEY = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*=")


def _header_fields(text: str) -> dict[str, str]:
    keys = list(_HEADER_KEY.finditer(text))
    out = {}
    for m, nxt in zip(keys, keys[1:] + [None]):
        end = nxt.start() if nxt else len(text)
        out[m.group(1).upper()] = text[m.end():end].strip().strip(",").strip()
    return out


def parse_fcidump(stream: TextIO | str, metadata: dict | None = None) -> MolecularProblem:
    """Read an FCIDUMP file (1-based indices, chemist-notation integrals)."""
    lines = stream.splitlines() if isinstance(stream, str) else stream.read().splitlines()
    header, body_start = [], None
    for lineno, line in enumerate(lines, 1):
        header.append(line)
        stripped = line.strip().upper()
        if stripped.endswith("&END") or stripped == "/" or stripped.endswith("/"):
            body_start = lineno
            break
    if body_start is None or not header[0].strip().upper().startswith("&FCI"):
        raise FcidumpError("line 1: missing '&FCI ... &END' header")
    text = " ".join(header)
    text = re.sub(r"(?i)&FCI|&END|/", " ", text)
    fields = _header_fields(text)
    try:
        norb = int(fields["NORB"])
        nelec = int(fields["NELEC"])
        ms2 = int(fields.get("MS2", "0") or 0)
    except (KeyError, ValueError) as exc:
        raise FcidumpError(f"line 1: bad header field ({exc})") from None

    h1 = np.zeros((norb, norb))
    h2 = np.zeros((norb,) * 4)
    ecore = 0.0
    for lineno, line in enumerate(lines[body_start:], body_start + 1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 5:
            raise FcidumpError(f"line {lineno}: expected 'value i j k l', got {line!r}")
        try:
            value = float(parts[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(t) for t in parts[1:])
        except ValueError:
            raise FcidumpError(f"line {lineno}: non-numeric record {line!r}") from None
        if not all(0 <= t <= norb for t in (i, j, k, l)):
            raise FcidumpError(f"line {lineno}: orbital index out of range 1..{norb}")
        if i == j == k == l == 0:
            ecore = value
        elif k == l == 0:
            if i == 0 or j == 0:
                raise FcidumpError(f"line {lineno}: one-electron record needs i, j >= 1")
            h1[i - 1, j - 1] = h1[j - 1, i - 1] = value
        elif 0 in (i, j, k, l):
            # orbital energies (i 0 0 0) carry no Hamiltonian information
            continue
        else:
            a, b, c, d = i - 1, j - 1, k - 1, l - 1
            for p, q, r, s in ((a, b, c, d), (b, a, c, d), (a, b, d, c), (b, a, d, c),
                               (c, d, a, b), (d, c, a, b), (c, d, b, a), (d, c, b, a)):
                h2[p, q, r, s] = value
    try:
        return MolecularProblem(norb, nelec, ms2, ecore, h1, h2, dict(metadata or {}))
    except ValueError as exc:
        raise FcidumpError(f"header: {exc}") from None


def load_fcidump(path: str | Path) -> MolecularProblem:
    """Parse ``path`` and attach the JSON sidecar (same stem) when present."""
    path = Path(path)
    sidecar = path.with_suffix(".json")
    meta = json.loads(sidecar.read_text()) if sidecar.exists() else {}
    with open(path) as fh:
        return parse_fcidump(fh, meta)


def fixture_path(name: str) -> Path:
    """Location of a bundled fixture, e.g. ``fixture_path('lih_1.547')``."""
    return Path(str(resources.files("clustervqe") / "data" / f"{name}.fcidump"))


def load_fixture(name: str) -> MolecularProblem:
    return load_fcidump(fixture_path(name))


# Fermion operators and Jordan-Wigner -----------------------------------------

Ladder = tuple[int, bool]  # (spin-orbital, is_creation)


@dataclass
class FermionOperator:
    """Sum of products of ladder operators, kept in construction order."""

    terms: list[tuple[complex, tuple[Ladder, ...]]] = field(default_factory=list)

    @classmethod
    def excitation(cls, creators: Iterable[int], annihilators: Iterable[int],
                   coeff: complex = 1.0) -> "FermionOperator":
        seq = tuple((p, True) for p in creators) + tuple((q, False) for q in annihilators)
        return cls([(coeff, seq)])

    def __add__(self, other: "FermionOperator") -> "FermionOperator":
        return FermionOperator(self.terms + other.terms)

    def __sub__(self, other: "FermionOperator") -> "FermionOperator":
        return self + other * -1

    def __mul__(self, scalar: complex) -> "FermionOperator":
        return FermionOperator([(c * scalar, s) for c, s in self.terms])

    def dagger(self) -> "FermionOperator":
        return FermionOperator([(np.conj(c), tuple((p, not cre) for p, cre in reversed(s)))
                                for c, s in self.terms])

    def max_index(self) -> int:
        return max((p for _, s in self.terms for p, _ in s), default=-1)


def jw_ladder(index: int, creation: bool, n_qubits: int) -> PauliSum:
    """``a^dagger_j -> (X_j - iY_j)/2 Z_{<j}``, ``a_j -> (X_j + iY_j)/2 Z_{<j}``."""
    if not 0 <= index < n_qubits:
        raise IndexError(f"spin orbital {index} outside {n_qubits} qubits")
    bit, chain = 1 << index, (1 << index) - 1
    sign = -1 if creation else 1
    return PauliSum(n_qubits, [bit, bit], [chain, chain | bit], [0.5, 0.5j * sign])


def jordan_wigner(op: FermionOperator, n_qubits: int, tol: float = 0.0) -> PauliSum:
    xs, zs, cs = [], [], []
    cache: dict[Ladder, PauliSum] = {}
    for coeff, seq in op.terms:
        prod = PauliSum.identity(n_qubits, coeff)
        for ladder in seq:
            if ladder not in cache:
                cache[ladder] = jw_ladder(ladder[0], ladder[1], n_qubits)
            prod = prod @ cache[ladder]
        xs.append(prod.xs)
        zs.append(prod.zs)
        cs.append(prod.coeffs)
    if not xs:
        return PauliSum.zero(n_qubits)
    out = PauliSum(n_qubits, np.concatenate(xs), np.concatenate(zs), np.concatenate(cs))
    return prune(out, tol) if tol else out


def spin_orbital(p: int, spin: int, n_spatial: int) -> int:
    return p + spin * n_spatial


def molecular_fermion_operator(problem: MolecularProblem, tol: float = 1e-14) -> FermionOperator:
    """Second-quantized electronic Hamiltonian without the constant term."""
    n = problem.n_spatial
    terms = []
    for p, q in itertools.product(range(n), repeat=2):
        if abs(problem.h1[p, q]) > tol:
            for s in (0, 1):
                terms.append((problem.h1[p, q], ((spin_orbital(p, s, n), True),
                                                 (spin_orbital(q, s, n), False))))
    # 1/2 sum <pq|rs> a+_p a+_q a_s a_r with <pq|rs> = (pr|qs)
    for p, q, r, s in itertools.product(range(n), repeat=4):
        value = problem.h2[p, r, q, s]
        if abs(value) <= tol:
            continue
        for sp_, sq in itertools.product((0, 1), repeat=2):
            P, Q = spin_orbital(p, sp_, n), spin_orbital(q, sq, n)
            R, S = spin_orbital(r, sp_, n), spin_orbital(s, sq, n)
            if P == Q or R == S:
                continue
            terms.append((0.5 * value, ((P, True), (Q, True), (S, False), (R, False))))
    return FermionOperator(terms)


def build_qubit_hamiltonian(problem: MolecularProblem, tol: float = 1e-12) -> PauliSum:
    nq = problem.n_qubits
    h = jordan_wigner(molecular_fermion_operator(problem), nq)
    h = h + PauliSum.identity(nq, problem.core_energy)
    if not h.is_hermitian():
        raise ArithmeticError("JW Hamiltonian has complex coefficients")
    return prune(h.real(), tol)


def number_operator(n_qubits: int) -> PauliSum:
    """Total JW occupation ``sum_q (I - Z_q)/2``."""
    return PauliSum(n_qubits, [0] * (n_qubits + 1), [0] + [1 << q for q in range(n_qubits)],
                    [n_qubits / 2] + [-0.5] * n_qubits)


# Reference state and pool ----------------------------------------------------

def hf_occupations(problem: MolecularProblem) -> tuple[list[int], list[int]]:
    """Occupied (alpha, beta) spin-orbital indices of the aufbau determinant."""
    n = problem.n_spatial
    if problem.n_alpha > n or problem.n_beta > n or min(problem.n_alpha, problem.n_beta) < 0:
        raise ValueError("electron count exceeds orbital capacity")
    return (list(range(problem.n_alpha)),
            [spin_orbital(p, 1, n) for p in range(problem.n_beta)])


def hf_reference(problem: MolecularProblem) -> int:
    alpha, beta = hf_occupations(problem)
    return sum(1 << q for q in alpha + beta)


@dataclass(frozen=True)
class OperatorPool:
    generators: tuple[PauliWord, ...]
    provenance: tuple[tuple[str, tuple[int, ...], tuple[int, ...]], ...]

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __getitem__(self, k):
        return self.generators[k]

    @property
    def n_qubits(self) -> int:
        return self.generators[0].n_qubits

    def labels(self) -> list[str]:
        return [g.label for g in self.generators]


def excitation_generator(occ: tuple[int, ...], virt: tuple[int, ...],
                         n_qubits: int) -> PauliSum:
    """JW image of the anti-Hermitian ``t - t^dagger``."""
    t = FermionOperator.excitation(virt, tuple(reversed(occ)))
    return jordan_wigner(t - t.dagger(), n_qubits, tol=1e-14)


def uccsd_excitations(problem: MolecularProblem):
    """Spin-preserving singles then doubles, ascending spin-orbital indices."""
    n = problem.n_spatial
    alpha, beta = hf_occupations(problem)
    occupied = sorted(alpha + beta)
    virtual = [q for q in range(2 * n) if q not in occupied]

    def spin(q):
        return q // n

    for i in occupied:
        for a in virtual:
            if spin(i) == spin(a):
                yield "single", (i,), (a,)
    for i, j in itertools.combinations(occupied, 2):
        for a, b in itertools.combinations(virtual, 2):
            if sorted((spin(i), spin(j))) == sorted((spin(a), spin(b))):
                yield "double", (i, j), (a, b)


def flip_deduplicate(candidates: Iterable[tuple[object, PauliSum]]):
    """One odd-Y word per flip set: the lexicographically smallest label.

    ``candidates`` yields (provenance, generator-sum) in pool order; the
    returned order follows the first appearance of each flip set.
    """
    best: dict[int, PauliWord] = {}
    origin: dict[int, object] = {}
    for prov, generator in candidates:
        for word, _ in generator:
            if word.n_y % 2 == 0 or word.x == 0:
                continue
            if word.x not in best:
                best[word.x], origin[word.x] = word, prov
            elif word.label < best[word.x].label:
                best[word.x] = word
    return [best[k] for k in best], [origin[k] for k in best]


def build_uccsd_pool(problem: MolecularProblem) -> OperatorPool:
    nq = problem.n_qubits
    candidates = ((exc, excitation_generator(exc[1], exc[2], nq))
                  for exc in uccsd_excitations(problem))
    words, provenance = flip_deduplicate(candidates)
    if not words:
        raise ValueError("empty pool: no virtual orbitals")
    return OperatorPool(tuple(words), tuple(provenance))
