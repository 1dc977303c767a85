"""Pauli words and Pauli sums in the symplectic (x, z) bitmask encoding.

Conventions used throughout the package:

* qubit 0 is the leftmost letter of a label and bit 0 of every mask;
* per qubit, (x, z) = (0, 0) -> I, (1, 0) -> X, (1, 1) -> Y, (0, 1) -> Z;
* a word is phase free, ``P(x, z) = i^{|x & z|} X^x Z^z``, and every phase is
  carried by the coefficients of a :class:`PauliSum`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np
import scipy.sparse as sp

PRUNE_TOL = 1e-12
COEFF_TOL = 1e-10

_LETTERS = "IXZY"  # indexed by x + 2*z
_I_POWERS = np.array([1, 1j, -1, -1j])
_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}


class DimensionError(ValueError):
    """Operands act on registers of different sizes."""


def popcount(a):
    # bitwise_count returns uint8; widen so sign arithmetic cannot wrap
    return np.bitwise_count(np.asarray(a, dtype=np.int64)).astype(np.int64)


def _check_size(n_a, n_b):
    if n_a != n_b:
        raise DimensionError(f"register size mismatch: {n_a} vs {n_b}")


def product_phase_exponent(x1, z1, x2, z2):
    """Power of ``i`` in ``P(x1,z1) P(x2,z2) = i^k P(x1^x2, z1^z2)``.

    Works elementwise on integers or integer arrays.
    """
    x3 = np.bitwise_xor(x1, x2)
    z3 = np.bitwise_xor(z1, z2)
    k = (popcount(np.bitwise_and(x1, z1)) + popcount(np.bitwise_and(x2, z2))
         + 2 * popcount(np.bitwise_and(z1, x2)) - popcount(np.bitwise_and(x3, z3)))
    return np.mod(k, 4)


def anticommute_mask(xs, zs, x, z):
    """Boolean array: which of the words (xs, zs) anticommute with (x, z)."""
    return (popcount(np.bitwise_and(xs, z) ^ np.bitwise_and(zs, x)) & 1).astype(bool)


@dataclass(frozen=True, order=True)
class PauliWord:
    n_qubits: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("a Pauli word needs at least one qubit")
        limit = 1 << self.n_qubits
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError("mask has bits beyond the register")

    @classmethod
    def from_label(cls, label: str) -> "PauliWord":
        x = z = 0
        for q, letter in enumerate(label.upper()):
            if letter in "XY":
                x |= 1 << q
            if letter in "ZY":
                z |= 1 << q
            if letter not in "IXYZ":
                raise ValueError(f"bad Pauli letter {letter!r} in {label!r}")
        return cls(len(label), x, z)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliWord":
        return cls(n_qubits, 0, 0)

    @property
    def label(self) -> str:
        return "".join(_LETTERS[((self.x >> q) & 1) + 2 * ((self.z >> q) & 1)]
                       for q in range(self.n_qubits))

    def __str__(self):
        return self.label

    @property
    def flip_indices(self) -> tuple[int, ...]:
        return tuple(q for q in range(self.n_qubits) if (self.x >> q) & 1)

    @property
    def support(self) -> tuple[int, ...]:
        m = self.x | self.z
        return tuple(q for q in range(self.n_qubits) if (m >> q) & 1)

    @property
    def n_y(self) -> int:
        return int(popcount(self.x & self.z))

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def matrix(self) -> np.ndarray:
        """Dense ``2^n x 2^n`` matrix (qubit 0 is the least significant bit)."""
        out = np.ones((1, 1), dtype=complex)
        for letter in self.label:  # qubit 0 first -> ends up rightmost in kron
            out = np.kron(_SINGLE[letter], out)
        return out


def multiply(a: PauliWord, b: PauliWord) -> tuple[PauliWord, complex]:
    """Return ``(c, phase)`` with ``a @ b == phase * c``."""
    _check_size(a.n_qubits, b.n_qubits)
    k = int(product_phase_exponent(a.x, a.z, b.x, b.z))
    return PauliWord(a.n_qubits, a.x ^ b.x, a.z ^ b.z), complex(_I_POWERS[k])


def commutes(a: PauliWord, b: PauliWord) -> bool:
    _check_size(a.n_qubits, b.n_qubits)
    return not bool(anticommute_mask(a.x, a.z, b.x, b.z))


def restrict_to_cluster(p: PauliWord, cluster_qubits: Iterable[int]) -> PauliWord:
    """Gather the letters of ``p`` at ``cluster_qubits`` into a smaller word."""
    qubits = list(cluster_qubits)
    if any(q < 0 or q >= p.n_qubits for q in qubits):
        raise IndexError(f"cluster {qubits} out of range for {p.n_qubits} qubits")
    x = z = 0
    for j, q in enumerate(qubits):
        x |= ((p.x >> q) & 1) << j
        z |= ((p.z >> q) & 1) << j
    return PauliWord(len(qubits), x, z)


def gather_bits(masks: np.ndarray, qubits) -> np.ndarray:
    """Vectorized :func:`restrict_to_cluster` on raw mask arrays."""
    masks = np.asarray(masks, dtype=np.int64)
    out = np.zeros_like(masks)
    for j, q in enumerate(qubits):
        out |= ((masks >> q) & 1) << j
    return out


class PauliSum:
    """Linear combination of Pauli words with complex coefficients.

    Stored as three parallel arrays sorted by ``(x, z)``; duplicates are merged
    and exact zeros dropped at construction.  Instances are treated as
    immutable values.
    """

    __slots__ = ("n_qubits", "xs", "zs", "coeffs")

    def __init__(self, n_qubits: int, xs=(), zs=(), coeffs=(), *, tol: float = 0.0):
        if n_qubits < 1:
            raise ValueError("a Pauli sum needs at least one qubit")
        self.n_qubits = int(n_qubits)
        xs = np.asarray(xs, dtype=np.int64).ravel()
        zs = np.asarray(zs, dtype=np.int64).ravel()
        coeffs = np.asarray(coeffs, dtype=complex).ravel()
        if not (len(xs) == len(zs) == len(coeffs)):
            raise ValueError("xs, zs and coeffs must have equal length")
        if len(xs):
            limit = 1 << self.n_qubits
            if xs.min() < 0 or zs.min() < 0 or xs.max() >= limit or zs.max() >= limit:
                raise ValueError("mask has bits beyond the register")
            keys = (xs << self.n_qubits) | zs
            uniq, inverse = np.unique(keys, return_inverse=True)
            summed = np.zeros(len(uniq), dtype=complex)
            np.add.at(summed, inverse, coeffs)
            keep = np.abs(summed) > tol if tol > 0 else summed != 0
            uniq, summed = uniq[keep], summed[keep]
            xs, zs, coeffs = uniq >> self.n_qubits, uniq & ((1 << self.n_qubits) - 1), summed
        for arr in (xs, zs, coeffs):
            arr.flags.writeable = False
        self.xs, self.zs, self.coeffs = xs, zs, coeffs

    # construction -------------------------------------------------------
    @classmethod
    def from_terms(cls, terms: Iterable[tuple[complex, PauliWord | str]],
                   n_qubits: int | None = None) -> "PauliSum":
        xs, zs, cs = [], [], []
        for c, w in terms:
            if isinstance(w, str):
                w = PauliWord.from_label(w)
            if n_qubits is None:
                n_qubits = w.n_qubits
            _check_size(n_qubits, w.n_qubits)
            xs.append(w.x)
            zs.append(w.z)
            cs.append(c)
        if n_qubits is None:
            raise ValueError("cannot infer register size from an empty term list")
        return cls(n_qubits, xs, zs, cs)

    @classmethod
    def from_dict(cls, terms: Mapping[PauliWord, complex], n_qubits: int | None = None):
        return cls.from_terms(((c, w) for w, c in terms.items()), n_qubits)

    @classmethod
    def from_word(cls, word: PauliWord, coeff: complex = 1.0) -> "PauliSum":
        return cls(word.n_qubits, [word.x], [word.z], [coeff])

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "PauliSum":
        return cls(n_qubits, [0], [0], [coeff])

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits)

    # container protocol -------------------------------------------------
    def __len__(self):
        return len(self.coeffs)

    def __iter__(self) -> Iterator[tuple[PauliWord, complex]]:
        for x, z, c in zip(self.xs.tolist(), self.zs.tolist(), self.coeffs.tolist()):
            yield PauliWord(self.n_qubits, x, z), c

    def to_dict(self) -> dict[PauliWord, complex]:
        return dict(iter(self))

    def coefficient(self, word: PauliWord | str) -> complex:
        if isinstance(word, str):
            word = PauliWord.from_label(word)
        hit = np.flatnonzero((self.xs == word.x) & (self.zs == word.z))
        return complex(self.coeffs[hit[0]]) if len(hit) else 0j

    def __repr__(self):
        body = " + ".join(f"{c:.6g}*{w}" for w, c in list(self)[:6])
        more = f" + ... ({len(self)} terms)" if len(self) > 6 else ""
        return f"PauliSum({body or '0'}{more})"

    # arithmetic ---------------------------------------------------------
    def __add__(self, other: "PauliSum") -> "PauliSum":
        if not isinstance(other, PauliSum):
            return NotImplemented
        _check_size(self.n_qubits, other.n_qubits)
        return PauliSum(self.n_qubits, np.concatenate([self.xs, other.xs]),
                        np.concatenate([self.zs, other.zs]),
                        np.concatenate([self.coeffs, other.coeffs]))

    def __neg__(self):
        return PauliSum(self.n_qubits, self.xs, self.zs, -self.coeffs)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-other)

    def __mul__(self, scalar: complex) -> "PauliSum":
        if isinstance(scalar, PauliSum):
            return NotImplemented
        return PauliSum(self.n_qubits, self.xs, self.zs, self.coeffs * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        """Operator product, all pairs of terms."""
        _check_size(self.n_qubits, other.n_qubits)
        x1, x2 = np.meshgrid(self.xs, other.xs, indexing="ij")
        z1, z2 = np.meshgrid(self.zs, other.zs, indexing="ij")
        k = product_phase_exponent(x1, z1, x2, z2)
        c = np.outer(self.coeffs, other.coeffs) * _I_POWERS[k]
        return PauliSum(self.n_qubits, (x1 ^ x2).ravel(), (z1 ^ z2).ravel(), c.ravel())

    def dagger(self) -> "PauliSum":
        return PauliSum(self.n_qubits, self.xs, self.zs, np.conj(self.coeffs))

    # predicates ---------------------------------------------------------
    def is_hermitian(self, tol: float = COEFF_TOL) -> bool:
        return bool(np.all(np.abs(self.coeffs.imag) <= tol))

    def norm(self) -> float:
        """Euclidean norm of the coefficient vector."""
        return float(np.linalg.norm(self.coeffs))

    def allclose(self, other: "PauliSum", tol: float = COEFF_TOL) -> bool:
        diff = self - other
        return bool(np.all(np.abs(diff.coeffs) <= tol))

    def real(self) -> "PauliSum":
        """Drop imaginary parts (callers assert Hermiticity first)."""
        return PauliSum(self.n_qubits, self.xs, self.zs, self.coeffs.real)

    # matrices -----------------------------------------------------------
    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def to_sparse(self, chunk: int = 256) -> sp.csr_matrix:
        """Sparse ``2^n x 2^n`` matrix.

        Terms sharing an x mask form one generalized permutation; its diagonal
        factor ``sum_z c_z i^|x&z| (-1)^{z.b}`` is a Walsh-Hadamard transform of
        the coefficients scattered by z.
        """
        dim = 1 << self.n_qubits
        basis = np.arange(dim, dtype=np.int64)
        if not len(self):
            return sp.csr_matrix((dim, dim), dtype=complex)
        phased = self.coeffs * _I_POWERS[popcount(self.xs & self.zs) & 3]
        groups, inverse = np.unique(self.xs, return_inverse=True)
        rows, cols, data = [], [], []
        for start in range(0, len(groups), chunk):
            sel = (inverse >= start) & (inverse < start + chunk)
            block = np.zeros((min(chunk, len(groups) - start), dim), dtype=complex)
            np.add.at(block, (inverse[sel] - start, self.zs[sel]), phased[sel])
            diag = walsh_hadamard(block)
            for g, x in enumerate(groups[start:start + chunk].tolist()):
                nz = np.flatnonzero(diag[g])
                rows.append(nz ^ x)
                cols.append(nz)
                data.append(diag[g, nz])
        return sp.csr_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
                             shape=(dim, dim))

    # text io ------------------------------------------------------------
    def to_text(self) -> str:
        lines = []
        for w, c in self:
            if c.imag == 0:
                lines.append(f"{c.real!r} {w.label}")
            else:
                lines.append(f"({c.real!r},{c.imag!r}) {w.label}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str, n_qubits: int | None = None) -> "PauliSum":
        terms = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                coeff_s, label = line.split()
                if coeff_s.startswith("("):
                    re_s, im_s = coeff_s.strip("()").split(",")
                    coeff = complex(float(re_s), float(im_s))
                else:
                    coeff = float(coeff_s)
                terms.append((coeff, PauliWord.from_label(label)))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: cannot parse {raw!r} ({exc})") from None
        return cls.from_terms(terms, n_qubits)


def walsh_hadamard(a: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis.

    ``out[..., b] = sum_z a[..., z] (-1)^{popcount(z & b)}``.
    """
    a = np.asarray(a)
    lead = a.shape[:-1]
    dim = a.shape[-1]
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise ValueError("last axis must have power-of-two length")
    a = a.reshape(-1, dim)
    for k in range(n):
        a = a.reshape(a.shape[0], -1, 2, 1 << k)
        a = np.stack((a[:, :, 0] + a[:, :, 1], a[:, :, 0] - a[:, :, 1]), axis=2)
    return a.reshape(*lead, dim)


def prune(h: PauliSum, tol: float = PRUNE_TOL) -> PauliSum:
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    keep = np.abs(h.coeffs) >= tol
    if tol == 0:
        keep = h.coeffs != 0
    return PauliSum(h.n_qubits, h.xs[keep], h.zs[keep], h.coeffs[keep])


def commutator_with_word(h: PauliSum, p: PauliWord) -> PauliSum:
    """``[H, P]``; only anticommuting terms survive, each as ``2 a_A A P``."""
    _check_size(h.n_qubits, p.n_qubits)
    anti = anticommute_mask(h.xs, h.zs, p.x, p.z)
    xs, zs, cs = h.xs[anti], h.zs[anti], h.coeffs[anti]
    k = product_phase_exponent(xs, zs, p.x, p.z)
    return PauliSum(h.n_qubits, xs ^ p.x, zs ^ p.z, 2 * cs * _I_POWERS[k])


def conjugate_by_rotation(h: PauliSum, p: PauliWord, theta: float,
                          tol: float = PRUNE_TOL) -> PauliSum:
    """``exp(-i theta P) H exp(i theta P)`` term by term.

    A term commuting with P is unchanged; an anticommuting term A becomes
    ``cos(2 theta) A + i sin(2 theta) A P``.
    """
    _check_size(h.n_qubits, p.n_qubits)
    anti = anticommute_mask(h.xs, h.zs, p.x, p.z)
    if theta == 0 or not anti.any():
        return prune(h, tol)
    xa, za, ca = h.xs[anti], h.zs[anti], h.coeffs[anti]
    k = product_phase_exponent(xa, za, p.x, p.z)
    c2, s2 = np.cos(2 * theta), np.sin(2 * theta)
    out = PauliSum(
        h.n_qubits,
        np.concatenate([h.xs[~anti], xa, xa ^ p.x]),
        np.concatenate([h.zs[~anti], za, za ^ p.z]),
        np.concatenate([h.coeffs[~anti], c2 * ca, 1j * s2 * ca * _I_POWERS[k]]),
    )
    return prune(out, tol)
