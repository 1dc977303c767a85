"""Qubit clustering that keeps strongly correlated qubits together.

All partitions minimize (or are judged by) the inter-cluster mutual
information ``sum_{i<j, c(i) != c(j)} I_ij``.  QUBO energies use the full
matrix convention ``E(x) = x^T Q x``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

EXHAUSTIVE_PARTITION_MAX = 16
EXHAUSTIVE_QUBO_MAX = 22
TIE_TOL = 1e-12


class PartitionError(ValueError):
    pass


def canonical_assignment(assignment: Sequence[int]) -> tuple[int, ...]:
    """Relabel clusters in order of first appearance (qubit 0 -> cluster 0)."""
    relabel: dict[int, int] = {}
    return tuple(relabel.setdefault(a, len(relabel)) for a in assignment)


@dataclass(frozen=True)
class Clustering:
    assignment: tuple[int, ...]
    capacities: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(a) for a in self.assignment))
        used = set(self.assignment)
        if used != set(range(len(used))):
            raise PartitionError(f"cluster ids {sorted(used)} are not 0..M-1")
        if self.capacities is not None:
            caps = tuple(int(c) for c in self.capacities)
            object.__setattr__(self, "capacities", caps)
            if len(caps) != self.n_clusters or not _fits(self.sizes, caps):
                raise PartitionError(f"sizes {self.sizes} violate capacities {caps}")

    @classmethod
    def from_groups(cls, groups: Sequence[Sequence[int]], capacities=None) -> "Clustering":
        n = sum(len(g) for g in groups)
        assignment = [-1] * n
        for c, g in enumerate(groups):
            for q in g:
                assignment[q] = c
        if -1 in assignment:
            raise PartitionError("groups do not cover every qubit")
        return cls(tuple(assignment), capacities)

    @property
    def n_qubits(self) -> int:
        return len(self.assignment)

    @property
    def n_clusters(self) -> int:
        return max(self.assignment) + 1

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(self.assignment.count(c) for c in range(self.n_clusters))

    def groups(self) -> list[list[int]]:
        return [[q for q, a in enumerate(self.assignment) if a == c]
                for c in range(self.n_clusters)]

    def cluster_of(self, qubit: int) -> int:
        return self.assignment[qubit]

    def canonical(self) -> "Clustering":
        return Clustering(canonical_assignment(self.assignment), self.capacities)

    def to_json(self) -> str:
        return json.dumps(list(self.assignment))

    @classmethod
    def from_json(cls, text: str, capacities=None) -> "Clustering":
        data = json.loads(text)
        if not isinstance(data, list) or not all(isinstance(a, int) for a in data):
            raise PartitionError("clustering JSON must be a list of integer cluster ids")
        return cls(tuple(data), capacities)


def _fits(sizes, capacities) -> bool:
    return all(s <= c for s, c in zip(sorted(sizes, reverse=True), sorted(capacities, reverse=True)))


def spin_clustering(n_qubits: int) -> Clustering:
    """Alpha block vs beta block under blocked spin-orbital ordering."""
    half = n_qubits // 2
    return Clustering(tuple(0 if q < half else 1 for q in range(n_qubits)))


def intercluster_mi(mi: np.ndarray, clustering: Clustering) -> float:
    mi = np.asarray(mi)
    if mi.shape != (clustering.n_qubits,) * 2:
        raise PartitionError("MI matrix and clustering sizes differ")
    a = np.asarray(clustering.assignment)
    cut = a[:, None] != a[None, :]
    return float(np.sum(np.triu(mi * cut, 1)))


# exhaustive -------------------------------------------------------------------

def _bipartition_cuts(mi: np.ndarray, patterns: np.ndarray) -> np.ndarray:
    n = len(mi)
    bits = ((patterns[:, None] >> np.arange(n)) & 1).astype(float)
    return np.einsum("pi,ij,pj->p", bits, mi, 1.0 - bits)


def exhaustive_partition(mi: np.ndarray, n_clusters: int = 2,
                         capacities: Sequence[int] | None = None) -> Clustering:
    """Global minimizer; ties -> lexicographically smallest canonical assignment."""
    mi = np.asarray(mi, dtype=float)
    n = len(mi)
    caps = tuple(capacities) if capacities is not None else None
    if n_clusters < 1 or n_clusters > n:
        raise PartitionError(f"cannot split {n} qubits into {n_clusters} clusters")
    if caps is not None and (len(caps) != n_clusters or sum(caps) < n):
        raise PartitionError(f"capacities {caps} cannot hold {n} qubits")
    if n_clusters == 1:
        return Clustering((0,) * n, caps)
    if n_clusters == 2:
        if n > EXHAUSTIVE_PARTITION_MAX:
            raise PartitionError(f"exhaustive bipartition limited to {EXHAUSTIVE_PARTITION_MAX} qubits")
        # qubit 0 sits in cluster 0; bit k of a pattern is qubit k's cluster
        patterns = np.arange(0, 1 << n, 2, dtype=np.int64)
        ones = np.bitwise_count(patterns)
        ok = (ones > 0)
        if caps is not None:
            big, small = max(caps), min(caps)
            ok &= (np.maximum(ones, n - ones) <= big) & (np.minimum(ones, n - ones) <= small)
        patterns = patterns[ok]
        if not len(patterns):
            raise PartitionError("no feasible bipartition")
        cuts = _bipartition_cuts(mi, patterns)
        best = cuts.min()
        tied = patterns[cuts <= best + TIE_TOL * (1 + abs(best))]
        candidates = [tuple(int((p >> q) & 1) for q in range(n)) for p in tied.tolist()]
        return Clustering(min(candidates), caps)
    if n > 10:
        raise PartitionError("exhaustive multi-way partition limited to 10 qubits")
    best_val, best_assign = np.inf, None
    for tail in itertools.product(range(n_clusters), repeat=n - 1):
        assign = (0,) + tail
        if assign != canonical_assignment(assign) or len(set(assign)) != n_clusters:
            continue
        c = Clustering(assign)
        if caps is not None and not _fits(c.sizes, caps):
            continue
        val = intercluster_mi(mi, c)
        if best_assign is None or val < best_val - TIE_TOL * (1 + abs(best_val)):
            best_val, best_assign = val, assign
    if best_assign is None:
        raise PartitionError("no feasible partition")
    return Clustering(best_assign, caps)


# local refinement -----------------------------------------------------------------

def refine_partition(mi: np.ndarray, seed: Clustering,
                     capacities: Sequence[int] | None = None,
                     history: list | None = None) -> Clustering:
    """Best-improvement single moves and pair swaps until none lowers the cut.

    Candidate order is fixed (moves, then swaps, ascending qubit indices), so
    the result depends only on the seed.
    """
    mi = np.asarray(mi, dtype=float)
    caps = tuple(capacities) if capacities is not None else seed.capacities
    m = seed.n_clusters
    if caps is not None and (len(caps) != m or not _fits(seed.sizes, caps)):
        raise PartitionError(f"seed sizes {seed.sizes} infeasible for capacities {caps}")
    assign = list(seed.assignment)
    n = len(assign)
    current = intercluster_mi(mi, Clustering(tuple(assign)))
    if history is not None:
        history.append(current)

    def feasible(a):
        sizes = [a.count(c) for c in range(m)]
        return min(sizes) > 0 and (caps is None or _fits(sizes, caps))

    while True:
        best_delta, best_assign = -1e-15, None
        for q in range(n):
            for c in range(m):
                if c == assign[q]:
                    continue
                trial = assign.copy()
                trial[q] = c
                if not feasible(trial):
                    continue
                # moving q changes only the pairs involving q
                row = mi[q]
                a = np.asarray(assign)
                delta = row[a == assign[q]].sum() - row[q] - row[a == c].sum()
                if delta < best_delta:
                    best_delta, best_assign = delta, trial
        for q1, q2 in itertools.combinations(range(n), 2):
            if assign[q1] == assign[q2]:
                continue
            trial = assign.copy()
            trial[q1], trial[q2] = trial[q2], trial[q1]
            delta = intercluster_mi(mi, Clustering(canonical_assignment(trial))) - current
            if delta < best_delta:
                best_delta, best_assign = delta, trial
        if best_assign is None:
            break
        assign = best_assign
        current = intercluster_mi(mi, Clustering(canonical_assignment(assign)))
        if history is not None:
            history.append(current)
    return Clustering(canonical_assignment(assign), caps)


# QUBO -----------------------------------------------------------------------------

@dataclass(frozen=True)
class QuboProblem:
    q: np.ndarray

    @property
    def n(self) -> int:
        return len(self.q)

    def energy(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.q @ x)


def build_mi_selection_qubo(mi: np.ndarray, fraction: float = 0.5, penalty: float = 2.0,
                            pool_size: int | None = None) -> QuboProblem:
    """Select a maximally correlated subset of ``fraction * pool_size`` qubits.

    ``Q = -I + penalty * R`` with ``R_ij = 1`` off the diagonal and
    ``R_ii = 1 - 2 * fraction * pool_size``; under the full-matrix energy the
    restriction term alone is ``K (K - 2 f S)`` for K selected qubits, lowest
    at ``K = f S``.
    """
    if not 0 < fraction < 1:
        raise ValueError("fraction must lie in (0, 1)")
    if penalty <= 0:
        raise ValueError("penalty must be positive")
    mi = np.asarray(mi, dtype=float)
    s = len(mi) if pool_size is None else pool_size
    r = np.ones_like(mi)
    np.fill_diagonal(r, 1.0 - 2.0 * fraction * s)
    return QuboProblem(-mi + penalty * r)


def modularity_matrix(mi: np.ndarray) -> np.ndarray:
    a = np.abs(np.asarray(mi, dtype=float))
    np.fill_diagonal(a, 0.0)
    d = a.sum(axis=1)
    two_m = d.sum()
    if two_m == 0:
        raise PartitionError("modularity needs at least one nonzero MI entry")
    return a - np.outer(d, d) / two_m


def build_modularity_qubo(mi: np.ndarray) -> QuboProblem:
    """Maximizing ``x^T B x`` posed as minimizing ``x^T (-B) x``."""
    return QuboProblem(-modularity_matrix(mi))


def _exhaustive_qubo(q: np.ndarray) -> np.ndarray:
    n = len(q)
    if n > EXHAUSTIVE_QUBO_MAX:
        raise PartitionError(f"exhaustive QUBO limited to {EXHAUSTIVE_QUBO_MAX} variables")
    best_e, best_p = np.inf, 0
    chunk = 1 << min(n, 16)
    shifts = np.arange(n)
    for start in range(0, 1 << n, chunk):
        patterns = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        bits = ((patterns[:, None] >> shifts) & 1).astype(float)
        e = np.einsum("pi,ij,pj->p", bits, q, bits)
        k = int(np.argmin(e))
        if start == 0 or e[k] < best_e - TIE_TOL * (1 + abs(best_e)):
            best_e, best_p = e[k], int(patterns[k])
    return ((best_p >> shifts) & 1).astype(int)


def _anneal_qubo(q: np.ndarray, seed: int) -> np.ndarray:
    """Single-flip Metropolis with geometric cooling; returns the best seen.

    T0 = max|Q_ij| * n, T <- 0.995 T after each sweep, 200 n sweeps.
    """
    n = len(q)
    rng = np.random.default_rng(seed)
    sym = q + q.T
    diag = np.diag(q).copy()
    x = rng.integers(0, 2, n).astype(float)
    field = sym @ x - 2 * diag * x  # sum_{j != k} (Q_kj + Q_jk) x_j
    energy = float(x @ q @ x)
    best_e, best_x = energy, x.copy()
    temp = float(np.abs(q).max()) * n or 1.0
    for _ in range(200 * n):
        order = rng.permutation(n)
        draws = rng.random(n)
        for k, u in zip(order.tolist(), draws.tolist()):
            delta = (1 - 2 * x[k]) * (diag[k] + field[k])
            if delta <= 0 or u < np.exp(-delta / temp):
                step = 1 - 2 * x[k]
                x[k] += step
                field += step * sym[:, k]
                field[k] -= step * sym[k, k]
                energy += delta
                if energy < best_e - 1e-15:
                    best_e, best_x = energy, x.copy()
        temp *= 0.995
    return best_x.astype(int)


def solve_qubo(problem: QuboProblem, method: str = "exhaustive", seed: int = 0) -> np.ndarray:
    q = np.asarray(problem.q, dtype=float)
    if method == "exhaustive":
        return _exhaustive_qubo(q)
    if method in ("anneal", "annealing", "simulated_annealing"):
        return _anneal_qubo(q, seed)
    raise ValueError(f"unknown QUBO method {method!r}")


# dispatch -------------------------------------------------------------------------

METHODS = ("exhaustive", "refine", "mi_qubo", "modularity", "spin")


def _bipartition(mi, method, capacities, qubo_solver, seed) -> tuple[int, ...]:
    n = len(mi)
    if method == "exhaustive":
        return exhaustive_partition(mi, 2, capacities).assignment
    if method == "refine":
        half = (n + 1) // 2
        start = Clustering(tuple(0 if q < half else 1 for q in range(n)))
        return refine_partition(mi, start, capacities).assignment
    if method == "mi_qubo":
        x = solve_qubo(build_mi_selection_qubo(mi, 0.5, 2.0), qubo_solver, seed)
    elif method == "modularity":
        if not np.any(np.abs(mi) > 0):
            x = np.array([0] * ((n + 1) // 2) + [1] * (n // 2))
        else:
            x = solve_qubo(build_modularity_qubo(mi), qubo_solver, seed)
    else:
        raise ValueError(f"unknown partition method {method!r}")
    if x.min() == x.max():  # degenerate selection: fall back to a balanced split
        x = np.array([0] * ((n + 1) // 2) + [1] * (n // 2))
    return canonical_assignment(x.tolist())


def partition(mi: np.ndarray, n_clusters: int = 2, method: str = "exhaustive",
              capacities: Sequence[int] | None = None, *, qubo_solver: str = "exhaustive",
              seed: int = 0) -> Clustering:
    """Cluster qubits; more than two clusters use recursive bipartition.

    Capacities are enforced by ``exhaustive`` and ``refine``; the QUBO methods
    choose their own sizes and capacities are checked afterwards.
    """
    mi = np.asarray(mi, dtype=float)
    n = len(mi)
    if method == "spin":
        return spin_clustering(n) if n_clusters == 2 else _contiguous(n, n_clusters)
    if n_clusters == 1:
        return Clustering((0,) * n)
    if n_clusters == 2 or method == "exhaustive" and n <= 10:
        result = Clustering(_bipartition(mi, method, capacities, qubo_solver, seed)
                            if n_clusters == 2 else
                            exhaustive_partition(mi, n_clusters, capacities).assignment)
    else:
        groups = [list(range(n))]
        while len(groups) < n_clusters:
            groups.sort(key=len, reverse=True)
            big = groups.pop(0)
            if len(big) < 2:
                raise PartitionError("cannot split further")
            sub = mi[np.ix_(big, big)]
            split = _bipartition(sub, method if method != "exhaustive" else "exhaustive",
                                 None, qubo_solver, seed)
            groups += [[big[i] for i, a in enumerate(split) if a == c] for c in (0, 1)]
        result = Clustering(canonical_assignment(Clustering.from_groups(groups).assignment))
    if capacities is not None:
        result = Clustering(result.assignment, tuple(capacities))
    return result


def _contiguous(n: int, m: int) -> Clustering:
    bounds = np.linspace(0, n, m + 1).round().astype(int)
    return Clustering(tuple(int(np.searchsorted(bounds, q, side="right") - 1) for q in range(n)))
