"""ClusterVQE: per-cluster circuits plus a dressed Hamiltonian for cross-cluster entanglers.

The variational state is

    |psi> = D_1 D_2 ... D_K (C_1 x ... x C_M) |ref>

where C_c is the circuit of cluster c and D_j = exp(i phi_j P_j) are the
dressers in list order.  The last listed dresser acts first on the
product state, and a newly selected cross-cluster word is appended there,
so the gradient ``i <chi|[H_d, P]|chi>`` used for selection is the exact
derivative of the grown ansatz.  Energies use the dressed operator

    H_d = D_K^dag ... D_1^dag H D_1 ... D_K

built by conjugating with D_1 first, and factorize over the clusters.
"""
from __future__ import annotations

import time

import numpy as np

from ..entanglement import mutual_information
from ..optimize import minimize
from ..partition import Clustering, partition
from ..pauli import PauliSum, commutator_with_word, commutes, conjugate_by_rotation, gather_bits
from ..statevector import apply_rotation, basis_state
from .base import Driver
from .common import (CROSS, INTRA, AnsatzElement, ProductState, RunResult,
                     circuit_energy_and_gradient, circuit_state, cluster_reference_states,
                     dressing_chain, log, placement_of, pool_gradients, restrict_to_cluster,
                     select_entangler)


def balanced_capacities(n_qubits: int, n_clusters: int) -> tuple[int, ...]:
    base, extra = divmod(n_qubits, n_clusters)
    return tuple(base + (1 if c < extra else 0) for c in range(n_clusters))


class ClusterVQEDriver(Driver):
    name = "cluster"

    def __init__(self, config, problem, callback=None):
        super().__init__(config, problem, callback)
        self.intra: list[AnsatzElement] = []
        self.dressing: list[AnsatzElement] = []
        self.frozen: set[int] = set()
        self._chain_key = None
        self._chain = None
        self.clustering = self._initial_clustering()
        self._rebuild()

    # clustering -------------------------------------------------------------------

    def _capacities(self):
        cfg = self.config
        if cfg.capacities is not None:
            return tuple(cfg.capacities)
        return balanced_capacities(self.n_qubits, cfg.n_clusters)

    def _initial_clustering(self) -> Clustering:
        cfg = self.config
        n = self.n_qubits
        if cfg.clustering == "fixed":
            clustering = Clustering(tuple(cfg.assignment), cfg.capacities)
            if clustering.n_qubits != n:
                raise ValueError("fixed assignment does not cover the register")
            return clustering
        if cfg.n_clusters == 1:
            return Clustering((0,) * n)
        if cfg.clustering in ("spin_fallback", "on_the_fly"):
            # the reference is a product state, so on-the-fly starts from the spin split
            return partition(np.zeros((n, n)), cfg.n_clusters, "spin")
        return partition(self.problem.ground_state_mi(), cfg.n_clusters, cfg.partition_method,
                         self._capacities(), seed=cfg.seed)

    def recluster(self, clustering: Clustering) -> int:
        """Switch partitions; intra elements that no longer fit become dressers.

        Walking each old circuit in order, an element stays in a circuit only
        if it fits one new cluster and commutes with everything already
        migrated out of the same circuit, so the state is unchanged.
        Returns the number of migrated elements.
        """
        if clustering.assignment == self.clustering.assignment:
            return 0
        kept, migrated = [], []
        for c in range(self.clustering.n_clusters):
            moved_here = []
            for e in [e for e in self.intra if e.cluster == c]:
                where, new_c = placement_of(e.generator, clustering)
                if where == INTRA and all(commutes(e.generator, m.generator) for m in moved_here):
                    e.cluster = new_c
                    kept.append(e)
                else:
                    e.placement, e.cluster = CROSS, None
                    moved_here.append(e)
            migrated += reversed(moved_here)
        self.intra = kept
        self.dressing += migrated
        self.clustering = clustering
        self._rebuild()
        if migrated:
            log.info("re-clustered to %s; %d elements migrated to the dressing list",
                     clustering.assignment, len(migrated))
        return len(migrated)

    def _rebuild(self):
        self.groups = self.clustering.groups()
        self.refs = cluster_reference_states(self.problem.reference, self.clustering)
        self.circuits = [[(i, restrict_to_cluster(e.generator, g))
                          for i, e in enumerate(self.intra) if e.cluster == c]
                         for c, g in enumerate(self.groups)]

    # parameters -------------------------------------------------------------------

    @property
    def elements(self) -> list[AnsatzElement]:
        """Elements in parameter-vector order: circuits first, then dressers."""
        return self.intra + self.dressing

    def parameters(self) -> np.ndarray:
        return np.array([e.angle for e in self.elements])

    def set_parameters(self, theta):
        for e, t in zip(self.elements, theta):
            e.angle = float(t)

    # evaluation -------------------------------------------------------------------

    def dressed_chain(self, phis) -> list[PauliSum]:
        key = tuple((e.generator, float(t)) for e, t in zip(self.dressing, phis))
        if key != self._chain_key:
            self._chain = dressing_chain(self.problem.hamiltonian, key, self.config.prune_tol)
            self._chain_key = key
        return self._chain

    def product_state(self, thetas) -> ProductState:
        states = [circuit_state(ref, [w for _, w in circ], [thetas[i] for i, _ in circ])
                  for ref, circ in zip(self.refs, self.circuits)]
        return ProductState(self.clustering, states)

    def energy_and_gradient(self, theta, gradient: bool = True):
        theta = np.asarray(theta, dtype=float)
        n_intra = len(self.intra)
        thetas, phis = theta[:n_intra], theta[n_intra:]
        chain = self.dressed_chain(phis)
        hd = chain[-1]
        state = self.product_state(thetas)
        factors = state.factor_expectations(hd.xs, hd.zs)
        energy = float(np.dot(hd.coeffs, np.prod(factors, axis=0)).real)
        if not gradient:
            return energy, None
        grad = np.zeros(len(theta))
        for c, (qubits, ref, circ) in enumerate(zip(self.groups, self.refs, self.circuits)):
            if not circ:
                continue
            others = np.prod(np.delete(factors, c, axis=0), axis=0)
            h_c = PauliSum(len(qubits), gather_bits(hd.xs, qubits), gather_bits(hd.zs, qubits),
                           (hd.coeffs * others).real)
            mat = h_c.to_sparse()
            _, g = circuit_energy_and_gradient(ref, [w for _, w in circ],
                                               [thetas[i] for i, _ in circ], mat.dot)
            for (i, _), gi in zip(circ, g):
                grad[i] = gi
        for j, e in enumerate(self.dressing):
            # d/dphi of exp(-i phi P) A exp(i phi P) is i [C(A), P]
            d = commutator_with_word(chain[j + 1], e.generator) * 1j
            for later, phi in zip(self.dressing[j + 1:], phis[j + 1:]):
                d = conjugate_by_rotation(d, later.generator, float(phi), 0.0)
            grad[n_intra + j] = state.expectation(d).real
        return energy, grad

    def full_state(self) -> np.ndarray:
        """The ansatz state on the whole register, built gate by gate."""
        psi = basis_state(self.n_qubits, self.problem.reference)
        for e in self.intra:
            psi = apply_rotation(psi, e.generator, e.angle)
        for e in reversed(self.dressing):
            psi = apply_rotation(psi, e.generator, e.angle)
        return psi

    state = full_state

    def dressed_hamiltonian(self) -> PauliSum:
        return self.dressed_chain([e.angle for e in self.dressing])[-1]

    def clustered_energy(self) -> float:
        return self.energy_and_gradient(self.parameters(), gradient=False)[0]

    # driver -----------------------------------------------------------------------

    def _optimize(self):
        theta0 = self.parameters()
        free = np.array([k for k, e in enumerate(self.elements)
                         if not (e.placement == CROSS and id(e) in self.frozen)], dtype=int)

        def objective(x):
            theta = theta0.copy()
            theta[free] = x
            f, g = self.energy_and_gradient(theta)
            return f, g[free]

        res = minimize(objective, theta0[free], gtol=self.config.gtol,
                       max_evals=self.config.max_evals)
        theta = theta0.copy()
        theta[free] = res.x
        self.set_parameters(theta)
        return res

    def _maybe_recluster(self):
        cfg = self.config
        if cfg.clustering != "on_the_fly" or cfg.n_clusters == 1 or not self.elements:
            return
        mi = mutual_information(self.full_state())
        new = partition(mi, cfg.n_clusters, cfg.partition_method, self._capacities(),
                        seed=cfg.seed)
        self.recluster(new)

    def pool_gradients(self) -> np.ndarray:
        theta = self.parameters()
        hd = self.dressed_chain(theta[len(self.intra):])[-1]
        return pool_gradients(hd, self.product_state(theta[:len(self.intra)]), self.problem.pool)

    def run(self) -> RunResult:
        cfg = self.config
        energy = self.clustered_energy()
        for it in range(1, cfg.max_iterations + 1):
            started = time.perf_counter()
            self._maybe_recluster()
            g = self.pool_gradients()
            gmax = float(np.max(np.abs(g)))
            if gmax < cfg.epsilon:
                return self._finish(True, "gradient", energy, gmax)
            k = select_entangler(g)
            self.stall.update(k, float(g[k]))
            word = self.problem.pool[k]
            where, c = placement_of(word, self.clustering)
            elem = AnsatzElement(word, 0.0, it, where, c, k)
            if cfg.freeze_dressers:
                self.frozen.update(id(e) for e in self.dressing)
            if where == INTRA:
                self.intra.append(elem)
            else:
                self.dressing.append(elem)
            self._rebuild()
            res = self._optimize()
            energy = res.energy
            self.record(it, elem, res, gmax, len(self.dressed_hamiltonian()), self.parameters(),
                        started, clustering=self.clustering.assignment,
                        n_dressers=len(self.dressing))
        g = self.pool_gradients()
        gmax = float(np.max(np.abs(g)))
        converged = gmax < cfg.epsilon
        return self._finish(converged, "gradient" if converged else "budget", energy, gmax)

    def _finish(self, converged, reason, energy, gmax) -> RunResult:
        return self.result(converged, reason, energy, gmax, self.elements,
                           len(self.dressed_hamiltonian()), self.clustering)
