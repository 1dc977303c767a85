"""Plain VQE over the whole pool and qubit-ADAPT-VQE on the full register."""
from __future__ import annotations

import time

import numpy as np

from ..optimize import minimize
from ..statevector import basis_state
from .base import Driver
from .common import (MONOLITHIC, AnsatzElement, RunResult, circuit_energy_and_gradient,
                     circuit_state, select_entangler, statevector_pool_gradients)


class _StatevectorDriver(Driver):
    def __init__(self, config, problem, callback=None):
        super().__init__(config, problem, callback)
        self.h_matrix = problem.hamiltonian.to_sparse()
        self.reference = basis_state(self.n_qubits, problem.reference)

    def h_apply(self, psi):
        return self.h_matrix @ psi

    def optimize(self, words, x0):
        def objective(theta):
            return circuit_energy_and_gradient(self.reference, words, theta, self.h_apply)
        return minimize(objective, x0, gtol=self.config.gtol, max_evals=self.config.max_evals)

    def state(self) -> np.ndarray:
        """Final ansatz state on the full register."""
        elems = getattr(self, "elements", [])
        return circuit_state(self.reference, [e.generator for e in elems],
                             [e.angle for e in elems])

    def gradients(self, words, angles):
        psi = circuit_state(self.reference, words, angles)
        return statevector_pool_gradients(self.h_apply, psi, self.problem.pool)


class VQEDriver(_StatevectorDriver):
    """All pool entanglers at once, one Trotter-ordered product, optimized jointly."""

    name = "vqe"

    def run(self) -> RunResult:
        started = time.perf_counter()
        words = list(self.problem.pool)
        res = self.optimize(words, np.zeros(len(words)))
        g = self.gradients(words, res.x)
        elements = [AnsatzElement(w, float(t), 1, MONOLITHIC, None, k)
                    for k, (w, t) in enumerate(zip(words, res.x))]
        self.elements = elements
        self.record(1, None, res, float(np.max(np.abs(g))), len(self.problem.hamiltonian),
                    res.x, started)
        reason = "optimizer-converged" if res.converged else "budget"
        return self.result(res.converged, reason, res.energy, res.max_gradient, elements,
                           len(self.problem.hamiltonian))


class AdaptDriver(_StatevectorDriver):
    """Grow the ansatz one pool word at a time by largest energy gradient."""

    name = "adapt"

    def run(self) -> RunResult:
        cfg = self.config
        elements: list[AnsatzElement] = []
        self.elements = elements
        angles = np.zeros(0)
        energy = float(np.vdot(self.reference, self.h_apply(self.reference)).real)
        n_terms = len(self.problem.hamiltonian)
        for it in range(1, cfg.max_iterations + 1):
            started = time.perf_counter()
            words = [e.generator for e in elements]
            g = self.gradients(words, angles)
            gmax = float(np.max(np.abs(g)))
            if gmax < cfg.epsilon:
                return self.result(True, "gradient", energy, gmax, elements, n_terms)
            k = select_entangler(g)
            self.stall.update(k, float(g[k]))
            elem = AnsatzElement(self.problem.pool[k], 0.0, it, MONOLITHIC, None, k)
            elements.append(elem)
            res = self.optimize(words + [elem.generator], np.append(angles, 0.0))
            angles = res.x
            for e, t in zip(elements, angles):
                e.angle = float(t)
            energy = res.energy
            self.record(it, elem, res, gmax, n_terms, angles, started)
        g = self.gradients([e.generator for e in elements], angles)
        gmax = float(np.max(np.abs(g)))
        converged = gmax < cfg.epsilon
        return self.result(converged, "gradient" if converged else "budget", energy, gmax,
                           elements, n_terms)
