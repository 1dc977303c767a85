"""Iterative qubit coupled cluster: optimized entanglers are folded into H."""
from __future__ import annotations

import time

import numpy as np

from ..optimize import minimize
from ..pauli import PauliSum, anticommute_mask, conjugate_by_rotation
from ..statevector import apply_rotation, basis_state, expectation_complex
from .base import Driver
from .common import MONOLITHIC, AnsatzElement, RunResult, pool_gradients, select_entangler


def single_angle_coefficients(h: PauliSum, p, reference: np.ndarray) -> tuple[float, float, float]:
    """``(a, b, c)`` with ``<ref| e^{-i t P} H e^{i t P} |ref> = a + b cos 2t + c sin 2t``."""
    anti = anticommute_mask(h.xs, h.zs, p.x, p.z)
    h_comm = PauliSum(h.n_qubits, h.xs[~anti], h.zs[~anti], h.coeffs[~anti])
    h_anti = PauliSum(h.n_qubits, h.xs[anti], h.zs[anti], h.coeffs[anti])
    a = expectation_complex(reference, h_comm).real
    b = expectation_complex(reference, h_anti).real
    c = expectation_complex(reference, (h_anti @ PauliSum.from_word(p)) * 1j).real
    return float(a), float(b), float(c)


class IQCCDriver(Driver):
    """Select, optimize one angle with earlier ones frozen, dress H, repeat."""

    name = "iqcc"

    def run(self) -> RunResult:
        cfg = self.config
        pool = self.problem.pool
        h = self.problem.hamiltonian
        ref = basis_state(self.n_qubits, self.problem.reference)
        energy = expectation_complex(ref, h).real
        elements: list[AnsatzElement] = []
        self.elements = elements
        used: set[int] = set()
        for it in range(1, cfg.max_iterations + 1):
            started = time.perf_counter()
            g = self._gradients(h, ref, used)
            gmax = float(np.max(np.abs(g)))
            if gmax < cfg.epsilon:
                self.dressed = h
                return self.result(True, "gradient", energy, gmax, elements, len(h))
            k = select_entangler(g)
            self.stall.update(k, float(g[k]))
            a, b, c = single_angle_coefficients(h, pool[k], ref)

            def objective(t, a=a, b=b, c=c):
                t = t[0]
                return (a + b * np.cos(2 * t) + c * np.sin(2 * t),
                        np.array([-2 * b * np.sin(2 * t) + 2 * c * np.cos(2 * t)]))

            res = minimize(objective, np.zeros(1), gtol=cfg.gtol, max_evals=cfg.max_evals)
            theta = float(res.x[0])
            h = conjugate_by_rotation(h, pool[k], theta, cfg.prune_tol)
            energy = res.energy
            elem = AnsatzElement(pool[k], theta, it, MONOLITHIC, None, k)
            elements.append(elem)
            if cfg.iqcc_exclude_used:
                used.add(k)
            self.record(it, elem, res, gmax, len(h), [e.angle for e in elements], started)
        g = self._gradients(h, ref, used)
        gmax = float(np.max(np.abs(g)))
        converged = gmax < cfg.epsilon
        self.dressed = h
        return self.result(converged, "gradient" if converged else "budget", energy, gmax,
                           elements, len(h))

    def state(self) -> np.ndarray:
        """``U_1 ... U_K |ref>``: the newest entangler acts first on the reference."""
        psi = basis_state(self.n_qubits, self.problem.reference)
        for e in reversed(getattr(self, "elements", [])):
            psi = apply_rotation(psi, e.generator, e.angle)
        return psi

    def _gradients(self, h, ref, used):
        g = pool_gradients(h, ref, self.problem.pool)
        if used:
            g[sorted(used)] = 0.0
        return g
