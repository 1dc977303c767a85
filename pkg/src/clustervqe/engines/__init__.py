"""Optimization drivers: VQE, qubit-ADAPT-VQE, iQCC and ClusterVQE."""
from __future__ import annotations

import json

from .adapt import AdaptDriver, VQEDriver
from .cluster import ClusterVQEDriver, balanced_capacities
from .common import (CROSS, INTRA, MONOLITHIC, AnsatzElement, ContractViolation, IterationRecord,
                     ProductState, RunResult, circuit_energy_and_gradient, circuit_state,
                     clustered_energy, dress_hamiltonian, dressing_chain, effective_generator,
                     placement_of, pool_gradients, select_entangler, statevector_pool_gradients)
from .config import CLUSTER_MODES, ENGINES, ConfigError, EngineConfig, Problem
from .iqcc import IQCCDriver, single_angle_coefficients

DRIVERS = {"vqe": VQEDriver, "adapt": AdaptDriver, "iqcc": IQCCDriver,
           "cluster": ClusterVQEDriver}

CSV_HEADER = "iteration,energy,error,max_gradient,term_count,placement,generator"


def make_driver(config: EngineConfig, problem: Problem, callback=None):
    return DRIVERS[config.validate().engine](config, problem, callback)


def run_engine(config: EngineConfig, problem: Problem, callback=None) -> RunResult:
    """Run one engine to convergence or budget; see :class:`RunResult`."""
    return make_driver(config, problem, callback).run()


def _g(value: float) -> str:
    return f"{value:.12g}"


def records_to_csv(result: RunResult) -> str:
    """One row per iteration at 12 significant digits; timings are left out."""
    exact = result.exact_energy
    rows = [CSV_HEADER]
    for r in result.records:
        error = "" if exact is None else _g(r.energy - exact)
        rows.append(",".join([str(r.iteration), _g(r.energy), error, _g(r.max_gradient),
                              str(r.term_count), r.placement, r.generator]))
    return "\n".join(rows) + "\n"


def run_manifest(config: EngineConfig, problem: Problem, result: RunResult) -> dict:
    return {
        "engine": result.engine,
        "config": config.to_dict(),
        "problem": {"name": problem.name, "fingerprint": problem.fingerprint(),
                    "n_qubits": problem.n_qubits, "n_terms": len(problem.hamiltonian),
                    "pool_size": len(problem.pool), "reference": problem.reference,
                    "n_electrons": problem.n_electrons},
        "exact_energy": result.exact_energy,
        "converged": result.converged,
        "stop_reason": result.stop_reason,
        "iterations": len(result.records),
        "final_energy": result.final_energy,
        "final_max_gradient": result.final_max_gradient,
        "final_term_count": result.hamiltonian_terms,
        "clustering": list(result.clustering.assignment) if result.clustering else None,
        "elements": [{"generator": e.generator.label, "angle": e.angle,
                      "selected_at": e.selected_at, "placement": e.placement_tag,
                      "pool_index": e.pool_index} for e in result.elements],
    }


def manifest_json(manifest: dict) -> str:
    return json.dumps(manifest, indent=2, sort_keys=True) + "\n"


__all__ = [
    "AdaptDriver", "AnsatzElement", "CLUSTER_MODES", "CROSS", "ClusterVQEDriver", "ConfigError",
    "ContractViolation", "DRIVERS", "ENGINES", "EngineConfig", "INTRA", "IQCCDriver",
    "IterationRecord", "MONOLITHIC", "Problem", "ProductState", "RunResult", "VQEDriver",
    "balanced_capacities", "circuit_energy_and_gradient", "circuit_state", "clustered_energy",
    "dress_hamiltonian", "dressing_chain", "effective_generator", "make_driver", "manifest_json",
    "placement_of", "pool_gradients", "records_to_csv", "run_engine", "run_manifest",
    "select_entangler", "single_angle_coefficients", "statevector_pool_gradients",
]
