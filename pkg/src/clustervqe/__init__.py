"""Mutual-information qubit clustering and dressed-Hamiltonian VQE.

Exact statevector simulation of qubit-ADAPT-VQE, iQCC and ClusterVQE on
small molecular Hamiltonians.
"""
from .bundle import DataError, load_problem
from .engines import EngineConfig, Problem, run_engine
from .entanglement import mutual_information
from .fermion import build_qubit_hamiltonian, build_uccsd_pool, load_fixture
from .partition import Clustering, partition
from .pauli import PauliSum, PauliWord

__version__ = "0.1.0"

__all__ = [
    "Clustering", "DataError", "EngineConfig", "PauliSum", "PauliWord", "Problem",
    "build_qubit_hamiltonian", "build_uccsd_pool", "load_fixture", "load_problem",
    "mutual_information", "partition", "run_engine",
]
