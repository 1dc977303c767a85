"""Mutual-information map of the LiH ground state and how each method cuts it.

Prints the MI matrix (nats) from the bundled fixture, then the bipartition
chosen by the exhaustive search, the swap refinement and the two QUBO
formulations, each with its inter-cluster MI.

    python demos/mi_partitions.py [lih_2.4]
"""
import sys

import numpy as np

from clustervqe.entanglement import load_mi_fixture
from clustervqe.partition import intercluster_mi, partition, spin_clustering

name = sys.argv[1] if len(sys.argv) > 1 else "lih_2.4"
mi = load_mi_fixture(name)
n = len(mi)

np.set_printoptions(precision=3, suppress=True, linewidth=120)
print(f"{name}: {n}-qubit MI matrix (alpha block 0-{n // 2 - 1}, beta block {n // 2}-{n - 1})")
print(mi)
print()
spin = spin_clustering(n)
print(f"{'spin split':11s} {spin.groups()}  cut {intercluster_mi(mi, spin):.5f}")
for method in ("exhaustive", "refine", "mi_qubo", "modularity"):
    caps = (n // 2, n - n // 2) if method in ("exhaustive", "refine") else None
    c = partition(mi, 2, method, caps)
    print(f"{method:11s} {c.groups()}  cut {intercluster_mi(mi, c):.5f}")
