"""Write exact-ground-state mutual-information matrices next to the fixtures.

Uses only clustervqe itself:

    python tools/make_mi_fixtures.py
"""
from pathlib import Path

from clustervqe.engines import Problem
from clustervqe.entanglement import mi_to_csv, mutual_information
from clustervqe.fermion import load_fixture
from clustervqe.statevector import exact_ground_state

DATA = Path(__file__).resolve().parents[1] / "src" / "clustervqe" / "data"
NAMES = ["h2_0.735", "lih_1.547", "lih_2.4", "n2_1.09", "n2_1.6"]


def main():
    for name in NAMES:
        problem = Problem.from_molecule(load_fixture(name), name)
        energy, state = exact_ground_state(problem.hamiltonian, problem.n_electrons)
        (DATA / f"{name}.mi.csv").write_text(mi_to_csv(mutual_information(state)))
        print(f"{name}: {problem.n_qubits} qubits, E0 = {energy:.10f}")


if __name__ == "__main__":
    main()
