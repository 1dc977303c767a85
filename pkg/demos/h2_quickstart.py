"""H2 in a minimal basis, end to end.

Builds the qubit Hamiltonian from the bundled FCIDUMP, shows the operator
pool, and runs every engine to the exact ground-state energy.

    python demos/h2_quickstart.py
"""
from clustervqe import EngineConfig, Problem, load_fixture, run_engine

molecule = load_fixture("h2_0.735")
problem = Problem.from_molecule(molecule, "h2")
exact = problem.ensure_exact()

print(f"{problem.n_qubits} qubits, {len(problem.hamiltonian)} Pauli terms")
print(f"HF reference bits {format(problem.reference, '04b')[::-1]}, "
      f"HF energy {molecule.metadata['hf_energy']:.8f}")
print("pool:", " ".join(p.label for p in problem.pool))
print(f"exact energy {exact:.10f}\n")

for engine in ("vqe", "adapt", "iqcc", "cluster"):
    res = run_engine(EngineConfig(engine=engine), problem)
    print(f"{engine:8s} E = {res.final_energy:.10f}  error {res.final_energy - exact:9.2e}  "
          f"iterations {len(res.records)}")
