"""How fast the dressed Hamiltonian grows: iQCC against ClusterVQE on LiH.

iQCC folds every selected entangler into H.  ClusterVQE folds only the
entanglers that straddle the two 5-qubit clusters and simulates the rest
inside the clusters, so its dressed operator stays smaller once intra-cluster
words start being picked.  ADAPT is shown as the full-register reference.

    python demos/lih_term_growth.py [lih_1.547|lih_2.4]

Takes about two minutes.
"""
import sys

from clustervqe import EngineConfig, Problem, load_fixture, run_engine

name = sys.argv[1] if len(sys.argv) > 1 else "lih_1.547"
problem = Problem.from_molecule(load_fixture(name), name)
exact = problem.ensure_exact()

runs = {
    "adapt": run_engine(EngineConfig(engine="adapt"), problem),
    "iqcc": run_engine(EngineConfig(engine="iqcc"), problem),
    "cluster": run_engine(EngineConfig(engine="cluster", clustering="mi"), problem),
}
print(f"{name}: exact {exact:.8f}, ClusterVQE clusters {runs['cluster'].clustering.groups()}\n")
print(f"{'it':>3} | {'adapt err':>9} | {'iqcc err':>9} {'terms':>6} | "
      f"{'cluster err':>11} {'terms':>6} place")
n = max(len(r.records) for r in runs.values())
for i in range(n):
    cells = [f"{i + 1:3d}"]
    for label in ("adapt", "iqcc", "cluster"):
        recs = runs[label].records
        if i >= len(recs):
            cells.append(" " * (9 if label == "adapt" else 16))
            continue
        err = f"{recs[i].energy - exact:9.2e}"
        cells.append(err if label == "adapt" else f"{err} {recs[i].term_count:6d}")
    place = runs["cluster"].records[i].placement if i < len(runs["cluster"].records) else ""
    print(" | ".join(cells), place)
