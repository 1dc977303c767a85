"""Record dressed-Hamiltonian term counts of the LiH iQCC and ClusterVQE runs.

The acceptance suite re-runs the stored configurations and requires the
counts to match exactly:

    python tools/make_goldens.py
"""
import json
from pathlib import Path

from clustervqe.engines import EngineConfig, Problem, run_engine
from clustervqe.fermion import load_fixture

OUT = Path(__file__).resolve().parents[1] / "tests" / "goldens" / "lih_term_counts.json"
GEOMETRIES = ["lih_1.547", "lih_2.4"]
CONFIGS = {
    "iqcc": {"engine": "iqcc", "epsilon": 1e-4, "max_iterations": 40},
    "cluster": {"engine": "cluster", "epsilon": 1e-4, "max_iterations": 40, "clustering": "mi",
                "n_clusters": 2, "capacities": [5, 5], "partition_method": "exhaustive"},
}


def main():
    golden = {"configs": CONFIGS, "runs": {}}
    for name in GEOMETRIES:
        problem = Problem.from_molecule(load_fixture(name), name)
        problem.ensure_exact()
        entry = {}
        for label, cfg in CONFIGS.items():
            res = run_engine(EngineConfig.from_dict(cfg), problem)
            entry[label] = {
                "term_counts": [r.term_count for r in res.records],
                "pool_indices": [r.pool_index for r in res.records],
                "energies": [r.energy for r in res.records],
                "stop_reason": res.stop_reason,
            }
            if res.clustering is not None:
                entry[label]["clustering"] = list(res.clustering.assignment)
            print(f"{name} {label}: {len(res.records)} iterations, "
                  f"final terms {res.hamiltonian_terms}, error {res.final_energy - problem.exact_energy:.2e}")
        golden["runs"][name] = entry
    OUT.write_text(json.dumps(golden, indent=1) + "\n")


if __name__ == "__main__":
    main()
