"""Command-line front end: ingest, run, compare, mi, defaults.

Exit codes: 0 success (run: converged), 2 run stopped on its iteration
budget, 64 usage or configuration error, 65 data error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .bundle import DataError, load_problem, write_bundle
from .engines import (ConfigError, EngineConfig, make_driver, manifest_json, records_to_csv,
                      run_manifest)
from .entanglement import mi_to_csv, mutual_information
from .partition import (EXHAUSTIVE_PARTITION_MAX, METHODS, PartitionError, intercluster_mi,
                        partition)
from .statevector import SizeGuardError, exact_ground_state

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXIT_OK, EXIT_BUDGET, EXIT_USAGE, EXIT_DATA = 0, 2, 64, 65

# keys a run config may hold besides the engine settings
RUN_KEYS = {"input": None, "electrons": None, "output": "run", "assignment_file": None}

log = logging.getLogger("clustervqe")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# config ---------------------------------------------------------------------------

def default_config() -> dict:
    d = dict(RUN_KEYS)
    d.update(EngineConfig().to_dict())
    return d


def defaults_toml() -> str:
    lines = ["# clustervqe run configuration (flat key = value)"]
    for key, value in default_config().items():
        if value is None:
            lines.append(f"# {key} =")
        else:
            lines.append(f"{key} = {json.dumps(value)}")
    return "\n".join(lines) + "\n"


def _parse_value(text: str):
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def load_run_config(path: str | None, overrides: dict) -> tuple[dict, EngineConfig]:
    """Merge defaults, the TOML file and flag overrides; collect every error."""
    errors = []
    data = default_config()
    if path is not None:
        try:
            with open(path, "rb") as fh:
                loaded = tomllib.load(fh)
        except FileNotFoundError:
            raise UsageError(f"config file not found: {path}")
        except tomllib.TOMLDecodeError as exc:
            raise UsageError(f"{path}: {exc}")
        for key, value in loaded.items():
            if isinstance(value, dict):
                errors.append(f"config must be flat; section [{key}] not allowed")
            elif key not in data:
                errors.append(f"unknown config key {key!r}")
            else:
                data[key] = value
    for key, value in overrides.items():
        if key not in data:
            errors.append(f"unknown override key {key!r}")
        else:
            data[key] = value
    if data["input"] is None:
        errors.append("no input given (set 'input' or pass --input)")
    if data["assignment_file"] is not None and data["assignment"] is None:
        try:
            data["assignment"] = json.loads(Path(data["assignment_file"]).read_text())
        except (OSError, ValueError) as exc:
            errors.append(f"cannot read assignment_file: {exc}")
    engine_keys = {f.name for f in dataclasses.fields(EngineConfig)}
    cfg = None
    try:
        cfg = EngineConfig.from_dict({k: v for k, v in data.items() if k in engine_keys})
        errors += cfg.problems()
    except (ConfigError, TypeError, ValueError) as exc:
        errors += getattr(exc, "errors", [str(exc)])
    if errors:
        raise ConfigError(errors)
    return data, cfg


# commands -------------------------------------------------------------------------

def cmd_ingest(args) -> int:
    problem = load_problem(args.input, args.electrons)
    out = Path(args.out)
    manifest = write_bundle(problem, out, source=str(args.input))
    print(f"{manifest['n_qubits']} qubits, {manifest['n_terms']} terms, "
          f"pool {manifest['pool_size']}, reference {manifest['reference_bits']} -> {out}")
    return EXIT_OK


def cmd_run(args) -> int:
    overrides = {}
    for name in ("input", "electrons", "output", "engine", "epsilon", "max_iterations",
                 "clustering", "n_clusters", "partition_method", "prune_tol", "seed"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if args.capacities is not None:
        overrides["capacities"] = [int(c) for c in args.capacities.split(",")]
    for item in args.set or []:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = _parse_value(value.strip())
    data, cfg = load_run_config(args.config, overrides)
    problem = load_problem(data["input"], data["electrons"])
    exact = problem.ensure_exact()
    driver = make_driver(cfg, problem)
    result = driver.run()
    out = Path(data["output"])
    out.mkdir(parents=True, exist_ok=True)
    (out / "iterations.csv").write_text(records_to_csv(result))
    manifest = run_manifest(cfg, problem, result)
    manifest["input"] = str(data["input"])
    manifest["electrons"] = data["electrons"]
    (out / "manifest.json").write_text(manifest_json(manifest))
    clustering = list(result.clustering.assignment) if result.clustering else None
    (out / "clustering.json").write_text(json.dumps(clustering) + "\n")
    (out / "exact.json").write_text(json.dumps({"exact_energy": exact}, indent=2) + "\n")
    np.save(out / "state.npy", driver.state())
    status = "converged" if result.converged else "budget-stop"
    print(f"{result.engine}: {status} after {len(result.records)} iterations, "
          f"E = {result.final_energy:.10f}, error = {result.final_energy - exact:.3e} -> {out}")
    return EXIT_OK if result.converged else EXIT_BUDGET


def _read_run(path: Path) -> tuple[dict, list[dict]]:
    try:
        manifest = json.loads((path / "manifest.json").read_text())
        rows = list(csv.DictReader(io.StringIO((path / "iterations.csv").read_text())))
    except FileNotFoundError as exc:
        raise DataError(f"not a run directory: {path} ({exc.filename} missing)") from exc
    return manifest, rows


def cmd_compare(args) -> int:
    if len(args.runs) < 2:
        raise UsageError("compare needs at least two run directories")
    runs = [(Path(p), *_read_run(Path(p))) for p in args.runs]
    prints = {str(p): m["problem"]["fingerprint"] for p, m, _ in runs}
    if len(set(prints.values())) > 1:
        diff = ", ".join(f"{k}={v}" for k, v in prints.items())
        raise DataError(f"runs are on different problems: {diff}")
    labels, seen = [], set()
    for p, m, _ in runs:
        label = m["engine"] if m["engine"] not in seen else f"{m['engine']}:{p.name}"
        seen.add(label)
        labels.append(label)
    exact = runs[0][1]["exact_energy"]
    header = ["iteration", "exact_energy"]
    for label in labels:
        header += [f"{label}_energy", f"{label}_error", f"{label}_terms"]
    n = max(len(rows) for _, _, rows in runs)
    lines = [",".join(header)]
    for i in range(n):
        cells = [str(i + 1), "" if exact is None else f"{exact:.12g}"]
        for _, _, rows in runs:
            if i < len(rows):
                cells += [rows[i]["energy"], rows[i]["error"], rows[i]["term_count"]]
            else:
                cells += ["", "", ""]
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _mi_state(args):
    src = args.state
    if src.endswith(".npy"):
        try:
            return np.load(src), None
        except OSError as exc:
            raise DataError(f"cannot read state file {src}: {exc}") from exc
    if args.input is None:
        raise UsageError("--input is required unless --state is a .npy file")
    problem = load_problem(args.input, args.electrons)
    if src == "exact":
        energy, state = exact_ground_state(problem.hamiltonian, problem.n_electrons)
        return state, energy
    state_file = Path(src) / "state.npy"
    if not state_file.exists():
        raise DataError(f"{src}: no state.npy in run directory")
    return np.load(state_file), None


def cmd_mi(args) -> int:
    state, _ = _mi_state(args)
    mi = mutual_information(state)
    n = len(mi)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "mi.csv").write_text(mi_to_csv(mi))
    caps = [int(c) for c in args.capacities.split(",")] if args.capacities else None
    report = {}
    for method in METHODS:
        if method == "exhaustive" and n > EXHAUSTIVE_PARTITION_MAX:
            continue
        try:
            c = partition(mi, args.clusters, method, caps if method in ("exhaustive", "refine")
                          else None, qubo_solver=args.qubo_solver, seed=args.seed)
        except PartitionError as exc:
            report[method] = {"error": str(exc)}
            continue
        report[method] = {"assignment": list(c.assignment), "sizes": list(c.sizes),
                          "intercluster_mi": intercluster_mi(mi, c)}
    (out / "partitions.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    for method, r in report.items():
        if "assignment" in r:
            print(f"{method:11s} {r['assignment']} cut MI {r['intercluster_mi']:.6g}")
    return EXIT_OK


def cmd_defaults(args) -> int:
    sys.stdout.write(defaults_toml())
    return EXIT_OK


# entry point ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="clustervqe", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log every iteration")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ingest", help="build a problem bundle from FCIDUMP or Pauli text")
    s.add_argument("input", help="FCIDUMP file, Pauli-sum text file, or fixture:NAME")
    s.add_argument("--electrons", type=int, help="electron count (Pauli-sum input)")
    s.add_argument("--out", required=True, help="bundle directory to write")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("run", help="run an engine from a config file plus overrides")
    s.add_argument("--config", help="flat TOML config (see 'defaults')")
    s.add_argument("--input", help="bundle directory, FCIDUMP, Pauli text or fixture:NAME")
    s.add_argument("--electrons", type=int)
    s.add_argument("--output", help="run directory")
    s.add_argument("--engine", choices=["vqe", "adapt", "iqcc", "cluster"])
    s.add_argument("--epsilon", type=float)
    s.add_argument("--max-iterations", dest="max_iterations", type=int)
    s.add_argument("--clustering", choices=["spin_fallback", "fixed", "mi", "on_the_fly"])
    s.add_argument("--n-clusters", dest="n_clusters", type=int)
    s.add_argument("--capacities", help="comma-separated cluster sizes, e.g. 5,5")
    s.add_argument("--partition-method", dest="partition_method", choices=list(METHODS))
    s.add_argument("--prune-tol", dest="prune_tol", type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override any config key (repeatable)")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("compare", help="merge iteration tables of runs on one problem")
    s.add_argument("runs", nargs="+", help="run directories")
    s.add_argument("--out", help="CSV path (default: stdout)")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("mi", help="mutual information and partitions of a state")
    s.add_argument("--input", help="problem source (needed unless --state is .npy)")
    s.add_argument("--electrons", type=int)
    s.add_argument("--state", default="exact", help="'exact', a run directory, or a .npy file")
    s.add_argument("--out", required=True)
    s.add_argument("--clusters", type=int, default=2)
    s.add_argument("--capacities", help="comma-separated sizes for exhaustive/refine")
    s.add_argument("--qubo-solver", dest="qubo_solver", default="exhaustive",
                   choices=["exhaustive", "anneal"])
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_mi)

    s = sub.add_parser("defaults", help="print the default run configuration")
    s.set_defaults(func=cmd_defaults)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, SizeGuardError, PartitionError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
