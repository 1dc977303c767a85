"""Loop bookkeeping shared by the iterative engines."""
from __future__ import annotations

import time
from typing import Callable

import numpy as np

from ..optimize import OptimizeResult
from .common import AnsatzElement, IterationRecord, RunResult, log
from .config import EngineConfig, Problem

STALL_REPEATS = 3


class StallWatch:
    """Warn when the same generator keeps winning with an unchanged gradient."""

    def __init__(self, repeats: int = STALL_REPEATS):
        self.repeats = repeats
        self.last: tuple[int, float] | None = None
        self.count = 0
        self.warned = 0

    def update(self, index: int, gradient: float) -> bool:
        if self.last is not None and self.last[0] == index and \
                abs(self.last[1] - gradient) <= 1e-10 * max(1.0, abs(gradient)):
            self.count += 1
        else:
            self.count = 0
        self.last = (index, gradient)
        if self.count >= self.repeats:
            log.warning("stall: generator %d selected %d times in a row with unchanged "
                        "gradient %.3e", index, self.count + 1, gradient)
            self.warned += 1
            return True
        return False


class Driver:
    """Common state for one engine run: config, problem, records, callbacks."""

    name = "engine"

    def __init__(self, config: EngineConfig, problem: Problem,
                 callback: Callable[["Driver", IterationRecord], None] | None = None):
        self.config = config.validate()
        self.problem = problem
        self.callback = callback
        self.records: list[IterationRecord] = []
        self.stall = StallWatch()
        self.n_qubits = problem.n_qubits
        if len(problem.pool) == 0:
            raise ValueError("empty operator pool")
        for p in problem.pool:
            if p.n_qubits != self.n_qubits:
                raise ValueError("pool and Hamiltonian sizes differ")

    def record(self, iteration: int, element: AnsatzElement | None, result: OptimizeResult,
               max_gradient: float, term_count: int, parameters, started: float,
               **extra) -> IterationRecord:
        rec = IterationRecord(
            iteration=iteration,
            generator=element.generator.label if element else "",
            pool_index=element.pool_index if element and element.pool_index is not None else -1,
            placement=element.placement_tag if element else "",
            energy=float(result.energy),
            max_gradient=float(max_gradient),
            term_count=int(term_count),
            parameters=[float(t) for t in np.atleast_1d(parameters)],
            wall_time=time.perf_counter() - started,
            n_evals=result.n_evals,
            **extra)
        self.records.append(rec)
        log.info("%s it %d: E=%.10f max|g|=%.3e terms=%d %s", self.name, iteration,
                 rec.energy, max_gradient, term_count, rec.generator)
        if self.callback is not None:
            self.callback(self, rec)
        return rec

    def result(self, converged: bool, stop_reason: str, energy: float, max_gradient: float,
               elements, term_count: int, clustering=None) -> RunResult:
        return RunResult(self.name, self.records, converged, stop_reason, float(energy),
                         float(max_gradient), list(elements), clustering, int(term_count),
                         self.problem.exact_energy)
