"""Quasi-Newton minimization of smooth objectives with analytic gradients."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

Objective = Callable[[np.ndarray], tuple[float, np.ndarray]]


class _BudgetExhausted(Exception):
    pass


@dataclass
class OptimizeResult:
    energy: float
    x: np.ndarray
    n_evals: int
    converged: bool
    max_gradient: float


def minimize(fun: Objective, x0, gtol: float = 1e-8, max_evals: int = 5000,
             restarts: int = 3) -> OptimizeResult:
    """L-BFGS-B on ``fun(x) -> (value, gradient)``.

    Returns the best point seen.  ``converged`` means the gradient max-norm
    there is at most ``gtol``; running out of evaluations is reported, not
    raised.  L-BFGS-B line searches can stall just above ``gtol`` near
    machine precision, so the search is restarted from the best point a few
    times before giving up.
    """
    x0 = np.asarray(x0, dtype=float).copy()
    best = {"f": np.inf, "x": x0.copy(), "g": None}
    count = [0]

    def wrapped(x):
        if count[0] >= max_evals:
            raise _BudgetExhausted
        f, g = fun(x)
        count[0] += 1
        g = np.asarray(g, dtype=float)
        if f < best["f"]:
            best.update(f=float(f), x=np.array(x, dtype=float), g=g.copy())
        return f, g

    if x0.size == 0:
        f, _ = wrapped(x0)
        return OptimizeResult(f, x0, 1, True, 0.0)

    start = x0
    for _ in range(restarts + 1):
        remaining = max_evals - count[0]
        if remaining <= 0:
            break
        try:
            _scipy_minimize(wrapped, start, jac=True, method="L-BFGS-B",
                            options={"gtol": gtol, "ftol": 0.0, "maxfun": remaining,
                                     "maxiter": remaining, "maxcor": 20})
        except _BudgetExhausted:
            break
        if best["g"] is not None and np.max(np.abs(best["g"])) <= gtol:
            break
        start = best["x"]
    gmax = float(np.max(np.abs(best["g"]))) if best["g"] is not None else np.inf
    return OptimizeResult(best["f"], best["x"], count[0], gmax <= gtol, gmax)
