"""Solver configuration, overridable through a JSON config document."""

import json
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class SolverConfig:
    """Tunables for the first-order convex subproblem solvers.

    Step schedule: warm-up with diminishing lengths step_a/(k+step_b),
    then adaptive halving/doubling epochs until the step floor or the
    iteration cap is reached.
    """

    tolerance: float = 1e-7
    max_iters: int = 50_000
    step_a: float = 1.0
    step_b: float = 10.0
    warmup_iters: int = 300
    epoch_len: int = 40
    feas_tol: float = 1e-9
    unbounded_threshold: float = 1e8
    mu_min: float = 1e-6
    step_floor: float = 1e-15

    def with_overrides(self, **kwargs) -> "SolverConfig":
        return replace(self, **kwargs)


def load_solver_config(path) -> SolverConfig:
    """Read a JSON document; unknown keys are rejected, missing keys default."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    known = {f.name for f in fields(SolverConfig)}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown solver config keys: {sorted(unknown)}")
    return SolverConfig(**doc)
