"""Solver settings and trajectory containers."""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

INTEGRATORS = ("midpoint", "backward-euler")
FORMULATIONS = ("dirichlet", "hamilton-principle", "hamilton-equations")


@dataclass(frozen=True)
class SolverConfig:
    """Time stepping and Newton settings.

    integrator defaults to implicit midpoint for energetic runs and
    backward Euler for dissipative runs.
    """

    newton_tol: float = 1e-10
    max_iter: int = 25
    dt: float = 0.1
    t_end: float = 1.0
    integrator: Optional[str] = None
    formulation: str = "dirichlet"
    dissipative: bool = False
    constraint_tol: float = 1e-12

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.newton_tol > 0:
            raise ValueError("newton_tol must be positive")
        if self.t_end < 0:
            raise ValueError("t_end must be nonnegative")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.integrator is not None and self.integrator not in INTEGRATORS:
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if self.formulation not in FORMULATIONS:
            raise ValueError(f"unknown formulation {self.formulation!r}")

    @property
    def scheme(self):
        if self.integrator is not None:
            return self.integrator
        return "backward-euler" if self.dissipative else "midpoint"

    @property
    def n_steps(self):
        return int(round(self.t_end / self.dt))

    def times(self):
        return self.dt * np.arange(self.n_steps + 1)


@dataclass
class StepRecord:
    t: float
    u: np.ndarray
    rates: np.ndarray
    momenta: np.ndarray
    diagnostics: dict = field(default_factory=dict)


@dataclass
class Trajectory:
    """Time-ordered solver output in the global dof layout."""

    layout: object
    steps: list = field(default_factory=list)
    kind: str = ""

    def append(self, rec):
        if self.steps and not rec.t > self.steps[-1].t:
            raise ValueError("trajectory times must increase")
        self.steps.append(rec)

    def __len__(self):
        return len(self.steps)

    def __getitem__(self, i):
        return self.steps[i]

    @property
    def times(self):
        return np.array([s.t for s in self.steps])

    @property
    def states(self):
        return np.array([s.u for s in self.steps])

    def series(self, key):
        return np.array([s.diagnostics[key] for s in self.steps])

    def state(self, i):
        from ..femcore.layout import FieldState

        s = self.steps[i]
        return FieldState.from_vector(self.layout, s.u, s.t, rates=s.rates, momenta=s.momenta,
                                      extra=dict(s.diagnostics))
