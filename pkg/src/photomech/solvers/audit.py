"""Energy bookkeeping of a trajectory."""
from dataclasses import dataclass

import numpy as np

from .common import closure


@dataclass
class EnergyReport:
    t: np.ndarray
    kinetic: np.ndarray
    potential: np.ndarray
    external_work: np.ndarray
    dissipated: np.ndarray
    total: np.ndarray
    closure: np.ndarray
    closure_rel: np.ndarray

    @property
    def max_closure(self):
        return float(np.abs(self.closure_rel).max())

    def nonincreasing(self, tol=0.0):
        """True when the total energy never grows by more than tol (relative) per step."""
        scale = max(np.abs(self.total).max(), 1e-300)
        return bool(np.all(np.diff(self.total) <= tol * scale))

    def step_balance(self):
        """Per-step change of total energy and dissipated energy."""
        return np.diff(self.total), np.diff(self.dissipated)


def energy_audit(traj):
    """Kinetic, potential, external work, cumulative dissipation and closure residual
    H - H0 - W_ext + D of a trajectory."""
    res, rel = closure(traj)
    return EnergyReport(
        t=traj.times, kinetic=traj.series("kinetic"), potential=traj.series("potential"),
        external_work=traj.series("external_work"), dissipated=traj.series("dissipated"),
        total=traj.series("total"), closure=res, closure_rel=rel)
