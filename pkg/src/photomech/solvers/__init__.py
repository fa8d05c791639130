"""Quasi-static and dynamic solution paths of the discrete variational problem."""
from .audit import EnergyReport, energy_audit
from .config import SolverConfig, StepRecord, Trajectory
from .dynamics import solve_dynamic_hamiltonian, solve_dynamic_lagrangian
from .newton import newton
from .problem import Dirichlet, Problem
from .quasistatic import solve_quasistatic

__all__ = ["EnergyReport", "energy_audit", "SolverConfig", "StepRecord", "Trajectory",
           "solve_dynamic_hamiltonian", "solve_dynamic_lagrangian", "newton", "Dirichlet",
           "Problem", "solve_quasistatic"]
