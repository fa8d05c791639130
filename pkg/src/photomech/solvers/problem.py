"""Boundary-value problem: a discrete model plus prescribed dofs and initial data."""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..femcore.model import _constant


@dataclass
class Dirichlet:
    """u[dofs] = offset + profile(t) * amplitude."""

    dofs: np.ndarray
    offset: np.ndarray
    amplitude: np.ndarray
    profile: Callable = _constant

    def values(self, t):
        return self.offset + self.profile(t) * self.amplitude


@dataclass
class Problem:
    model: object
    dirichlet: list = field(default_factory=list)
    u0: Optional[np.ndarray] = None
    v0: Optional[np.ndarray] = None

    def __post_init__(self):
        lay = self.model.layout
        if self.u0 is None:
            self.u0 = lay.reference()
        if self.v0 is None:
            self.v0 = np.zeros(lay.ndof)
        fixed = np.zeros(lay.ndof, dtype=bool)
        for bc in self.dirichlet:
            fixed[bc.dofs] = True
        self.fixed = fixed
        self.free = np.flatnonzero(~fixed)

    @property
    def layout(self):
        return self.model.layout

    def add_dirichlet(self, dofs, values, amplitude=None, profile=_constant):
        dofs = np.asarray(dofs, dtype=int)
        values = np.broadcast_to(np.asarray(values, dtype=float), dofs.shape).ravel()
        if amplitude is None:
            amp, off = values, np.zeros_like(values)
        else:
            off, amp = values, np.broadcast_to(np.asarray(amplitude, float), dofs.shape).ravel()
        dofs = dofs.ravel()
        self.dirichlet.append(Dirichlet(dofs, off, amp, profile))
        self.__post_init__()

    def fix(self, dofs, values):
        """Time-independent prescribed values."""
        dofs = np.asarray(dofs, dtype=int)
        vals = np.broadcast_to(np.asarray(values, dtype=float), dofs.shape).ravel()
        dofs = dofs.ravel()
        self.dirichlet.append(Dirichlet(dofs, vals, np.zeros_like(vals)))
        self.__post_init__()

    def apply(self, u, t):
        u = np.array(u, dtype=float)
        for bc in self.dirichlet:
            u[bc.dofs] = bc.values(t)
        return u

    def freeze_mechanics(self):
        lay = self.layout
        self.fix(np.arange(lay.x_slice.start, lay.x_slice.stop), lay.mesh.X.ravel())

    def freeze_electronics(self, values=0.0):
        lay = self.layout
        self.fix(np.arange(lay.e_slice.start, lay.e_slice.stop), values)
