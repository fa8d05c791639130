"""Global degree-of-freedom numbering and nodal field containers.

Global vector layout: [y (n), x (3n), ys (6 m)] with n mesh nodes and m
matter nodes.  Electronic unknowns exist only on matter nodes.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class DofLayout:
    def __init__(self, mesh):
        self.mesh = mesh
        n = mesh.n_nodes
        self.n_nodes = n
        self.matter_nodes = mesh.matter_nodes()
        self.n_matter_nodes = len(self.matter_nodes)
        self.matter_index = np.full(n, -1, dtype=int)
        self.matter_index[self.matter_nodes] = np.arange(self.n_matter_nodes)
        self.ndof = 4 * n + 6 * self.n_matter_nodes
        self.y_slice = slice(0, n)
        self.x_slice = slice(n, 4 * n)
        self.e_slice = slice(4 * n, self.ndof)
        self.kind = np.empty(self.ndof, dtype="<U1")
        self.kind[self.y_slice] = "y"
        self.kind[self.x_slice] = "x"
        self.kind[self.e_slice] = "e"

        conn = mesh.elements
        xd = self.x_dofs(conn)  # (ne, 8, 3)
        base = np.concatenate([conn, xd.reshape(len(conn), 24)], axis=1)
        self.free_elements = np.flatnonzero(~mesh.matter)
        self.matter_elements = np.flatnonzero(mesh.matter)
        self.free_dofs_map = base[self.free_elements]
        ed = self.e_dofs(conn[self.matter_elements])  # (nm_e, 8, 2, 3)
        self.matter_dofs_map = np.concatenate(
            [base[self.matter_elements], ed.reshape(len(self.matter_elements), 48)], axis=1)

    def y_dofs(self, nodes):
        return np.asarray(nodes, dtype=int)

    def x_dofs(self, nodes):
        nodes = np.asarray(nodes, dtype=int)
        return self.n_nodes + 3 * nodes[..., None] + np.arange(3)

    def e_dofs(self, nodes):
        m = self.matter_index[np.asarray(nodes, dtype=int)]
        if np.any(m < 0):
            raise ValueError("electronic dofs requested on a free-space node")
        return 4 * self.n_nodes + 6 * m[..., None, None] + 3 * np.arange(2)[:, None] + np.arange(3)

    def reference(self):
        u = np.zeros(self.ndof)
        u[self.x_slice] = self.mesh.X.ravel()
        return u

    def split(self, u):
        u = np.asarray(u)
        return (u[self.y_slice], u[self.x_slice].reshape(-1, 3),
                u[self.e_slice].reshape(-1, 2, 3))

    def join(self, y, x, ys):
        return np.concatenate([np.ravel(y), np.ravel(x), np.ravel(ys)])


@dataclass
class FieldState:
    """Nodal fields at time t, optionally with rates and momenta."""

    y: np.ndarray
    x: np.ndarray
    ys: np.ndarray
    t: float = 0.0
    rates: Optional[np.ndarray] = None  # global-vector layout
    momenta: Optional[np.ndarray] = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_vector(cls, layout, u, t=0.0, **kw):
        y, x, ys = layout.split(u)
        return cls(y=y.copy(), x=x.copy(), ys=ys.copy(), t=t, **kw)

    def vector(self, layout):
        return layout.join(self.y, self.x, self.ys)
