"""Structured trilinear-hexahedron meshes of a matter box inside a free-space shell."""
from dataclasses import dataclass, field

import numpy as np

# reference node coordinates of the 8-node hexahedron
HEX_NODES = np.array([
    [-1, -1, -1], [1, -1, -1], [1, 1, -1], [-1, 1, -1],
    [-1, -1, 1], [1, -1, 1], [1, 1, 1], [-1, 1, 1],
], dtype=float)

FACE_NAMES = ("xmin", "xmax", "ymin", "ymax", "zmin", "zmax")
_G = 1.0 / np.sqrt(3.0)
GAUSS_1D = np.array([-_G, _G])


def face_axis_side(name):
    idx = FACE_NAMES.index(name)
    return idx // 2, (-1.0 if idx % 2 == 0 else 1.0)


def shape(xi):
    """Trilinear shape functions and their reference gradients at local points.

    xi: (..., 3) -> N (..., 8), dN (..., 8, 3)
    """
    xi = np.asarray(xi, dtype=float)
    t = 1.0 + xi[..., None, :] * HEX_NODES  # (..., 8, 3)
    N = 0.125 * t[..., 0] * t[..., 1] * t[..., 2]
    dN = np.empty(t.shape)
    dN[..., 0] = 0.125 * HEX_NODES[:, 0] * t[..., 1] * t[..., 2]
    dN[..., 1] = 0.125 * HEX_NODES[:, 1] * t[..., 0] * t[..., 2]
    dN[..., 2] = 0.125 * HEX_NODES[:, 2] * t[..., 0] * t[..., 1]
    return N, dN


def volume_rule():
    g = GAUSS_1D
    pts = np.array([[a, b, c] for c in g for b in g for a in g])
    return pts, np.ones(len(pts))


def face_rule(name):
    axis, side = face_axis_side(name)
    others = [d for d in range(3) if d != axis]
    pts = []
    for b in GAUSS_1D:
        for a in GAUSS_1D:
            p = np.empty(3)
            p[axis] = side
            p[others[0]] = a
            p[others[1]] = b
            pts.append(p)
    return np.array(pts), np.ones(4), others


def physical_gradients(xi, Xe):
    """Shape values, material gradients and |det dX/dxi| at local points of one element."""
    N, dN = shape(xi)
    Jac = np.einsum("...ai,aj->...ji", dN, Xe)  # Jac[j, i] = dX_j/dxi_i
    detJ = np.linalg.det(Jac)
    if np.any(detJ <= 0):
        raise ValueError("element with non-positive reference volume")
    dNdX = np.einsum("...aj,...ji->...ai", dN, np.linalg.inv(Jac))
    return N, dNdX, detJ


@dataclass
class Facet:
    element: int
    face: str
    normal: np.ndarray
    neighbor: int = -1  # free-space element across the facet, -1 if none


@dataclass
class Mesh:
    X: np.ndarray  # (n_nodes, 3) material coordinates
    elements: np.ndarray  # (n_elements, 8)
    matter: np.ndarray  # (n_elements,) bool
    facets: list  # interface facets of the matter box
    outer_nodes: np.ndarray  # nodes on the truncated free-space boundary
    matter_extent: np.ndarray
    grid_shape: tuple = ()
    _lookup: dict = field(default_factory=dict, repr=False)

    @property
    def n_nodes(self):
        return len(self.X)

    @property
    def n_elements(self):
        return len(self.elements)

    def matter_nodes(self):
        return np.unique(self.elements[self.matter])

    def local_coords(self, e, X):
        """Local coordinates of material point(s) X in axis-aligned element e."""
        Xe = self.X[self.elements[e]]
        lo, hi = Xe.min(axis=0), Xe.max(axis=0)
        return 2.0 * (np.asarray(X) - lo) / (hi - lo) - 1.0

    def nearest_node(self, point):
        return int(np.argmin(np.linalg.norm(self.X - np.asarray(point, dtype=float), axis=1)))

    def nodes_in_box(self, lo=None, hi=None, tol=1e-9):
        lo = np.full(3, -np.inf) if lo is None else np.asarray(lo, dtype=float)
        hi = np.full(3, np.inf) if hi is None else np.asarray(hi, dtype=float)
        inside = np.all((self.X >= lo - tol) & (self.X <= hi + tol), axis=1)
        return np.flatnonzero(inside)


def _axis_coords(length, cells, shell, shell_cells):
    mid = np.linspace(0.0, length, cells + 1)
    if shell <= 0 or shell_cells <= 0:
        return mid, 0
    left = np.linspace(-shell, 0.0, shell_cells + 1)[:-1]
    right = np.linspace(length, length + shell, shell_cells + 1)[1:]
    return np.concatenate([left, mid, right]), shell_cells


def box_mesh(extent, cells, shell=0.0, shell_cells=1):
    """Matter box [0, extent] with `cells` per axis, surrounded by a shell.

    `shell` and `shell_cells` may be scalars or per-axis triples; a zero
    thickness leaves that axis without free space.
    """
    extent = np.broadcast_to(np.asarray(extent, dtype=float), (3,))
    cells = np.broadcast_to(np.asarray(cells, dtype=int), (3,))
    shell = np.broadcast_to(np.asarray(shell, dtype=float), (3,))
    shell_cells = np.broadcast_to(np.asarray(shell_cells, dtype=int), (3,))
    if np.any(extent <= 0) or np.any(cells < 1):
        raise ValueError("matter extents and cell counts must be positive")
    axes, offsets = [], []
    for d in range(3):
        c, off = _axis_coords(extent[d], cells[d], shell[d], shell_cells[d])
        axes.append(c)
        offsets.append(off)
    nx, ny, nz = (len(a) for a in axes)
    gx, gy, gz = np.meshgrid(*axes, indexing="ij")
    # node id = i + nx*(j + ny*k)
    X = np.stack([gx.ravel(order="F"), gy.ravel(order="F"), gz.ravel(order="F")], axis=1)

    def nid(i, j, k):
        return i + nx * (j + ny * k)

    ex, ey, ez = nx - 1, ny - 1, nz - 1
    elements, matter, cell_of = [], [], {}
    for k in range(ez):
        for j in range(ey):
            for i in range(ex):
                conn = [nid(i + int(a > 0), j + int(b > 0), k + int(c > 0)) for a, b, c in HEX_NODES]
                cell_of[(i, j, k)] = len(elements)
                elements.append(conn)
                inside = (offsets[0] <= i < offsets[0] + cells[0]
                          and offsets[1] <= j < offsets[1] + cells[1]
                          and offsets[2] <= k < offsets[2] + cells[2])
                matter.append(inside)
    elements = np.array(elements, dtype=int)
    matter = np.array(matter, dtype=bool)

    facets = []
    for (i, j, k), e in cell_of.items():
        if not matter[e]:
            continue
        for name in FACE_NAMES:
            axis, side = face_axis_side(name)
            idx = [i, j, k]
            idx[axis] += int(side)
            nb = cell_of.get(tuple(idx), -1)
            if nb >= 0 and matter[nb]:
                continue
            normal = np.zeros(3)
            normal[axis] = side
            facets.append(Facet(element=e, face=name, normal=normal, neighbor=nb))

    lo, hi = X.min(axis=0), X.max(axis=0)
    outer = np.zeros(len(X), dtype=bool)
    for d in range(3):
        if offsets[d] > 0:
            outer |= np.isclose(X[:, d], lo[d]) | np.isclose(X[:, d], hi[d])
    return Mesh(X=X, elements=elements, matter=matter, facets=facets,
                outer_nodes=np.flatnonzero(outer), matter_extent=np.array(extent),
                grid_shape=(ex, ey, ez))
