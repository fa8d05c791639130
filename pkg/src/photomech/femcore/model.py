"""Galerkin assembly of the coupled electric / electronic / mechanical problem.

The discrete potential energy is

    U(u, t) = sum_matter ∫ (e_m + c_m + w_m) dV + ∫_free (e_m + eta W_nh) dV + f(t)·u

with f(t) the gradient of the (linear) external potentials.  The residual
is dU/du and the tangent its Hessian, both assembled from element-local
B-matrices mapping element dofs to the stacked local variables of
:mod:`photomech.femcore.pointwise`.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from ..energy import LoadData
from ..errors import NonPositiveJacobian
from . import mesh as hexmesh
from .layout import DofLayout
from .pointwise import N_FREE, N_MATTER, free_response, matter_response


def _constant(t):
    return 1.0


@dataclass
class Loads:
    """External data for a whole mesh.

    bulk applies at every matter quadrature point, surface maps matter-box
    face names ("xmin" ... "zmax") to boundary data.  The electronic body
    force may decay exponentially with depth below the upper face of
    `attenuation_axis` (a light-absorption profile).
    """

    bulk: LoadData = field(default_factory=LoadData)
    surface: dict = field(default_factory=dict)
    attenuation_axis: Optional[int] = None
    attenuation_depth: float = np.inf
    profile: Callable = _constant


def _b_matter(N, dNdX):
    """B-matrices for matter elements: (ne, nq, 36, 80)."""
    ne, nq = dNdX.shape[:2]
    B = np.zeros((ne, nq, N_MATTER, 80))
    for b in range(8):
        B[:, :, 0:3, b] = -dNdX[:, :, b, :]
        for k in range(3):
            B[:, :, 3 + 3 * k:6 + 3 * k, 8 + 3 * b + k] = dNdX[:, :, b, :]
        for s in range(2):
            for i in range(3):
                col = 32 + 6 * b + 3 * s + i
                B[:, :, 12 + 3 * s + i, col] = N[None, :, b]
                row = 18 + 9 * s + 3 * i
                B[:, :, row:row + 3, col] = dNdX[:, :, b, :]
    return B


def _b_free(dNdX):
    ne, nq = dNdX.shape[:2]
    B = np.zeros((ne, nq, N_FREE, 32))
    for b in range(8):
        B[:, :, 0:3, b] = -dNdX[:, :, b, :]
        for k in range(3):
            B[:, :, 3 + 3 * k:6 + 3 * k, 8 + 3 * b + k] = dNdX[:, :, b, :]
    return B


class Model:
    def __init__(self, mesh, params, loads=None):
        self.mesh = mesh
        self.params = params
        self.loads = loads or Loads()
        self.layout = DofLayout(mesh)
        lay = self.layout
        pts, wts = hexmesh.volume_rule()
        self.N, _ = hexmesh.shape(pts)
        ne = mesh.n_elements
        dNdX = np.empty((ne, len(pts), 8, 3))
        wdet = np.empty((ne, len(pts)))
        for e in range(ne):
            _, dNdX[e], detJ = hexmesh.physical_gradients(pts, mesh.X[mesh.elements[e]])
            wdet[e] = wts * detJ
        self.dNdX = dNdX
        self.wdet = wdet
        me, fe = lay.matter_elements, lay.free_elements
        self.Bm = _b_matter(self.N, dNdX[me])
        self.Bf = _b_free(dNdX[fe])
        self.Xq = np.einsum("qa,eai->eqi", self.N, mesh.X[mesh.elements[me]])
        self._sparsity = {}
        for name, dmap in (("m", lay.matter_dofs_map), ("f", lay.free_dofs_map)):
            nd = dmap.shape[1]
            self._sparsity[name] = (np.repeat(dmap, nd, axis=1).ravel(),
                                    np.tile(dmap, (1, nd)).ravel())
        self._unit_load = self._assemble_load_vector()
        self._mass = None

    # -- local variables -------------------------------------------------
    def matter_locals(self, u):
        ue = np.asarray(u)[self.layout.matter_dofs_map]
        return np.einsum("eqrc,ec->eqr", self.Bm, ue)

    def free_locals(self, u):
        ue = np.asarray(u)[self.layout.free_dofs_map]
        return np.einsum("eqrc,ec->eqr", self.Bf, ue)

    def _respond(self, g, elements, matter, tangent):
        try:
            if matter:
                return matter_response(g[..., 0:3], g[..., 3:12].reshape(g.shape[:2] + (3, 3)),
                                       g[..., 12:18].reshape(g.shape[:2] + (2, 3)),
                                       g[..., 18:36].reshape(g.shape[:2] + (2, 3, 3)),
                                       self.params, tangent)
            return free_response(g[..., 0:3], g[..., 3:12].reshape(g.shape[:2] + (3, 3)),
                                 self.params, tangent)
        except NonPositiveJacobian as exc:
            eid = int(elements[exc.element]) if exc.element is not None else None
            raise NonPositiveJacobian(f"det(F) <= 0 in element {eid}", element=eid) from None

    # -- energy, residual, tangent -------------------------------------------
    def assemble(self, u, tangent=True):
        """Internal energy, its gradient and (optionally) its Hessian (CSR)."""
        lay = self.layout
        me, fe = lay.matter_elements, lay.free_elements
        R = np.zeros(lay.ndof)
        energy = 0.0
        rows, cols, data = [], [], []
        blocks = (("m", me, self.Bm, lay.matter_dofs_map, self.matter_locals),
                  ("f", fe, self.Bf, lay.free_dofs_map, self.free_locals))
        for name, elems, B, dmap, locals_ in blocks:
            if len(elems) == 0:
                continue
            w = self.wdet[elems]
            u_dens, S, H = self._respond(locals_(u), elems, name == "m", tangent)
            energy += float(np.sum(u_dens * w))
            Re = np.einsum("eqrc,eqr,eq->ec", B, S, w)
            R += np.bincount(dmap.ravel(), weights=Re.ravel(), minlength=lay.ndof)
            if tangent:
                HB = np.matmul(H * w[..., None, None], B)
                Ke = np.matmul(np.swapaxes(B, -1, -2), HB).sum(axis=1)
                r, c = self._sparsity[name]
                rows.append(r)
                cols.append(c)
                data.append(Ke.ravel())
        K = None
        if tangent:
            K = sp.coo_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
                              shape=(lay.ndof, lay.ndof)).tocsr()
        return energy, R, K

    def internal_energy(self, u):
        return self.assemble(u, tangent=False)[0]

    def load_vector(self, t=0.0):
        """Gradient f(t) of the external potential V(u, t) = f(t)·u."""
        return self.loads.profile(t) * self._unit_load

    def potential_energy(self, u, t=0.0):
        return self.internal_energy(u) + float(self.load_vector(t) @ u)

    def residual(self, u, t=0.0, tangent=True):
        _, R, K = self.assemble(u, tangent)
        return R + self.load_vector(t), K

    def _assemble_load_vector(self):
        lay, mesh, ld = self.layout, self.mesh, self.loads
        f = np.zeros(lay.ndof)
        me = lay.matter_elements
        if len(me):
            conn = mesh.elements[me]
            w = self.wdet[me]
            Nw = np.einsum("qa,eq->eqa", self.N, w)
            b = ld.bulk
            att = np.ones(w.shape)
            if ld.attenuation_axis is not None and np.isfinite(ld.attenuation_depth):
                ax = ld.attenuation_axis
                top = mesh.matter_extent[ax]
                att = np.exp(-(top - self.Xq[..., ax]) / ld.attenuation_depth)
            nodal = Nw.sum(axis=1)  # (ne, 8)
            nodal_att = np.einsum("eqa,eq->ea", Nw, att)
            f += np.bincount(conn.ravel(), weights=(b.q_f * nodal).ravel(), minlength=lay.ndof)
            xd = lay.x_dofs(conn)
            f -= np.bincount(xd.ravel(), weights=(nodal[..., None] * np.asarray(b.b_mech)).ravel(),
                             minlength=lay.ndof)
            ed = lay.e_dofs(conn)
            f -= np.bincount(ed.ravel(),
                             weights=(nodal_att[..., None, None] * np.asarray(b.b_tron)).ravel(),
                             minlength=lay.ndof)
        for facet in mesh.facets:
            data = ld.surface.get(facet.face)
            if data is None:
                continue
            N, wA = self.facet_rule(facet)
            conn = mesh.elements[facet.element]
            nodal = N.T @ wA  # (8,)
            f[conn] += data.q_hat * nodal
            f[lay.x_dofs(conn).ravel()] -= np.outer(nodal, np.asarray(data.t_mech)).ravel()
            f[lay.e_dofs(conn).ravel()] -= (nodal[:, None, None] * np.asarray(data.t_tron)).ravel()
        return f

    def facet_rule(self, facet):
        """Shape values and area weights at the quadrature points of a matter facet."""
        pts, wts, others = hexmesh.face_rule(facet.face)
        Xe = self.mesh.X[self.mesh.elements[facet.element]]
        N, dN = hexmesh.shape(pts)
        Jac = np.einsum("qai,aj->qji", dN, Xe)
        area = np.linalg.norm(np.cross(Jac[:, :, others[0]], Jac[:, :, others[1]]), axis=1)
        return N, wts * area

    # -- inertia and damping ----------------------------------------------------
    def _scalar_mass(self, elements, weights=None):
        w = self.wdet[elements] if weights is None else weights
        return np.einsum("qa,qb,eq->eab", self.N, self.N, w)

    def _expand(self, Me, dofs):
        """Sparse matrix from per-element scalar blocks replicated over components."""
        ne, nn = Me.shape[:2]
        ncomp = dofs.shape[-1]
        d = dofs.reshape(ne, nn, ncomp)
        rows = np.broadcast_to(d[:, :, None, :], (ne, nn, nn, ncomp)).ravel()
        cols = np.broadcast_to(d[:, None, :, :], (ne, nn, nn, ncomp)).ravel()
        data = np.broadcast_to(Me[..., None], (ne, nn, nn, ncomp)).ravel()
        nd = self.layout.ndof
        return sp.coo_matrix((data, (rows, cols)), shape=(nd, nd)).tocsr()

    def mass_matrix(self):
        """Consistent mass: rho_mech on deformation dofs, rho_tron on electronic dofs."""
        if self._mass is None:
            lay, p = self.layout, self.params
            me = lay.matter_elements
            conn = self.mesh.elements[me]
            M0 = self._scalar_mass(me)
            M = self._expand(p.rho_mech * M0, lay.x_dofs(conn))
            if p.rho_tron > 0:
                M = M + self._expand(p.rho_tron * M0, lay.e_dofs(conn).reshape(len(me), 8, 6))
            self._mass = M
        return self._mass

    def damping_matrix(self, u_ref):
        """∫ J gamma0 N N on electronic dofs, J taken from configuration u_ref."""
        lay, p = self.layout, self.params
        me = lay.matter_elements
        conn = self.mesh.elements[me]
        F = self.matter_locals(u_ref)[..., 3:12].reshape(len(me), -1, 3, 3)
        J = np.linalg.det(F)
        M = self._scalar_mass(me, self.wdet[me] * J * p.gamma0)
        return self._expand(M, lay.e_dofs(conn).reshape(len(me), 8, 6))

    def volume(self, matter=True):
        sel = self.layout.matter_elements if matter else self.layout.free_elements
        return float(self.wdet[sel].sum())

    def dissipation_rate(self, u_ref, rates):
        """∫ 2 p_m dV = ∫ J gamma0 |v|^2 dV for nodal electronic rates."""
        C = self.damping_matrix(u_ref)
        return float(rates @ (C @ rates))

    # -- point evaluation ----------------------------------------------------------
    def point_locals(self, u, element, xi):
        """Local variables (E, F, ys, Fs) at local points of one element."""
        lay = self.layout
        conn = self.mesh.elements[element]
        N, dNdX, _ = hexmesh.physical_gradients(xi, self.mesh.X[conn])
        y, x, ys = lay.split(u)
        E = -np.einsum("a,qaj->qj", y[conn], dNdX)
        F = np.einsum("ai,qaj->qij", x[conn], dNdX)
        if self.mesh.matter[element]:
            yse = ys[lay.matter_index[conn]]
            yq = np.einsum("qa,asi->qsi", N, yse)
            Fs = np.einsum("asi,qaj->qsij", yse, dNdX)
        else:
            yq = np.zeros((len(N), 2, 3))
            Fs = np.zeros((len(N), 2, 3, 3))
        return E, F, yq, Fs

    def fluxes_at(self, u, element, xi):
        """Nominal flux D and Piola stress P at local points of an element."""
        E, F, yq, Fs = self.point_locals(u, element, xi)
        if self.mesh.matter[element]:
            _, S, _ = matter_response(E, F, yq, Fs, self.params, tangent=False)
        else:
            _, S, _ = free_response(E, F, self.params, tangent=False)
        return -S[:, 0:3], S[:, 3:12].reshape(-1, 3, 3)

    def interface_jumps(self, u, t=0.0):
        """Facet-integrated residuals of [[D]]·N = q_hat and -[[P]]·N = t_mech.

        The jump is free-space side minus matter side with N the outward
        matter normal; facets without a free-space neighbour use zero flux
        outside.
        """
        out = []
        scale = self.loads.profile(t)
        for facet in self.mesh.facets:
            pts, _, _ = hexmesh.face_rule(facet.face)
            N, wA = self.facet_rule(facet)
            Xe = self.mesh.X[self.mesh.elements[facet.element]]
            Xpts = N @ Xe
            Dm, Pm = self.fluxes_at(u, facet.element, pts)
            if facet.neighbor >= 0:
                Df, Pf = self.fluxes_at(u, facet.neighbor, self.mesh.local_coords(facet.neighbor, Xpts))
            else:
                Df, Pf = np.zeros_like(Dm), np.zeros_like(Pm)
            data = self.loads.surface.get(facet.face, LoadData())
            jD = (Df - Dm) @ facet.normal
            jP = -(Pf - Pm) @ facet.normal
            out.append({
                "element": facet.element, "face": facet.face, "neighbor": facet.neighbor,
                "area": float(wA.sum()),
                "jump_D": float(wA @ jD), "q_hat": float(scale * data.q_hat * wA.sum()),
                "residual_D": float(wA @ (jD - scale * data.q_hat)),
                "jump_P": wA @ jP,
                "residual_P": wA @ (jP - scale * np.asarray(data.t_mech)[None, :]),
            })
        return out

    # -- incremental dissipative functional ---------------------------------------
    def incremental_functional(self, u, u_prev, dt, t=0.0, damping=None):
        """U(u, t) + |u - u_prev|_C^2 / (2 dt), C lagged at u_prev."""
        C = self.damping_matrix(u_prev) if damping is None else damping
        du = np.asarray(u) - u_prev
        return self.potential_energy(u, t) + 0.5 * float(du @ (C @ du)) / dt

    def incremental_residual(self, u, u_prev, dt, t=0.0, tangent=True, damping=None):
        C = self.damping_matrix(u_prev) if damping is None else damping
        R, K = self.residual(u, t, tangent)
        R = R + C @ (np.asarray(u) - u_prev) / dt
        if tangent:
            K = (K + C / dt).tocsr()
        return R, K
