"""Implicit time integration of the Lagrangian and Hamiltonian forms.

Both solvers share the dof classification of :class:`Stepper`.  With the
midpoint rule, second- and first-order rows use the gradient at the
midpoint state while algebraic rows (electric potential, massless
free-space deformation) are equilibrated at the end of the step.
"""
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .common import Stepper
from .config import Trajectory
from .newton import newton


def _rows(mask):
    return sp.diags(mask.astype(float))


def _gradients(st, u0, u1, t0, t1, midpoint, tangent):
    """End-of-step or mixed midpoint/end gradient of U and its Jacobian in u1."""
    model = st.model
    R1, K1 = model.residual(u1, t1, tangent)
    if not midpoint:
        return R1, K1
    mid_rows = st.second | st.first
    Rm, Km = model.residual(0.5 * (u0 + u1), 0.5 * (t0 + t1), tangent)
    G = np.where(mid_rows, Rm, R1)
    if not tangent:
        return G, None
    return G, (_rows(mid_rows) @ (0.5 * Km) + _rows(~mid_rows) @ K1).tocsr()


def solve_dynamic_lagrangian(problem, cfg):
    """Second-order semi-discrete system M a + C v + dU/du = 0."""
    st = Stepper(problem, cfg)
    midpoint = cfg.scheme == "midpoint"
    M, free = st.M, st.free
    traj = Trajectory(problem.layout, kind="hamilton-principle")
    times = cfg.times()
    u, it, rn = st.project(problem.u0, times[0])
    v = np.where(st.massive, problem.v0, 0.0)
    rec = st.record(times[0], u, v, M @ v, iters=it, resnorm=rn)
    traj.append(rec)
    scale = st.residual_scale()
    for t1 in times[1:]:
        u0, v0, t0 = rec.u, rec.rates, rec.t
        dt = t1 - t0
        C = st.damping(u0)

        def rates(u1):
            du = u1 - u0
            if midpoint:
                return np.where(st.massive, 2.0 * du / dt - v0, du / dt)
            return du / dt

        def fun(z, tangent):
            u1 = st.full(z, u0, t1)
            v1 = rates(u1)
            G, K = _gradients(st, u0, u1, t0, t1, midpoint, tangent)
            r = M @ (v1 - v0) / dt + C @ (u1 - u0) / dt + G
            if not tangent:
                return r[free], None
            J = (M * ((2.0 if midpoint else 1.0) / dt ** 2) + C / dt + K).tocsr()
            return r[free], J[free][:, free]

        z, it, rn = newton(fun, problem.apply(u0, t1)[free], cfg.newton_tol, cfg.max_iter, scale)
        u1 = st.full(z, u0, t1)
        v1 = rates(u1)
        rec = st.record(t1, u1, v1, M @ v1, prev=rec, iters=it, resnorm=rn,
                        C=C if st.damped.any() else None)
        traj.append(rec)
    return traj


def solve_dynamic_hamiltonian(problem, cfg):
    """First-order phase-space system in (u, p) with p on the massive dofs.

    Position rows:  M (u1 - u0) / dt = p*        (p* = p_mid or p1)
    Momentum rows:  (p1 - p0) / dt + C (u1 - u0) / dt + dU/du = 0
    Electric momentum is identically zero and only monitored.
    """
    st = Stepper(problem, cfg)
    midpoint = cfg.scheme == "midpoint"
    M, free = st.M, st.free
    lay = problem.layout
    mi = np.flatnonzero(st.massive)
    Mmm = M[mi][:, mi].tocsc()
    Minv = spla.splu(Mmm) if mi.size else None
    Mm = M[mi].tocsr()
    # selection of momentum unknowns into free rows
    pos = np.full(lay.ndof, -1)
    pos[mi] = np.arange(mi.size)
    fr = free[st.massive[free]]
    S = sp.csr_matrix((np.ones(fr.size), (np.searchsorted(free, fr), pos[fr])),
                      shape=(free.size, mi.size))
    c = 0.5 if midpoint else 1.0
    traj = Trajectory(lay, kind="hamilton-equations")
    times = cfg.times()
    u, it, rn = st.project(problem.u0, times[0])
    v = np.where(st.massive, problem.v0, 0.0)
    p = np.zeros(lay.ndof)
    p[mi] = Mm @ v

    def kinetic(q):
        return 0.5 * float(q @ Minv.solve(q)) if mi.size else 0.0

    def velocity(q, du, dt):
        out = du / dt
        if mi.size:
            out[mi] = Minv.solve(q)
        return out

    rec = st.record(times[0], u, v, p, iters=it, resnorm=rn, kinetic=kinetic(p[mi]))
    traj.append(rec)
    scale = st.residual_scale()
    nf = free.size
    for t1 in times[1:]:
        u0, t0 = rec.u, rec.t
        q0 = rec.momenta[mi]
        dt = t1 - t0
        C = st.damping(u0)

        def fun(w, tangent):
            u1 = st.full(w[:nf], u0, t1)
            q = w[nf:]
            du = u1 - u0
            G, K = _gradients(st, u0, u1, t0, t1, midpoint, tangent)
            r_mom = (C @ du / dt + G)[free] + S @ (q - q0) / dt
            qs = 0.5 * (q0 + q) if midpoint else q
            r_pos = Mm @ du / dt - qs
            r = np.concatenate([r_mom, r_pos])
            if not tangent:
                return r, None
            A = (C / dt + K).tocsr()[free][:, free]
            J = sp.bmat([[A, S / dt], [Mm[:, free] / dt, -c * sp.identity(mi.size)]],
                        format="csr")
            return r, J

        w0 = np.concatenate([problem.apply(u0, t1)[free], q0])
        w, it, rn = newton(fun, w0, cfg.newton_tol, cfg.max_iter, scale)
        u1 = st.full(w[:nf], u0, t1)
        q1 = w[nf:]
        p1 = np.zeros(lay.ndof)
        p1[mi] = q1
        v1 = velocity(q1, u1 - u0, dt)
        rec = st.record(t1, u1, v1, p1, prev=rec, iters=it, resnorm=rn, kinetic=kinetic(q1),
                        C=C if st.damped.any() else None)
        traj.append(rec)
    return traj
