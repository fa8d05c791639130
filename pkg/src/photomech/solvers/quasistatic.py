"""Quasi-static load stepping (energetic and incremental dissipative)."""
import numpy as np

from .common import Stepper
from .config import Trajectory
from .newton import newton


def solve_quasistatic(problem, cfg):
    """Sequence of stationary points of U, or of the incremental functional
    U + |du|_C^2 / (2 dt) when cfg.dissipative and gamma0 > 0."""
    st = Stepper(problem, cfg, inertia=False)
    model = problem.model
    traj = Trajectory(model.layout, kind="quasistatic")
    times = cfg.times()
    u, it, rn = st.project(problem.u0, times[0])
    zeros = np.zeros_like(u)
    rec = st.record(times[0], u, zeros, zeros, iters=it, resnorm=rn)
    traj.append(rec)
    free = st.free
    scale = st.residual_scale()
    for t1 in times[1:]:
        u0 = rec.u
        dt = t1 - rec.t
        C = st.damping(u0)
        dissipative = st.damped.any()

        def fun(z, tangent):
            u1 = st.full(z, u0, t1)
            if dissipative:
                R, K = model.incremental_residual(u1, u0, dt, t1, tangent, damping=C)
            else:
                R, K = model.residual(u1, t1, tangent)
            return R[free], (K[free][:, free] if tangent else None)

        z, it, rn = newton(fun, problem.apply(u0, t1)[free], cfg.newton_tol, cfg.max_iter, scale)
        u1 = st.full(z, u0, t1)
        v1 = (u1 - u0) / dt
        rec = st.record(t1, u1, v1, zeros, prev=rec, iters=it, resnorm=rn,
                        kinetic=0.0, C=C if dissipative else None)
        traj.append(rec)
    return traj
