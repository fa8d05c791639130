"""Shared machinery of the time-stepping solvers."""
import numpy as np
import scipy.sparse as sp

from ..errors import ConstraintViolation
from .config import StepRecord
from .newton import newton


def _rms(a):
    a = np.asarray(a)
    return float(np.sqrt(np.mean(a * a))) if a.size else 0.0


def _diag_selector(mask):
    return sp.diags(mask.astype(float))


class Stepper:
    """Dof classification, initial projection and per-step diagnostics.

    Dof classes over the unconstrained dofs:
      second-order  positive mass (x of matter nodes, ys when rho_tron > 0)
      first-order   massless but damped (ys when rho_tron = 0, dissipative)
      algebraic     everything else, including the electric potential
    """

    def __init__(self, problem, cfg, inertia=True):
        self.problem = problem
        self.cfg = cfg
        self.model = problem.model
        lay = self.model.layout
        self.layout = lay
        n = lay.ndof
        if inertia:
            self.M = self.model.mass_matrix()
        else:
            self.M = sp.csr_matrix((n, n))
        self.massive = self.M.diagonal() > 0
        damped = np.zeros(n, dtype=bool)
        p = self.model.params
        if cfg.dissipative and p.gamma0 > 0:
            damped[lay.e_slice] = True
        self.damped = damped
        free = ~problem.fixed
        self.second = free & self.massive
        self.first = free & ~self.massive & damped
        self.algebraic = free & ~self.second & ~self.first
        self.free = np.flatnonzero(free)
        self.y_dofs = np.arange(lay.y_slice.start, lay.y_slice.stop)
        # mechanical dofs of massless (free-space-only) nodes
        self.massless_x = np.flatnonzero(~self.massive & (lay.kind == "x"))
        self.zero = sp.csr_matrix((n, n))

    def damping(self, u):
        if self.damped.any():
            return self.model.damping_matrix(u)
        return self.zero

    def full(self, z, template, t):
        u = self.problem.apply(template, t)
        u[self.free] = z
        return u

    def project(self, u, t, mask=None):
        """Equilibrate the algebraic dofs at fixed remaining dofs."""
        mask = self.algebraic if mask is None else mask
        idx = np.flatnonzero(mask)
        u = self.problem.apply(u, t)
        if idx.size == 0:
            return u, 0, 0.0

        def fun(z, tangent):
            w = u.copy()
            w[idx] = z
            R, K = self.model.residual(w, t, tangent)
            return R[idx], (K[idx][:, idx] if tangent else None)

        z, it, rn = newton(fun, u[idx], self.cfg.newton_tol, self.cfg.max_iter,
                           scale=self.residual_scale())
        u[idx] = z
        return u, it, rn

    def residual_scale(self):
        return 1.0 + float(np.linalg.norm(self.model.load_vector(0.0)))

    # -- diagnostics --------------------------------------------------------
    def record(self, t, u, v, p, prev=None, iters=0, resnorm=0.0, kinetic=None, C=None):
        model = self.model
        if kinetic is None:
            kinetic = 0.5 * float(v @ (self.M @ v))
        potential = model.internal_energy(u)
        total = kinetic + potential
        p_elec = np.zeros(self.y_dofs.size)
        if np.abs(p_elec).max(initial=0.0) > self.cfg.constraint_tol:
            raise ConstraintViolation("electric momentum departed from zero")
        diag = {"kinetic": kinetic, "potential": potential, "total": total,
                "external_work": 0.0, "dissipated": 0.0,
                "lambda": 0.0, "lambda_free": 0.0, "p_elec": _rms(p_elec),
                "newton_iters": iters, "residual": resnorm}
        if prev is not None:
            du = u - prev.u
            dt = t - prev.t
            tm = 0.5 * (t + prev.t)
            um = 0.5 * (u + prev.u)
            f = model.load_vector(tm)
            work = -float(f @ du)
            fixed = self.problem.fixed
            if np.any(du[fixed] != 0):
                R, _ = model.residual(um, tm, tangent=False)
                react = self.M @ (v - prev.rates) / dt + R + (C @ du / dt if C is not None else 0)
                work += float(react[fixed] @ du[fixed])
            diss = float(du @ (C @ du)) / dt if C is not None else 0.0
            diag["external_work"] = prev.diagnostics["external_work"] + work
            diag["dissipated"] = prev.diagnostics["dissipated"] + diss
            diag["step_dissipation"] = diss
        else:
            diag["step_dissipation"] = 0.0
        if prev is not None:
            lam = du[self.y_dofs] / dt
            diag["lambda"] = _rms(lam)
            diag["lambda_free"] = _rms(du[self.massless_x] / dt)
        diag["fields"] = field_norms(self.layout, u)
        return StepRecord(t=float(t), u=u.copy(), rates=v.copy(), momenta=p.copy(),
                          diagnostics=diag)


def field_norms(layout, u):
    y, x, ys = layout.split(u)
    disp = x - layout.mesh.X
    return {"y": _rms(y), "displacement": _rms(disp),
            "ys_t": _rms(ys[:, 0]) if ys.size else 0.0,
            "ys_c": _rms(ys[:, 1]) if ys.size else 0.0}


def closure(traj):
    """Energy closure residual H - H0 - W_ext + D per step, relative to max |H|."""
    H = traj.series("total")
    W = traj.series("external_work")
    D = traj.series("dissipated")
    res = H - H[0] - W + D
    scale = max(np.abs(H).max(), np.abs(W).max(), np.abs(D).max(), 1e-300)
    return res, res / scale
