"""Self-verification suite behind ``photomech verify``.

Every check draws its random states from a single seeded generator so the
report is reproducible.  ``inject_fault`` flips a sign inside the closed
form electronic Maxwell stress to prove the equivalence check can fail.
"""
import contextlib
import json
import time

import numpy as np

from . import constitutive, energy, kinematics
from .constitutive import fd_gradient
from .energy import LoadData, MaterialParams
from .femcore import Loads, Model, box_mesh
from .solvers import (Problem, SolverConfig, solve_dynamic_hamiltonian, solve_dynamic_lagrangian,
                      solve_quasistatic)

FAULTS = ("ptron-sign",)


@contextlib.contextmanager
def inject_fault(name):
    if name not in FAULTS:
        raise ValueError(f"unknown fault {name!r}")
    constitutive._FAULTS.add(name)
    try:
        yield
    finally:
        constitutive._FAULTS.discard(name)


# -- random samples -------------------------------------------------------------
def random_F(rng, det_range=(0.5, 2.0), spread=0.3):
    while True:
        F = np.eye(3) + spread * rng.standard_normal((3, 3))
        if det_range[0] <= np.linalg.det(F) <= det_range[1]:
            return F


def random_params(rng, **overrides):
    kw = dict(eps0=rng.uniform(0.5, 2.0), omega0=rng.uniform(0.2, 1.5, 2),
              gamma0=rng.uniform(0.1, 1.0), rho_tron=rng.uniform(0.5, 2.0),
              rho_mech=rng.uniform(0.5, 2.0), mu=rng.uniform(0.5, 2.0), lam=rng.uniform(0.5, 2.0),
              a=rng.uniform(0.5, 2.0, 2), beta=rng.uniform(0.0, 1.0, 2),
              kappa=rng.uniform(0.1, 1.0, 2), eta=1e-2)
    kw.update(overrides)
    return MaterialParams(**kw)


def random_state(rng):
    return dict(F=random_F(rng), E=rng.standard_normal(3), ys=rng.standard_normal((2, 3)),
                Fs=rng.standard_normal((2, 3, 3)), vs=rng.standard_normal((2, 3)),
                v=rng.standard_normal(3))


def _rel(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300))


# -- checks ----------------------------------------------------------------------
def check_kinematics(rng, n):
    err = 0.0
    for _ in range(n):
        F = random_F(rng)
        kin = kinematics.build_kinematics(F)
        fd = lambda fun: fd_gradient(lambda G: fun(kinematics.build_kinematics(G)), F)
        err = max(err, _rel(kinematics.dJ_dF(kin), fd(lambda k: k.J)),
                  _rel(kinematics.df_dF(kin), fd(lambda k: k.f)),
                  _rel(kinematics.dK_dF(kin), fd(lambda k: k.K)))
    return err


def check_constitutive_gradients(rng, n):
    err = 0.0
    for _ in range(n):
        p = random_params(rng)
        s = random_state(rng)
        F, E, ys, Fs, vs, v = s["F"], s["E"], s["ys"], s["Fs"], s["vs"], s["v"]
        kin = kinematics.build_kinematics(F)
        K = lambda G: kinematics.build_kinematics(G)
        el = constitutive.electric_flux(ys, E, kin, p)
        tr = constitutive.electronic_stress_and_sources(ys, Fs, vs, E, kin, p)
        st = constitutive.total_stress(ys, Fs, E, kin, p, v)
        ps, pm = constitutive.momenta(vs, v, p)
        pairs = [
            (el.D_eps, -fd_gradient(lambda x: energy.e_m(x, kin, p), E)),
            (el.P, -fd_gradient(lambda x: energy.c_m(ys, x, kin, p), E)),
            (tr.P, fd_gradient(lambda x: energy.w_gradient(x, p), Fs)),
            (tr.src_energetic, fd_gradient(lambda x: energy.w_local(x, kin, p), ys)),
            (tr.b_interior, -fd_gradient(lambda x: energy.c_m(x, E, kin, p), ys)),
            (tr.src_dissipative, fd_gradient(lambda x: energy.dissipation_potential(x, kin, p), vs)),
            (st.P_elec, fd_gradient(lambda G: energy.e_m(E, K(G), p), F)),
            (st.P_tron, fd_gradient(lambda G: energy.c_m(ys, E, K(G), p), F)),
            (st.P_mech, fd_gradient(lambda G: energy.w_local(ys, K(G), p), F)),
            (ps, fd_gradient(lambda x: energy.kinetic_densities(x, v, p)[0], vs)),
            (pm, fd_gradient(lambda x: energy.kinetic_densities(vs, x, p)[1], v)),
        ]
        err = max([err] + [_rel(a, b) for a, b in pairs])
    return err


def check_energy_momentum(rng, n):
    err = 0.0
    for _ in range(n):
        p = random_params(rng)
        s = random_state(rng)
        kin = kinematics.build_kinematics(s["F"])
        st = constitutive.total_stress(s["ys"], s["Fs"], s["E"], kin, p)
        err = max(err, _rel(st.P_elec, constitutive.de_m_dF(s["E"], kin, p)),
                  _rel(st.P_tron, constitutive.dc_m_dF(s["ys"], s["E"], kin, p)))
    return err


def check_piola(rng, n):
    err = 0.0
    for _ in range(n):
        p = random_params(rng)
        s = random_state(rng)
        kin = kinematics.build_kinematics(s["F"])
        el = constitutive.electric_flux(s["ys"], s["E"], kin, p)
        tr = constitutive.electronic_stress_and_sources(s["ys"], s["Fs"], s["vs"], s["E"], kin, p)
        st = constitutive.total_stress(s["ys"], s["Fs"], s["E"], kin, p)
        e = kinematics.push_forward_electric(s["E"], kin)
        pol = constitutive.true_polarization(s["ys"], p)
        e_s = -0.5 * p.eps0 * e @ e
        c_s = -pol @ e
        err = max(err, _rel(el.d_eps + el.p, el.D @ kin.k), _rel(el.d, el.D @ kin.k),
                  _rel(tr.s, tr.P @ kin.k), _rel(st.s, st.P @ kin.k),
                  _rel(e_s, kin.j * energy.e_m(s["E"], kin, p)),
                  _rel(c_s, kin.j * energy.c_m(s["ys"], s["E"], kin, p)),
                  _rel(st.s_elec, st.P_elec @ kin.k), _rel(st.s_tron, st.P_tron @ kin.k))
    return err


def check_legendre(rng, n, grid=21):
    err = 0.0
    for _ in range(n):
        p = random_params(rng)
        vs, v = rng.standard_normal((2, 3)), rng.standard_normal(3)
        ps, pm = constitutive.momenta(vs, v, p)
        k = sum(energy.kinetic_densities(vs, v, p))
        t = constitutive.dual_kinetic(ps, pm, p)
        err = max(err, abs(t + k - (np.sum(ps * vs) + pm @ v)) / max(abs(t + k), 1e-300))
        # supremum of p·v - k(v) along random lines through the maximiser
        for _ in range(3):
            dvs, dv = rng.standard_normal((2, 3)), rng.standard_normal(3)
            ss = np.linspace(-1.0, 1.0, grid)
            vals = [np.sum(ps * (vs + a * dvs)) + pm @ (v + a * dv)
                    - sum(energy.kinetic_densities(vs + a * dvs, v + a * dv, p)) for a in ss]
            if int(np.argmax(vals)) != grid // 2:
                err = max(err, 1.0)
    return err


def manufactured_fields(rng):
    c = rng.uniform(0.2, 0.8, 6)
    return constitutive.ManufacturedFields(
        potential=lambda z: c[0] * np.sin(z[0]) * np.cos(c[1] * z[1]) + c[2] * z[2] ** 2,
        electronic=lambda z: np.array([[np.sin(c[3] * z[1]), z[0] * z[2], np.cos(z[0])],
                                       [z[1] ** 2, c[4] * np.exp(0.3 * z[2]), np.sin(z[0] + z[1])]]),
        s_mech=lambda z: c[5] * np.array([[z[0] ** 2, z[1], 0.0], [z[1], np.sin(z[2]), z[0]],
                                          [0.0, z[0], z[1] * z[2]]]),
    )


def check_lorentz(rng, n):
    err = 0.0
    for _ in range(n):
        p = random_params(rng)
        x = rng.uniform(-1, 1, 3)
        err = max(err, constitutive.lorentz_identity_residual(manufactured_fields(rng), x, p, h=1e-5))
    return err


def dirichlet_mesh():
    return box_mesh(1.0, 2, shell=0.5, shell_cells=1)


def random_model(rng, mesh=None):
    mesh = dirichlet_mesh() if mesh is None else mesh
    p = random_params(rng, eta=0.05)
    bulk = LoadData(q_f=rng.standard_normal(), b_tron=rng.standard_normal((2, 3)),
                    b_mech=rng.standard_normal(3))
    surf = {"zmax": LoadData(q_hat=rng.standard_normal(), t_tron=rng.standard_normal((2, 3)),
                             t_mech=rng.standard_normal(3))}
    return Model(mesh, p, Loads(bulk=bulk, surface=surf))


def random_admissible(rng, model, scale=0.05):
    return model.layout.reference() + scale * rng.standard_normal(model.layout.ndof)


def check_discrete_dirichlet(rng, n):
    err = 0.0
    for _ in range(n):
        model = random_model(rng)
        u = random_admissible(rng, model)
        R, _ = model.residual(u, 0.0, tangent=False)
        err = max(err, _rel(R, fd_gradient(lambda w: model.potential_energy(w, 0.0), u)))
        u_prev = random_admissible(rng, model)
        dt = 0.1
        C = model.damping_matrix(u_prev)
        Ri, _ = model.incremental_residual(u, u_prev, dt, 0.0, tangent=False, damping=C)
        fd = fd_gradient(lambda w: model.incremental_functional(w, u_prev, dt, 0.0, damping=C), u)
        err = max(err, _rel(Ri, fd))
    return err


def check_tangent(rng, n):
    err = 0.0
    for _ in range(n):
        model = random_model(rng)
        u = random_admissible(rng, model)
        R, K = model.residual(u)
        asym = abs(K - K.T).max() / abs(K).max()
        d = rng.standard_normal(u.size)
        h = 1e-6
        fd = (model.residual(u + h * d, tangent=False)[0]
              - model.residual(u - h * d, tangent=False)[0]) / (2 * h)
        err = max(err, asym, _rel(K @ d, fd))
    return err


def patch_problem(q_hat=0.0, field=(0.0, 0.0, 0.0), cells=2, shell=0.5, params=None):
    """Matter cube with free space above and below (z only), deformation frozen.

    A sheet charge q_hat on the upper face and/or a uniform applied field
    through potential values on the outer shell faces give one-dimensional
    solutions that trilinear elements reproduce exactly.
    """
    mesh = box_mesh(1.0, cells, shell=(0.0, 0.0, shell), shell_cells=1)
    p = params or MaterialParams(eps0=1.0, omega0=(0.8, 0.4), a=(1.0, 2.0))
    loads = Loads(surface={"zmax": LoadData(q_hat=q_hat)})
    model = Model(mesh, p, loads)
    lay = model.layout
    pr = Problem(model)
    outer = np.asarray(mesh.outer_nodes)
    pr.fix(lay.y_dofs(outer), -(mesh.X[outer] @ np.asarray(field, float)))
    pr.freeze_mechanics()
    return pr


def check_patch(rng, n):
    err = 0.0
    cfg = SolverConfig(dt=1.0, t_end=0.0)
    for _ in range(n):
        q = rng.uniform(0.5, 2.0)
        E = (0.0, 0.0, rng.uniform(-1, 1))
        pr = patch_problem(q_hat=q, field=E)
        u = solve_quasistatic(pr, cfg)[0].u
        jumps = pr.model.interface_jumps(u)
        err = max([err] + [abs(j["residual_D"]) for j in jumps])
    return err


def oscillator_problem(rho=2.0, gamma=0.0, field=(0.3, 0.0, 0.0), params=None):
    """Single matter element, deformation frozen, static uniform electric field."""
    mesh = box_mesh(1.0, 1)
    p = params or MaterialParams(rho_tron=rho, gamma0=gamma, a=(1.0, 3.0), beta=(0.5, 0.0),
                                 omega0=(1.0, 0.5))
    model = Model(mesh, p)
    pr = Problem(model)
    pr.freeze_mechanics()
    pr.fix(np.arange(mesh.n_nodes), -(mesh.X @ np.asarray(field, float)))
    pr.u0 = pr.apply(model.layout.reference(), 0.0)
    return pr


def check_cross_formulation(rng, n_steps):
    err = 0.0
    for dissipative in (False, True):
        pr = oscillator_problem(rho=rng.uniform(1, 3), gamma=rng.uniform(0.1, 0.5))
        cfg = SolverConfig(dt=0.05, t_end=0.05 * n_steps, dissipative=dissipative)
        a = solve_dynamic_lagrangian(pr, cfg).states
        b = solve_dynamic_hamiltonian(pr, cfg).states
        err = max(err, float(np.abs(a - b).max()))
    return err


def check_fixed_point(rng):
    """A quasi-static equilibrium stays put under both dynamic solvers."""
    pr = oscillator_problem(rho=1.5)
    eq = solve_quasistatic(pr, SolverConfig(dt=1.0, t_end=0.0))[0].u
    pr.u0 = eq
    cfg = SolverConfig(dt=0.1, t_end=1.0)
    err = 0.0
    for solver in (solve_dynamic_lagrangian, solve_dynamic_hamiltonian):
        err = max(err, float(np.abs(solver(pr, cfg).states - eq).max()))
    return err


LEVELS = {"fast": dict(samples=20, fd_states=1, steps=100),
          "full": dict(samples=100, fd_states=3, steps=100)}


def run_checks(level="fast", seed=0):
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}")
    cfg = LEVELS[level]
    rng = np.random.default_rng(seed)
    n = cfg["samples"]
    plan = [
        ("kinematic-derivatives", lambda: check_kinematics(rng, n), 1e-6),
        ("constitutive-gradients", lambda: check_constitutive_gradients(rng, n), 1e-6),
        ("energy-momentum", lambda: check_energy_momentum(rng, n), 1e-12),
        ("piola-transforms", lambda: check_piola(rng, n), 1e-12),
        ("legendre-duality", lambda: check_legendre(rng, n), 1e-12),
        ("lorentz-identity", lambda: check_lorentz(rng, max(2, n // 10)), 1e-5),
        ("discrete-dirichlet", lambda: check_discrete_dirichlet(rng, cfg["fd_states"]), 1e-5),
        ("consistent-tangent", lambda: check_tangent(rng, cfg["fd_states"]), 1e-4),
        ("interface-patch", lambda: check_patch(rng, 2), 1e-10),
        ("cross-formulation", lambda: check_cross_formulation(rng, cfg["steps"]), 1e-6),
        ("dirichlet-fixed-point", lambda: check_fixed_point(rng), 1e-10),
    ]
    results = []
    for name, fun, tol in plan:
        try:
            value = fun()
            passed = bool(np.isfinite(value) and value < tol)
            results.append({"name": name, "passed": passed, "error": float(value), "tol": tol})
        except Exception as exc:  # reported as a failed check
            results.append({"name": name, "passed": False, "error": None, "tol": tol,
                            "exception": f"{type(exc).__name__}: {exc}"})
    return {"level": level, "seed": seed, "checks": results,
            "passed": all(r["passed"] for r in results)}


def verify(level="fast", seed=0, fault=None, stream=None):
    """Run the suite, print one line per check and a JSON summary; return the report."""
    import sys

    out = stream or sys.stdout
    ctx = inject_fault(fault) if fault else contextlib.nullcontext()
    t0 = time.perf_counter()
    with ctx:
        report = run_checks(level, seed)
    wall = time.perf_counter() - t0
    for r in report["checks"]:
        status = "PASS" if r["passed"] else "FAIL"
        val = "n/a" if r["error"] is None else f"{r['error']:.3e}"
        print(f"{status} {r['name']:24s} error={val} tol={r['tol']:.0e}", file=out)
    print(f"# wall time {wall:.2f} s", file=out)
    print(json.dumps(report, sort_keys=True), file=out)
    return report
