"""State functions derived from the energy densities.

Every flux, stress, source and momentum here is the analytic derivative of
one of the densities in :mod:`photomech.energy`.  ``fd_gradient`` is the
generic central-difference verifier used by the test-suite and ``verify``.
"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kinematics
from .energy import LoadData

# Names of deliberately broken code paths, switched on only by the
# verification mutation canary (see photomech.verification.inject_fault).
_FAULTS = set()


@dataclass(frozen=True)
class ElectricState:
    D_eps: np.ndarray
    P: np.ndarray
    D: np.ndarray
    d_eps: np.ndarray
    p: np.ndarray
    d: np.ndarray


@dataclass(frozen=True)
class ElectronicState:
    P: np.ndarray  # (2, 3, 3) nominal electronic stress
    s: np.ndarray  # (2, 3, 3) true electronic stress
    src_energetic: np.ndarray  # (2, 3)
    src_dissipative: np.ndarray
    src: np.ndarray
    b_interior: np.ndarray
    b_exterior: np.ndarray
    b: np.ndarray
    momentum: np.ndarray


@dataclass(frozen=True)
class StressState:
    P_elec: np.ndarray
    P_tron: np.ndarray
    P_mech: np.ndarray
    P: np.ndarray
    s_elec: np.ndarray
    s_tron: np.ndarray
    s_mech: np.ndarray
    s: np.ndarray
    momentum: Optional[np.ndarray] = None


def true_polarization(ys, p):
    return p.omega @ np.asarray(ys, dtype=float)


def electric_flux(ys, E, kin, p):
    e = kinematics.push_forward_electric(E, kin)
    pol = true_polarization(ys, p)
    D_eps = p.eps0 * e @ kin.K
    P = pol @ kin.K
    D = D_eps + P
    return ElectricState(D_eps=D_eps, P=P, D=D, d_eps=p.eps0 * e, p=pol, d=D @ kin.k)


def electronic_stress_and_sources(ys, Fs, vs, E, kin, p, loads=None):
    ys = np.asarray(ys, dtype=float)
    Fs = np.asarray(Fs, dtype=float)
    vs = np.asarray(vs, dtype=float)
    kappa = np.array(p.kappa)[:, None, None]
    P = kappa * Fs
    C = kin.F.T @ kin.F
    src_e = np.array(p.a)[:, None] * ys + np.array(p.beta)[:, None] * (ys @ C.T)
    src_d = kin.J * p.gamma0 * vs
    e = kinematics.push_forward_electric(E, kin)
    b_int = kin.J * p.omega[:, None] * e[None, :]
    b_ext = np.zeros((2, 3)) if loads is None else np.asarray(loads.b_tron, dtype=float)
    return ElectronicState(
        P=P, s=P @ kin.k, src_energetic=src_e, src_dissipative=src_d, src=src_e + src_d,
        b_interior=b_int, b_exterior=b_ext, b=b_int + b_ext, momentum=p.rho_tron * vs,
    )


def mechanical_piola(ys, kin, p):
    """dw/dF for the local stored energy (Neo-Hookean plus electronic coupling)."""
    ys = np.asarray(ys, dtype=float)
    fT = kin.f.T
    P = p.mu * (kin.F - fT) + p.lam * np.log(kin.J) * fT
    Fy = ys @ kin.F.T
    return P + np.einsum("s,si,sj->ij", np.array(p.beta), Fy, ys)


def total_stress(ys, Fs, E, kin, p, v=None):
    """Piola and Cauchy stresses in energy-momentum format."""
    e = kinematics.push_forward_electric(E, kin)
    pol = true_polarization(ys, p)
    i = np.eye(3)
    e_s = -0.5 * p.eps0 * float(e @ e)
    c_s = -float(pol @ e)
    s_elec = e_s * i + np.outer(e, p.eps0 * e)
    sign = -1.0 if "ptron-sign" in _FAULTS else 1.0
    s_tron = c_s * i + sign * np.outer(e, pol)
    P_elec = s_elec @ kin.K
    P_tron = s_tron @ kin.K
    P_mech = mechanical_piola(ys, kin, p)
    P = P_elec + P_tron + P_mech
    mom = None if v is None else p.rho_mech * np.asarray(v, dtype=float)
    return StressState(P_elec=P_elec, P_tron=P_tron, P_mech=P_mech, P=P,
                       s_elec=s_elec, s_tron=s_tron, s_mech=P_mech @ kin.k, s=P @ kin.k,
                       momentum=mom)


def de_m_dF(E, kin, p):
    """dE_m/dF by the chain rule through df/dF and dK/dF (no closed form)."""
    E = np.asarray(E, dtype=float)
    df = kinematics.df_dF(kin)
    dK = kinematics.dK_dF(kin)
    KE = kin.K @ E
    Ef = E @ kin.f
    return -0.5 * p.eps0 * (np.einsum("a,aikl,i->kl", E, df, KE)
                            + np.einsum("i,ibkl,b->kl", Ef, dK, E))


def dc_m_dF(ys, E, kin, p):
    pol = true_polarization(ys, p)
    return -np.einsum("i,ibkl,b->kl", pol, kinematics.dK_dF(kin), np.asarray(E, dtype=float))


def momenta(vs, v, p):
    return p.rho_tron * np.asarray(vs, dtype=float), p.rho_mech * np.asarray(v, dtype=float)


def dual_kinetic(ps, pm, p):
    """Legendre dual of the kinetic densities; massless electronic modes contribute nothing."""
    ps = np.asarray(ps, dtype=float)
    pm = np.asarray(pm, dtype=float)
    t = 0.5 * float(pm @ pm) / p.rho_mech
    if p.rho_tron > 0:
        t += 0.5 * float(np.sum(ps * ps)) / p.rho_tron
    return t


def fd_gradient(fun, x, h=1e-6):
    """Central-difference gradient of a scalar (or array) valued function.

    The result has shape ``np.shape(fun(x)) + np.shape(x)``.
    """
    x = np.array(x, dtype=float)
    f0 = np.asarray(fun(x), dtype=float)
    out = np.empty(f0.shape + x.shape)
    flat = x.reshape(-1)
    for n in range(flat.size):
        xp = flat.copy()
        xm = flat.copy()
        xp[n] += h
        xm[n] -= h
        d = (np.asarray(fun(xp.reshape(x.shape))) - np.asarray(fun(xm.reshape(x.shape)))) / (2 * h)
        out[(...,) + np.unravel_index(n, x.shape)] = d
    return out


@dataclass
class ManufacturedFields:
    """Smooth spatial fields for the Lorentz-force identity check.

    potential: x -> scalar electric potential.  field: optional analytic
    true electric field (-grad potential); central differences otherwise.
    electronic: x -> (2, 3) order parameters.  s_mech: x -> (3, 3).
    """

    potential: Callable
    electronic: Callable
    s_mech: Optional[Callable] = None
    field: Optional[Callable] = None


def lorentz_identity_residual(fields, x, p, h=1e-5):
    """|div s - [div(c_s i + s_mech) + grad(e)·p + q_s e]| at spatial point x.

    The free charge q_s is taken as div d, i.e. Gauss's law holds by
    construction.  All divergences are central differences with step h.
    """
    x = np.asarray(x, dtype=float)
    s_mech = fields.s_mech or (lambda z: np.zeros((3, 3)))

    def efield(z):
        if fields.field is not None:
            return np.asarray(fields.field(z), dtype=float)
        return -fd_gradient(fields.potential, z, h)

    def pol(z):
        return true_polarization(fields.electronic(z), p)

    def cauchy(z):
        e = efield(z)
        pz = pol(z)
        d = p.eps0 * e + pz
        e_s = -0.5 * p.eps0 * e @ e
        c_s = -pz @ e
        return (e_s + c_s) * np.eye(3) + np.outer(e, d) + s_mech(z)

    def reduced(z):
        return -(pol(z) @ efield(z)) * np.eye(3) + s_mech(z)

    def div(tfun):
        g = fd_gradient(tfun, x, h)  # (..., 3)
        return np.trace(g, axis1=-2, axis2=-1) if g.ndim == 2 else np.einsum("ijj->i", g)

    q_s = div(lambda z: p.eps0 * efield(z) + pol(z))
    grad_e = fd_gradient(efield, x, h)
    rhs = div(reduced) + grad_e @ pol(x) + q_s * efield(x)
    return float(np.linalg.norm(div(cauchy) - rhs))


__all__ = [
    "ElectricState", "ElectronicState", "StressState", "LoadData", "ManufacturedFields",
    "electric_flux", "electronic_stress_and_sources", "total_stress", "mechanical_piola",
    "de_m_dF", "dc_m_dF", "momenta", "dual_kinetic", "fd_gradient", "lorentz_identity_residual",
]
