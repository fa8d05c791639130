"""Energy, kinetic and dissipation densities per unit reference volume.

Electronic quantities come in (trans, cis) pairs stacked along the first
axis: order parameters ``ys`` have shape (2, 3), their material gradients
``Fs`` shape (2, 3, 3).  Per-species parameters are length-2 tuples.

The stored mechanical energy is split into a local part (order parameters
and deformation) and a gradient part:

    w_loc  = mu/2 (F:F - 3 - 2 ln J) + lam/2 ln^2 J
             + sum_s [ a_s/2 |ys_s|^2 + beta_s/2 |F ys_s|^2 ]
    w_grad = sum_s kappa_s/2 Fs_s : Fs_s
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import NonPositiveJacobian

SPECIES = ("trans", "cis")


def _pair(v):
    v = tuple(float(x) for x in np.broadcast_to(np.asarray(v, dtype=float), (2,)))
    return v


@dataclass(frozen=True)
class MaterialParams:
    eps0: float = 1.0
    omega0: tuple = (1.0, 1.0)
    gamma0: float = 0.0
    rho_tron: float = 0.0  # electronic inertia density
    rho_mech: float = 1.0
    mu: float = 1.0
    lam: float = 1.0
    a: tuple = (1.0, 1.0)
    beta: tuple = (0.0, 0.0)
    kappa: tuple = (0.0, 0.0)
    eta: float = 1e-6  # fictitious free-space stiffness factor

    def __post_init__(self):
        for name in ("omega0", "a", "beta", "kappa"):
            object.__setattr__(self, name, _pair(getattr(self, name)))
        checks = [
            ("eps0", self.eps0 > 0),
            ("gamma0", self.gamma0 >= 0),
            ("rho_tron", self.rho_tron >= 0),
            ("rho_mech", self.rho_mech > 0),
            ("mu", self.mu >= 0),
            ("lam", self.lam >= 0),
            ("a", min(self.a) >= 0),
            ("kappa", min(self.kappa) >= 0),
            ("eta", 0 <= self.eta < 1),
        ]
        for name, ok in checks:
            if not ok:
                raise ValueError(f"invalid material parameter {name}={getattr(self, name)!r}")

    @property
    def omega(self):
        return np.array(self.omega0)


@dataclass(frozen=True)
class LoadData:
    """Prescribed external data at one material point or boundary point."""

    q_f: float = 0.0
    q_hat: float = 0.0
    b_tron: np.ndarray = field(default_factory=lambda: np.zeros((2, 3)))
    t_tron: np.ndarray = field(default_factory=lambda: np.zeros((2, 3)))
    b_mech: np.ndarray = field(default_factory=lambda: np.zeros(3))
    t_mech: np.ndarray = field(default_factory=lambda: np.zeros(3))


def _require_positive(kin):
    if not kin.J > 0:
        raise NonPositiveJacobian(f"J = {kin.J:.6g} <= 0")


def e_m(E, kin, p):
    """Electric stored energy, -1/2 eps0 E·f·K·E (never positive)."""
    E = np.asarray(E, dtype=float)
    return -0.5 * p.eps0 * float(E @ kin.f @ kin.K @ E)


def c_m(ys, E, kin, p):
    """Electronic stored energy, -sum_s omega0_s ys_s·K·E."""
    ys = np.asarray(ys, dtype=float)
    KE = kin.K @ np.asarray(E, dtype=float)
    return -float(np.sum(p.omega * (ys @ KE)))


def neo_hookean(kin, mu, lam):
    lnJ = np.log(kin.J)
    return 0.5 * mu * (np.sum(kin.F * kin.F) - 3.0 - 2.0 * lnJ) + 0.5 * lam * lnJ ** 2


def w_local(ys, kin, p):
    _require_positive(kin)
    ys = np.asarray(ys, dtype=float)
    Fy = ys @ kin.F.T  # rows are F·ys_s
    electronic = 0.5 * np.array(p.a) * np.sum(ys * ys, axis=1) \
        + 0.5 * np.array(p.beta) * np.sum(Fy * Fy, axis=1)
    return float(neo_hookean(kin, p.mu, p.lam) + electronic.sum())


def w_gradient(Fs, p):
    Fs = np.asarray(Fs, dtype=float)
    return float(0.5 * np.sum(np.array(p.kappa) * np.sum(Fs * Fs, axis=(1, 2))))


def w_m(ys, Fs, kin, p):
    return w_local(ys, kin, p) + w_gradient(Fs, p)


def external_potentials(y, ys, x, loads):
    """Bulk and boundary external potential densities (v_m, v_hat_m).

    Linear in the fields: q y - b_tron·ys - b_mech·x, likewise with the
    surface data for the boundary density.
    """
    ys = np.asarray(ys, dtype=float)
    x = np.asarray(x, dtype=float)
    v = loads.q_f * y - np.sum(loads.b_tron * ys) - float(loads.b_mech @ x)
    v_hat = loads.q_hat * y - np.sum(loads.t_tron * ys) - float(loads.t_mech @ x)
    return float(v), float(v_hat)


def kinetic_densities(vs, v, p):
    vs = np.asarray(vs, dtype=float)
    v = np.asarray(v, dtype=float)
    return 0.5 * p.rho_tron * float(np.sum(vs * vs)), 0.5 * p.rho_mech * float(v @ v)


def dissipation_potential(vs, kin, p):
    _require_positive(kin)
    vs = np.asarray(vs, dtype=float)
    return 0.5 * kin.J * p.gamma0 * float(np.sum(vs * vs))


def free_space_energy(E, kin, p):
    """e_m plus a weak Neo-Hookean term that regularises the free-space deformation."""
    _require_positive(kin)
    return e_m(E, kin, p) + p.eta * neo_hookean(kin, p.mu, p.lam)
