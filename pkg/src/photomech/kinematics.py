"""Deformation kinematics and push-forward maps.

Conventions: ``F = Grad y`` (F_ij = d y_i / d X_j), ``E = -Grad y_elec``
(a row vector, transformed by right multiplication), electronic material
gradients ``Fs[s]_ij = d ys_i / d X_j``.
"""
from dataclasses import dataclass

import numpy as np

from . import tensor
from .errors import NonPositiveJacobian


@dataclass(frozen=True)
class Kinematics:
    F: np.ndarray
    J: float
    K: np.ndarray  # cofactor, area map
    f: np.ndarray  # F^-1
    k: np.ndarray  # K^-1
    j: float  # 1/J


def build_kinematics(F):
    F = tensor.mat3(F)
    J = tensor.det(F)
    if not J > 0.0:
        raise NonPositiveJacobian(f"det(F) = {J:.6g} <= 0")
    f = tensor.inv(F)
    K = J * f.T
    k = F.T / J
    return Kinematics(F=F, J=J, K=tensor._frozen(K), f=tensor._frozen(f),
                      k=tensor._frozen(k), j=1.0 / J)


def dJ_dF(kin):
    return kin.K.copy()


def df_dF(kin):
    return -tensor.boxtimes(kin.f, kin.f.T)


def dK_dF(kin):
    return tensor.outer(kin.f.T, kin.K) - tensor.boxdot(kin.K, kin.f)


def push_forward_electric(E, kin):
    """True electric field e = E·f."""
    return np.asarray(E) @ kin.f


def pull_back_electric(e, kin):
    return np.asarray(e) @ kin.F


def push_forward_electronic(Fs, kin):
    """Spatial electronic gradients fs = Fs·f, species-wise."""
    return tuple(np.asarray(G) @ kin.f for G in Fs)


def pull_back_electronic(fs, kin):
    return tuple(np.asarray(g) @ kin.F for g in fs)


def gradient_from_nodal(values, dN):
    """Material gradient of a nodally interpolated field.

    values: (n_nodes,) for scalars or (n_nodes, m) for vector fields.
    dN: (n_nodes, 3) shape-function gradients at the evaluation point.
    Returns (3,) for scalars, (m, 3) for vector fields.
    """
    values = np.asarray(values, dtype=float)
    dN = np.asarray(dN, dtype=float)
    if values.shape[0] != dN.shape[0]:
        raise ValueError(f"{values.shape[0]} nodal values for {dN.shape[0]} shape functions")
    if values.ndim == 1:
        return values @ dN
    return values.T @ dN
