"""Batched material-point response: energy density, generalized stress, tangent.

The local variables of a matter point are stacked into one 36-vector

    g = [E (3), F (9, row-major), ys (2x3), Fs (2x3x3)]

and those of a free-space point into the 12-vector [E, F].  The returned
generalized stress is du/dg and the tangent d2u/dg2, all with the same
leading batch shape as the inputs.
"""
import numpy as np

from ..errors import NonPositiveJacobian

N_MATTER = 36
N_FREE = 12
SL_E = slice(0, 3)
SL_F = slice(3, 12)
SL_Y = slice(12, 18)
SL_G = slice(18, 36)


def _kin(F):
    J = np.linalg.det(F)
    if np.any(~(J > 0)):
        bad = np.argwhere(~(J > 0))
        raise NonPositiveJacobian(f"det(F) <= 0 at batch index {tuple(bad[0])}",
                                  element=int(bad[0][0]) if bad.size else None)
    f = np.linalg.inv(F)
    return J, f


def _electric_part(E, F, J, f, pol, eps0, tangent):
    """e_m + c_m with pol the true polarization sum_s omega_s ys_s."""
    e = np.einsum("...a,...ai->...i", E, f)
    g_e = np.einsum("...li,...i->...l", f, e)  # f·e
    h = np.einsum("...li,...i->...l", f, pol)  # f·pol
    ee = np.einsum("...i,...i->...", e, e)
    pe = np.einsum("...i,...i->...", pol, e)
    fT = np.swapaxes(f, -1, -2)
    energy = -0.5 * eps0 * J * ee - J * pe
    dE = -eps0 * J[..., None] * g_e - J[..., None] * h
    Q = -0.5 * eps0 * ee[..., None, None] * fT + eps0 * np.einsum("...k,...l->...kl", e, g_e)
    R = -pe[..., None, None] * fT + np.einsum("...k,...l->...kl", e, h)
    dF = J[..., None, None] * (Q + R)
    dpol = -J[..., None] * e
    if not tangent:
        return energy, dE, dF, dpol, None
    B = np.einsum("...li,...ai->...la", f, f)
    Jd = J[..., None, None]
    HEE = -eps0 * Jd * B
    # d(P)/dE, index order [a, k, l]
    HEF = eps0 * (-np.einsum("...a,...lk->...akl", g_e, f)
                  + np.einsum("...ak,...l->...akl", f, g_e)
                  + np.einsum("...k,...la->...akl", e, B))
    HEF = HEF - np.einsum("...a,...lk->...akl", h, f) + np.einsum("...ak,...l->...akl", f, h)
    HEF = J[..., None, None, None] * HEF
    ein = np.einsum
    dQ = eps0 * (ein("...m,...n,...lk->...klmn", e, g_e, f)
                 + 0.5 * ee[..., None, None, None, None] * ein("...lm,...nk->...klmn", f, f)
                 - ein("...m,...nk,...l->...klmn", e, f, g_e)
                 - ein("...k,...lm,...n->...klmn", e, f, g_e)
                 - ein("...k,...m,...ln->...klmn", e, e, B))
    dR = (ein("...m,...n,...lk->...klmn", e, h, f)
          + pe[..., None, None, None, None] * ein("...lm,...nk->...klmn", f, f)
          - ein("...m,...nk,...l->...klmn", e, f, h)
          - ein("...k,...lm,...n->...klmn", e, f, h))
    HFF = J[..., None, None, None, None] * (ein("...nm,...kl->...klmn", f, Q + R) + dQ + dR)
    # second derivatives w.r.t. the true polarization
    HEp = -Jd * f  # [a, i]
    HFp = J[..., None, None, None] * (-ein("...i,...lk->...kli", e, f) + ein("...k,...li->...kli", e, f))
    return energy, dE, dF, dpol, (HEE, HEF, HFF, HEp, HFp)


def _neo_hookean(F, J, f, mu, lam, tangent):
    lnJ = np.log(J)
    fT = np.swapaxes(f, -1, -2)
    energy = 0.5 * mu * (np.einsum("...ij,...ij->...", F, F) - 3.0 - 2.0 * lnJ) + 0.5 * lam * lnJ ** 2
    P = mu * (F - fT) + lam * lnJ[..., None, None] * fT
    if not tangent:
        return energy, P, None
    I = np.eye(3)
    A = (mu * np.einsum("km,ln->klmn", I, I)
         + (mu - lam * lnJ)[..., None, None, None, None] * np.einsum("...lm,...nk->...klmn", f, f)
         + lam * np.einsum("...lk,...nm->...klmn", f, f))
    return energy, P, A


def matter_response(E, F, ys, Fs, p, tangent=True):
    """Energy density u = e_m + c_m + w_m at a batch of matter points."""
    E = np.asarray(E, dtype=float)
    F = np.asarray(F, dtype=float)
    ys = np.asarray(ys, dtype=float)
    Fs = np.asarray(Fs, dtype=float)
    batch = E.shape[:-1]
    J, f = _kin(F)
    omega = np.array(p.omega0)
    a = np.array(p.a)
    beta = np.array(p.beta)
    kappa = np.array(p.kappa)
    pol = np.einsum("s,...si->...i", omega, ys)
    eu, dE, dF, dpol, Hel = _electric_part(E, F, J, f, pol, p.eps0, tangent)
    nh, Pnh, Anh = _neo_hookean(F, J, f, p.mu, p.lam, tangent)
    Fy = np.einsum("...ij,...sj->...si", F, ys)
    energy = (eu + nh
              + 0.5 * np.einsum("s,...si,...si->...", a, ys, ys)
              + 0.5 * np.einsum("s,...si,...si->...", beta, Fy, Fy)
              + 0.5 * np.einsum("s,...sij,...sij->...", kappa, Fs, Fs))
    S = np.empty(batch + (N_MATTER,))
    S[..., SL_E] = dE
    S[..., SL_F] = (dF + Pnh + np.einsum("s,...sk,...sl->...kl", beta, Fy, ys)).reshape(batch + (9,))
    C = np.einsum("...ki,...kj->...ij", F, F)
    dy = (a[:, None] * ys + beta[:, None] * np.einsum("...ij,...sj->...si", C, ys)
          + omega[:, None] * dpol[..., None, :])
    S[..., SL_Y] = dy.reshape(batch + (6,))
    S[..., SL_G] = (kappa[:, None, None] * Fs).reshape(batch + (18,))
    if not tangent:
        return energy, S, None
    HEE, HEF, HFF, HEp, HFp = Hel
    I = np.eye(3)
    H = np.zeros(batch + (N_MATTER, N_MATTER))
    H[..., SL_E, SL_E] = HEE
    HEF = HEF.reshape(batch + (3, 9))
    H[..., SL_E, SL_F] = HEF
    H[..., SL_F, SL_E] = np.swapaxes(HEF, -1, -2)
    HFF = HFF + Anh + np.einsum("s,km,...sl,...sn->...klmn", beta, I, ys, ys)
    H[..., SL_F, SL_F] = HFF.reshape(batch + (9, 9))
    HEy = np.einsum("s,...ai->...asi", omega, HEp).reshape(batch + (3, 6))
    H[..., SL_E, SL_Y] = HEy
    H[..., SL_Y, SL_E] = np.swapaxes(HEy, -1, -2)
    HFy = (np.einsum("s,...kli->...klsi", omega, HFp)
           + np.einsum("s,...ki,...sl->...klsi", beta, F, ys)
           + np.einsum("s,...sk,li->...klsi", beta, Fy, I)).reshape(batch + (9, 6))
    H[..., SL_F, SL_Y] = HFy
    H[..., SL_Y, SL_F] = np.swapaxes(HFy, -1, -2)
    for s in range(2):
        blk = slice(12 + 3 * s, 15 + 3 * s)
        H[..., blk, blk] = a[s] * I + beta[s] * C
        gblk = slice(18 + 9 * s, 27 + 9 * s)
        H[..., gblk, gblk] = kappa[s] * np.eye(9)
    return energy, S, H


def free_response(E, F, p, tangent=True):
    """Energy density e_m + eta * NeoHookean at a batch of free-space points."""
    E = np.asarray(E, dtype=float)
    F = np.asarray(F, dtype=float)
    batch = E.shape[:-1]
    J, f = _kin(F)
    pol = np.zeros(batch + (3,))
    eu, dE, dF, _, Hel = _electric_part(E, F, J, f, pol, p.eps0, tangent)
    nh, Pnh, Anh = _neo_hookean(F, J, f, p.mu, p.lam, tangent)
    energy = eu + p.eta * nh
    S = np.empty(batch + (N_FREE,))
    S[..., SL_E] = dE
    S[..., SL_F] = (dF + p.eta * Pnh).reshape(batch + (9,))
    if not tangent:
        return energy, S, None
    HEE, HEF, HFF, _, _ = Hel
    H = np.zeros(batch + (N_FREE, N_FREE))
    H[..., SL_E, SL_E] = HEE
    HEF = HEF.reshape(batch + (3, 9))
    H[..., SL_E, SL_F] = HEF
    H[..., SL_F, SL_E] = np.swapaxes(HEF, -1, -2)
    H[..., SL_F, SL_F] = (HFF + p.eta * Anh).reshape(batch + (9, 9))
    return energy, S, H
