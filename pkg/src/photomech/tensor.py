"""Dense 3-space tensor algebra.

Vectors, second- and fourth-order tensors are plain numpy arrays of shape
``(3,)``, ``(3, 3)`` and ``(3, 3, 3, 3)``.  Fourth-order tensors follow the
derivative convention ``[dA/dB]_ijkl = dA_ij / dB_kl``.
"""
import numpy as np

from .errors import SingularMatrix

I3 = np.eye(3)
I3.setflags(write=False)

# relative singularity guard: |det A| < SINGULAR_RTOL * ||A||^3
SINGULAR_RTOL = 1e-12


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def vec3(x):
    x = _frozen(x)
    if x.shape != (3,) or not np.all(np.isfinite(x)):
        raise ValueError(f"expected 3 finite components, got {x!r}")
    return x


def mat3(x):
    x = _frozen(x)
    if x.shape != (3, 3) or not np.all(np.isfinite(x)):
        raise ValueError(f"expected finite 3x3 components, got shape {x.shape}")
    return x


def outer(a, b):
    """Dyadic product of two tensors of any order (a ⊗ b)."""
    return np.multiply.outer(a, b)


def ddot(A, B):
    """Double contraction ``A : B`` (Frobenius product for 3x3)."""
    return float(np.einsum("ij,ij", A, B))


def ddot42(T, B):
    """``[T : B]_ij = T_ijkl B_kl``."""
    return np.einsum("ijkl,kl->ij", T, B)


def boxtimes(A, B):
    """Non-standard dyadic product, ``[A ⊠ B]_ijkl = A_ik B_jl``.

    For any C, ``boxtimes(A, B) : C == A @ C @ B.T``.
    """
    return np.einsum("ik,jl->ijkl", A, B)


def boxdot(A, B):
    """Non-standard dyadic product, ``[A ⊡ B]_ijkl = A_il B_jk``."""
    return np.einsum("il,jk->ijkl", A, B)


def det(A):
    return float(np.linalg.det(A))


def _check_regular(A):
    d = det(A)
    scale = np.linalg.norm(A) ** 3
    if not np.isfinite(d) or abs(d) < SINGULAR_RTOL * scale or scale == 0.0:
        raise SingularMatrix(f"matrix is singular (det={d:.3e}, |A|^3={scale:.3e})")
    return d


def cof_raw(A):
    """Adjugate transpose (cofactor matrix) from signed minors.

    Computed without division so it stays defined for singular A.
    """
    A = np.asarray(A, dtype=float)
    C = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            rows = [r for r in range(3) if r != i]
            cols = [c for c in range(3) if c != j]
            minor = A[np.ix_(rows, cols)]
            C[i, j] = (-1) ** (i + j) * (minor[0, 0] * minor[1, 1] - minor[0, 1] * minor[1, 0])
    return C


def inv(A):
    """Inverse of a 3x3 tensor; raises SingularMatrix below the scale-aware threshold."""
    _check_regular(A)
    return np.linalg.inv(A)
