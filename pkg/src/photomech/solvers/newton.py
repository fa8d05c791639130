"""Newton-Raphson with residual-norm backtracking."""
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import NonConvergence, NonPositiveJacobian, SingularMatrix

MAX_HALVINGS = 8


def _norm(fun, z):
    try:
        r, _ = fun(z, False)
    except NonPositiveJacobian:
        return np.inf, None
    return float(np.linalg.norm(r)), r


def linear_solve(A, b):
    if A.shape[0] == 0:
        return np.zeros(0)
    A = sp.csc_matrix(A)
    try:
        x = spla.splu(A).solve(b)
    except RuntimeError as exc:
        raise SingularMatrix(str(exc)) from None
    if not np.all(np.isfinite(x)):
        raise SingularMatrix("non-finite solution of the Newton system")
    return x


def newton(fun, z0, tol=1e-10, max_iter=25, scale=1.0):
    """Solve fun(z)[0] = 0.

    fun(z, tangent) returns (residual, jacobian or None).  Each step is
    halved (at most eight times) while the residual norm grows.  The
    iteration stops once the residual norm is below tol * scale.
    Returns (z, iterations, residual_norm).
    """
    z = np.array(z0, dtype=float)
    r, _ = fun(z, False)
    rn = float(np.linalg.norm(r))
    it = 0
    tol = tol * max(scale, 1.0)
    while rn >= tol:
        if it >= max_iter:
            raise NonConvergence(f"Newton did not converge in {it} iterations "
                                 f"(residual {rn:.3e})", iterations=it, residual=rn)
        _, J = fun(z, True)
        dz = linear_solve(J, -r)
        alpha = 1.0
        best = (np.inf, None, None)
        for _ in range(MAX_HALVINGS + 1):
            tn, tr = _norm(fun, z + alpha * dz)
            if tn < best[0]:
                best = (tn, alpha, tr)
            if tn <= rn:
                break
            alpha *= 0.5
        if best[1] is None:
            raise NonPositiveJacobian("line search left the admissible set")
        rn, alpha, r = best
        z = z + alpha * dz
        it += 1
    return z, it, rn
