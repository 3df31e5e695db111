"""
Dense real linear algebra used by the detectors: thin Householder QR,
matrix-vector products and the regularized least-squares solve.
"""

from typing import Tuple

import numpy as np
from numpy.typing import NDArray

from src.errors import DimensionMismatch, RankDeficient, Singular

Matrix = NDArray[np.float64]
Vector = NDArray[np.float64]

RANK_TOLERANCE = 1e-12


def _as_matrix(a) -> Matrix:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {a.shape}")
    return a


def _as_vector(v) -> Vector:
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a 1-D vector, got shape {v.shape}")
    return v


def qr_thin(H) -> Tuple[Matrix, Matrix]:
    """
    Thin QR by Householder reflections, H = Q1 R with Q1 n×m and R m×m.

    R is returned with a nonnegative diagonal so the factorization is unique.
    Raises RankDeficient when a pivot column norm drops below
    RANK_TOLERANCE × the largest column norm of H.
    """
    H = _as_matrix(H)
    n, m = H.shape
    if n < m:
        raise DimensionMismatch(f"qr_thin needs n >= m, got {n}x{m}")

    R = H.copy()
    scale = float(np.max(np.linalg.norm(H, axis=0))) if m else 0.0
    threshold = RANK_TOLERANCE * scale
    reflectors = []

    for i in range(m):
        x = R[i:, i]
        normx = float(np.linalg.norm(x))
        if normx <= threshold or normx == 0.0:
            raise RankDeficient(f"column {i} norm {normx:.3e} below threshold {threshold:.3e}")
        s = 1.0 if x[0] >= 0 else -1.0
        v = x.copy()
        v[0] += s * normx
        v /= np.linalg.norm(v)
        reflectors.append(v)
        R[i:, i:] -= 2.0 * v[:, np.newaxis] * (v @ R[i:, i:])

    # Accumulate Q1 = H_0 H_1 ... H_{m-1} [I_m; 0] backwards
    Q = np.eye(n, m)
    for j in range(m - 1, -1, -1):
        v = reflectors[j]
        Q[j:, :] -= 2.0 * v[:, np.newaxis] * (v @ Q[j:, :])

    R = np.triu(R[:m, :])
    signs = np.where(np.diag(R) < 0, -1.0, 1.0)
    R *= signs[:, np.newaxis]
    Q *= signs[np.newaxis, :]
    return Q, R


def mat_vec(A, v) -> Vector:
    A = _as_matrix(A)
    v = _as_vector(v)
    if A.shape[1] != v.shape[0]:
        raise DimensionMismatch(f"matrix has {A.shape[1]} columns, vector has {v.shape[0]} entries")
    return A @ v


def back_substitute(R: Matrix, b: Vector) -> Vector:
    """Solve R u = b for upper-triangular R."""
    m = R.shape[0]
    u = np.zeros(m)
    for i in range(m - 1, -1, -1):
        u[i] = (b[i] - R[i, i + 1:] @ u[i + 1:]) / R[i, i]
    return u


def solve_regularized(H, y, sigma2: float) -> Vector:
    """
    argmin_u ||y - H u||^2 + sigma2 ||u||^2, i.e. (H^T H + sigma2 I)^{-1} H^T y.

    With sigma2 = 0 the plain least-squares solution is computed through qr_thin;
    a rank-deficient H raises Singular.
    """
    H = _as_matrix(H)
    y = _as_vector(y)
    if H.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"H has {H.shape[0]} rows, y has {y.shape[0]} entries")
    if sigma2 < 0:
        raise ValueError(f"sigma2 must be nonnegative, got {sigma2}")

    if sigma2 == 0.0:
        try:
            Q1, R = qr_thin(H)
        except RankDeficient as e:
            raise Singular(f"H^T H is numerically singular: {e}") from e
        return back_substitute(R, Q1.T @ y)

    m = H.shape[1]
    gram = H.T @ H + sigma2 * np.eye(m)
    return np.linalg.solve(gram, H.T @ y)
