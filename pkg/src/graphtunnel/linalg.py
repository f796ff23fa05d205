"""Dense symmetric eigensolver, pivoted linear solve and subspace geometry.

Everything here is binary64 and deterministic; no LAPACK eigen/solve calls
are used, so these routines can serve as an oracle that is independent of
the path-sum machinery (and can themselves be checked against LAPACK).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotSymmetric, RankDeficientBasis, Singular

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100
SYMMETRY_TOL = 1e-12
PIVOT_TOL = 1e-14


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual: float
    sweeps: int

    def __iter__(self):
        # allows ``w, v = sym_eigen(a)``
        return iter((self.eigenvalues, self.eigenvectors))


def _as_square(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    return a


def _off_norm(a: np.ndarray) -> float:
    return math.sqrt(2.0 * float(np.sum(np.triu(a, 1) ** 2)))


def sym_eigen(a, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> EigenDecomposition:
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm is at most
    ``tol * ||A||_F``. Eigenvalues are returned in ascending order (stable
    for ties) with matching orthonormal eigenvector columns.

    Raises
    ------
    NotSymmetric
        If ``max|A - A^T| > 1e-12 ||A||_F``.
    NoConvergence
        If the threshold is not reached within ``max_sweeps`` sweeps.
    """
    a0 = _as_square(a)
    n = a0.shape[0]
    norm = float(np.linalg.norm(a0))
    if n and float(np.max(np.abs(a0 - a0.T))) > SYMMETRY_TOL * norm:
        raise NotSymmetric("NotSymmetric: matrix is not symmetric within 1e-12*||A||")
    a0 = 0.5 * (a0 + a0.T)
    w = a0.copy()
    v = np.eye(n)
    threshold = tol * norm

    sweeps = 0
    while _off_norm(w) > threshold:
        if sweeps >= max_sweeps:
            raise NoConvergence(f"NoConvergence: Jacobi did not converge in {max_sweeps} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = w[p, q]
                if apq == 0.0:
                    continue
                diff = float(w[q, q] - w[p, p])
                if abs(apq) < 1e-150 * abs(diff):
                    t = float(apq) / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                cp = w[:, p].copy()
                cq = w[:, q]
                w[:, p] = c * cp - s * cq
                w[:, q] = s * cp + c * cq
                rp = w[p, :].copy()
                rq = w[q, :]
                w[p, :] = c * rp - s * rq
                w[q, :] = s * rp + c * rq
                w[p, q] = w[q, p] = 0.0

                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq

    lam = np.diag(w).copy()
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    v = v[:, order]
    resid = float(np.max(np.linalg.norm(a0 @ v - v * lam, axis=0))) if n else 0.0
    return EigenDecomposition(lam, v, resid, sweeps)


def solve_linear(a, b) -> np.ndarray:
    """Solve ``a x = b`` by Gaussian elimination with partial pivoting.

    ``b`` may be a vector or a matrix of right-hand sides. Raises
    :class:`Singular` when a pivot falls below ``1e-14 * ||a||_F``.
    """
    a = _as_square(a)
    x = np.array(b, dtype=float)
    n = a.shape[0]
    if x.shape[0] != n:
        raise DimensionMismatch(f"rhs has {x.shape[0]} rows, matrix has {n}")
    lu = a.copy()
    tiny = PIVOT_TOL * float(np.linalg.norm(a))

    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) <= tiny:
            raise Singular(f"Singular: pivot {lu[p, k]!r} at column {k}")
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            x[[k, p]] = x[[p, k]]
        f = lu[k + 1:, k] / lu[k, k]
        lu[k + 1:, k:] -= np.outer(f, lu[k, k:])
        if x.ndim == 1:
            x[k + 1:] -= f * x[k]
        else:
            x[k + 1:] -= np.outer(f, x[k])

    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - lu[k, k + 1:] @ x[k + 1:]) / lu[k, k]
    return x


def orthonormalize(vectors, rank_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal columns spanning ``vectors`` (Gram-Schmidt, two passes).

    ``vectors`` is a sequence of 1-D arrays or a 2-D array whose columns are
    the vectors.
    """
    m = _columns(vectors)
    q = np.zeros_like(m)
    for k in range(m.shape[1]):
        col = m[:, k].copy()
        ref = np.linalg.norm(col)
        for _ in range(2):
            col -= q[:, :k] @ (q[:, :k].T @ col)
        nrm = np.linalg.norm(col)
        if ref == 0.0 or nrm <= rank_tol * ref:
            raise RankDeficientBasis(f"RankDeficientBasis: vector {k} is (nearly) dependent")
        q[:, k] = col / nrm
    return q


def _columns(vectors) -> np.ndarray:
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        return np.array(vectors, dtype=float)
    cols = [np.asarray(v, dtype=float).ravel() for v in vectors]
    if not cols:
        raise RankDeficientBasis("RankDeficientBasis: empty basis")
    if len({c.shape[0] for c in cols}) != 1:
        raise DimensionMismatch("basis vectors have different lengths")
    return np.stack(cols, axis=1)


def subspace_distance(first: Sequence | np.ndarray, second: Sequence | np.ndarray) -> float:
    """``sup_{x in span(first), |x|=1} inf_{y in span(second)} |x - y|``.

    Both bases are orthonormalized; the value is the largest singular value of
    the component of the first basis orthogonal to the second, i.e. the sine
    of the largest principal angle (1 when ``dim first > dim second``).
    """
    q1 = orthonormalize(first)
    q2 = orthonormalize(second)
    if q1.shape[0] != q2.shape[0]:
        raise DimensionMismatch("bases live in different ambient dimensions")
    r = q1 - q2 @ (q2.T @ q1)
    top = sym_eigen(r.T @ r).eigenvalues[-1]
    return float(min(1.0, math.sqrt(max(top, 0.0))))
