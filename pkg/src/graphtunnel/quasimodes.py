"""Abstract interaction matrix for a family of quasimodes.

Given a symmetric ``A`` and vectors ``psi_j`` with ``|(A - mu_j) psi_j| <= eps``
this module builds the spectral subspace ``E`` of ``A`` for an interval
``[alpha, beta]``, checks the distance bound between ``F = span(psi_j)`` and
``E``, forms the orthonormal basis ``e_i`` of ``E`` obtained from the
projected quasimodes, and compares the exact matrix of ``A`` on ``E`` with
its first-order approximation ``D_mu + (<r_i|psi_j> + <r_j|psi_i>)/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyInterval, NoSpectralGap, SigmaNotPD, ValidationError
from .hamiltonian import ground_state
from .linalg import subspace_distance, sym_eigen

ENDPOINT_TOL = 1e-13
SIGMA_TOL = 1e-13
LEMMA_SLACK = 1e-12


@dataclass(frozen=True)
class SpectralSubspace:
    basis: np.ndarray
    gap: float
    count: int
    eigenvalues: np.ndarray
    all_eigenvalues: np.ndarray = field(repr=False)

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T


def spectral_subspace(A, interval: tuple[float, float], eig=None) -> SpectralSubspace:
    """Eigenvectors of ``A`` with eigenvalues in ``[alpha, beta]``.

    ``gap`` is the distance from the interval to the nearest eigenvalue
    outside it (``inf`` when every eigenvalue lies inside); with this choice
    no eigenvalue sits strictly closer than ``gap`` to either endpoint.
    """
    A = np.asarray(A, dtype=float)
    alpha, beta = map(float, interval)
    if not alpha <= beta:
        raise EmptyInterval(f"EmptyInterval: [{alpha}, {beta}]")
    dec = eig if eig is not None else sym_eigen(A)
    lam = dec.eigenvalues
    tol = ENDPOINT_TOL * float(np.linalg.norm(A))
    for x in lam:
        if min(abs(x - alpha), abs(x - beta)) <= tol:
            raise NoSpectralGap(f"NoSpectralGap: eigenvalue {x!r} at an endpoint of [{alpha}, {beta}]")
    inside = (lam >= alpha) & (lam <= beta)
    if not inside.any():
        raise EmptyInterval(f"EmptyInterval: no eigenvalue in [{alpha}, {beta}]")
    outside = lam[~inside]
    dists = np.where(outside < alpha, alpha - outside, outside - beta)
    gap = float(dists.min()) if dists.size else math.inf
    return SpectralSubspace(dec.eigenvectors[:, inside].copy(), gap, int(inside.sum()),
                            lam[inside].copy(), lam)


def cluster_interval(eigenvalues: np.ndarray, N: int, delta: float) -> tuple[float, float]:
    """Interval isolating the ``N`` lowest eigenvalues.

    ``alpha = lambda_1 - delta`` and ``beta`` is the midpoint between
    ``lambda_N`` and ``lambda_{N+1}`` (or ``lambda_N + delta`` if ``N = n``).
    """
    lam = np.asarray(eigenvalues)
    if not 1 <= N <= lam.size:
        raise ValidationError(f"cluster size {N} out of range for {lam.size} eigenvalues")
    alpha = float(lam[0]) - delta
    if N < lam.size:
        beta = 0.5 * (float(lam[N - 1]) + float(lam[N]))
    else:
        beta = float(lam[N - 1]) + delta
    return alpha, beta


@dataclass(frozen=True)
class QuasimodeFamily:
    A: np.ndarray
    psis: np.ndarray  # columns
    mus: np.ndarray
    interval: tuple[float, float]
    gap: float
    eps: float
    eta: float
    offdiag: float
    gram: np.ndarray
    lambda_S: float
    residuals: np.ndarray  # columns r_j = (A - mu_j) psi_j
    subspace: SpectralSubspace

    @property
    def N(self) -> int:
        return self.psis.shape[1]


def make_family(A, psis, mus: Sequence[float], interval: tuple[float, float] | None = None,
                eig=None, delta: float = 1e-12) -> QuasimodeFamily:
    """Assemble a :class:`QuasimodeFamily` and check its hypotheses.

    ``psis`` is a sequence of vectors or a matrix with one vector per column.
    Without ``interval`` the cluster interval of the ``N`` lowest eigenvalues
    is used (see :func:`cluster_interval`).
    """
    A = np.asarray(A, dtype=float)
    if isinstance(psis, np.ndarray) and psis.ndim == 2:
        P = np.array(psis, dtype=float)
    else:
        P = np.stack([np.asarray(p, dtype=float) for p in psis], axis=1)
    mus = np.asarray(mus, dtype=float)
    n, N = P.shape
    if A.shape != (n, n) or mus.shape != (N,):
        raise DimensionMismatch("A, psis and mus have inconsistent shapes")
    dec = eig if eig is not None else sym_eigen(A)
    if interval is None:
        interval = cluster_interval(dec.eigenvalues, N, delta)
    alpha, beta = interval
    for m in mus:
        if not alpha <= m <= beta:
            raise ValidationError(f"quasimode value {m!r} outside [{alpha}, {beta}]")
    sub = spectral_subspace(A, interval, dec)

    R = A @ P - P * mus
    gram = P.T @ P
    lam_s = float(sym_eigen(gram).eigenvalues[0])
    if lam_s <= 0.0:
        raise ValidationError("Gram matrix of the quasimodes is not positive definite")
    eps = float(np.max(np.linalg.norm(R, axis=0)))
    eta = float(np.max(np.abs(np.diag(gram) - 1.0)))
    off = gram - np.diag(np.diag(gram))
    offdiag = float(np.max(np.abs(off))) if N > 1 else 0.0
    return QuasimodeFamily(A, P, mus, (float(alpha), float(beta)), sub.gap, eps, eta, offdiag,
                           gram, lam_s, R, sub)


def dirichlet_family(A, well_rows: Sequence[int], delta: float = 1e-12) -> QuasimodeFamily:
    """Quasimodes from the Dirichlet problems of ``A``: for each ``j`` the
    ground state of ``A`` restricted to vectors vanishing on the other rows
    of ``well_rows``, scaled to 1 at row ``j``."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    psis, mus = [], []
    for j in well_rows:
        drop = set(well_rows) - {j}
        keep = [i for i in range(n) if i not in drop]
        mu, vec = ground_state(A[np.ix_(keep, keep)], keep.index(j))
        full = np.zeros(n)
        full[keep] = vec
        psis.append(full)
        mus.append(mu)
    return make_family(A, psis, mus, delta=delta)


@dataclass(frozen=True)
class LemmaDistResult:
    d_FE: float
    bound: float
    passed: bool


def check_lemma_dist(fam: QuasimodeFamily) -> LemmaDistResult:
    """``d(F, E) <= eps sqrt(N) / (a sqrt(lambda_S))``."""
    d = subspace_distance(fam.psis, fam.subspace.basis)
    if fam.eps == 0.0:
        bound = 0.0
    else:
        bound = fam.eps * math.sqrt(fam.N) / (fam.gap * math.sqrt(fam.lambda_S))
    return LemmaDistResult(d, bound, bool(d <= bound + LEMMA_SLACK))


def inv_sqrt_spd(S: np.ndarray, tol: float = SIGMA_TOL) -> np.ndarray:
    dec = sym_eigen(S)
    if dec.eigenvalues[0] <= tol:
        raise SigmaNotPD(f"SigmaNotPD: smallest eigenvalue {dec.eigenvalues[0]!r}")
    Q = dec.eigenvectors
    return (Q / np.sqrt(dec.eigenvalues)) @ Q.T


def first_order_matrix(fam: QuasimodeFamily) -> np.ndarray:
    """``D_mu + (<r_i|psi_j> + <r_j|psi_i>) / 2``."""
    rp = fam.residuals.T @ fam.psis  # rp[i, j] = <r_i | psi_j>
    return np.diag(fam.mus) + 0.5 * (rp + rp.T)


@dataclass(frozen=True)
class InteractionReport:
    A_E: np.ndarray
    basis_e: np.ndarray
    Sigma: np.ndarray
    kappa: np.ndarray
    approx: np.ndarray
    max_difference: float
    dist_FE: float
    dist_bound: float
    eps: float
    eta: float
    T: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "A_E": self.A_E.tolist(),
            "approx": self.approx.tolist(),
            "max_difference": self.max_difference,
            "Sigma": self.Sigma.tolist(),
            "kappa": self.kappa.tolist(),
            "dist_FE": self.dist_FE,
            "dist_bound": self.dist_bound,
            "eps": self.eps,
            "eta": self.eta,
        }


def build_interaction_appendixA(fam: QuasimodeFamily) -> InteractionReport:
    """Exact matrix of ``A`` on ``E`` in the basis ``e_i`` and its approximation.

    ``Psi_i = psi_i/|psi_i|``, ``V_i = Pi Psi_i``, ``Sigma = (<V_i|V_j>)``,
    ``kappa = Sigma^{-1/2}`` and ``e_i = sum_k kappa_ik V_k``.
    """
    if fam.subspace.count != fam.N:
        raise DimensionMismatch(
            f"DimensionMismatch: dim E = {fam.subspace.count} but {fam.N} quasimodes"
        )
    Pi = fam.subspace.projector()
    Psi = fam.psis / np.linalg.norm(fam.psis, axis=0)
    V = Pi @ Psi
    Sigma = V.T @ V
    kappa = inv_sqrt_spd(Sigma)
    E = V @ kappa.T
    A_E = E.T @ fam.A @ E
    approx = first_order_matrix(fam)
    lem = check_lemma_dist(fam)
    return InteractionReport(
        A_E=A_E,
        basis_e=E,
        Sigma=Sigma,
        kappa=kappa,
        approx=approx,
        max_difference=float(np.max(np.abs(A_E - approx))),
        dist_FE=lem.d_FE,
        dist_bound=lem.bound,
        eps=fam.eps,
        eta=fam.eta,
        T=Sigma - np.eye(fam.N),
    )


@dataclass(frozen=True)
class CorollaryComparison:
    approx_eigenvalues: np.ndarray
    exact_eigenvalues: np.ndarray
    errors: np.ndarray
    reference: float  # eps * (eps + eta)


def eig_compare_corollary(fam: QuasimodeFamily) -> CorollaryComparison:
    if fam.subspace.count != fam.N:
        raise DimensionMismatch(
            f"DimensionMismatch: dim E = {fam.subspace.count} but {fam.N} quasimodes"
        )
    approx = sym_eigen(first_order_matrix(fam)).eigenvalues
    exact = fam.subspace.eigenvalues
    return CorollaryComparison(approx, exact, np.abs(approx - exact), fam.eps * (fam.eps + fam.eta))
