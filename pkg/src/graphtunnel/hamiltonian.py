"""Schrodinger matrices ``hbar^2 Delta + V`` and their Dirichlet restrictions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGroundState, NotAWell, ValidationError, VanishingAtWell
from .graph_core import Graph, Potential, WellSet
from .linalg import sym_eigen

SIMPLICITY_TOL = 1e-12
VANISHING_TOL = 1e-12


@dataclass(frozen=True)
class SemiclassicalParams:
    hbar: float

    def __post_init__(self):
        if not self.hbar > 0:
            raise ValidationError(f"hbar must be > 0, got {self.hbar!r}")


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense symmetric matrix together with the vertex labels of its rows.

    ``kind`` is ``"full"`` or ``"dirichlet"``; for the latter ``well`` names
    the kept well ``j`` and the rows cover ``X \\ L_j`` in vertex order.
    """

    entries: np.ndarray
    index: tuple[str, ...]
    kind: str = "full"
    well: str | None = None

    def row(self, x: str) -> int:
        return self.index.index(x)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))


def _hbar_value(hbar) -> float:
    h = hbar.hbar if isinstance(hbar, SemiclassicalParams) else float(hbar)
    if h < 0:
        raise ValidationError(f"hbar must be >= 0, got {h!r}")
    return h


def build_hamiltonian(g: Graph, v: Potential, hbar) -> OperatorMatrix:
    """``H = hbar^2 Delta + V`` with ``(Delta f)(x) = -sum_{y~x} f(y)``.

    ``hbar = 0`` is accepted and gives ``diag(V)``.
    """
    h = _hbar_value(hbar)
    mat = -(h * h) * g.adjacency_matrix()
    mat[np.diag_indices(g.n)] = v.as_array(g)
    return OperatorMatrix(mat, g.vertices)


def dirichlet_restriction(h: OperatorMatrix, wells: WellSet, j: str) -> OperatorMatrix:
    if j not in wells.wells:
        raise NotAWell(f"NotAWell: {j!r}")
    drop = set(wells.others(j))
    keep = [i for i, x in enumerate(h.index) if x not in drop]
    sub = h.entries[np.ix_(keep, keep)].copy()
    return OperatorMatrix(sub, tuple(h.index[i] for i in keep), "dirichlet", j)


def ground_state(mat: np.ndarray, pivot: int) -> tuple[float, np.ndarray]:
    """Lowest eigenpair of ``mat`` scaled so that component ``pivot`` is 1.

    Shared by the graph Dirichlet problems and the annealing quasimodes, where
    the "well" carries a small positive potential.
    """
    dec = sym_eigen(mat)
    lam = dec.eigenvalues
    scale = float(np.linalg.norm(mat))
    if lam.size > 1 and lam[1] - lam[0] <= SIMPLICITY_TOL * scale:
        raise DegenerateGroundState(
            f"DegenerateGroundState: lowest eigenvalues {lam[0]!r}, {lam[1]!r} are not separated"
        )
    vec = dec.eigenvectors[:, 0]
    if abs(vec[pivot]) < VANISHING_TOL:
        raise VanishingAtWell(
            f"VanishingAtWell: |psi(j)| = {abs(vec[pivot]):.3e} < 1e-12 (hbar too large?)"
        )
    return float(lam[0]), vec / vec[pivot]


def dirichlet_ground_state(hj: OperatorMatrix, full_index: tuple[str, ...] | None = None):
    """Ground state ``(mu_j, psi_j)`` of a Dirichlet restriction.

    ``psi_j`` is normalised by ``psi_j(j) = 1``. When ``full_index`` (the
    vertex list of the whole graph) is given, ``psi_j`` is extended by zero to
    all of ``X``; otherwise it is indexed like ``hj``.
    """
    if hj.kind != "dirichlet" or hj.well is None:
        raise ValidationError("dirichlet_ground_state expects a dirichlet-kind OperatorMatrix")
    mu, vec = ground_state(hj.entries, hj.row(hj.well))
    if full_index is None:
        return mu, vec
    full = np.zeros(len(full_index))
    pos = {x: i for i, x in enumerate(full_index)}
    for k, x in enumerate(hj.index):
        full[pos[x]] = vec[k]
    return mu, full
