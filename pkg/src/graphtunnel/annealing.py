"""Energy landscapes on graphs, the Metropolis-type generator and its gap.

Two small parameters appear: ``eps = exp(-1/(2T))`` enters the symmetrised
operator ``H_T = -eps A_G + V_eps``; exponents are also reported against
``exp(-1/T) = eps^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import quasimodes as qm
from .errors import GapCollision, InvalidLandscape, ValidationError
from .fitting import loglog_slope
from .graph_core import Graph, Potential, build_graph
from .linalg import sym_eigen

STATIONARITY_TOL = 1e-12
GAP_COLLISION_TOL = 1e-13


@dataclass(frozen=True)
class Landscape:
    graph: Graph
    energy: Mapping[str, int]

    def __post_init__(self):
        g = self.graph
        for x in g.vertices:
            if x not in self.energy:
                raise InvalidLandscape(f"InvalidLandscape: no energy for vertex {x!r}")
            e = self.energy[x]
            if isinstance(e, bool) or not isinstance(e, (int, np.integer)) or e < 0:
                raise InvalidLandscape(f"InvalidLandscape: energy({x}) = {e!r} is not a natural number")
        for u, v in g.edge_list():
            if abs(self.energy[u] - self.energy[v]) != 1:
                raise InvalidLandscape(
                    f"InvalidLandscape: edge ({u}, {v}) has energies {self.energy[u]}, {self.energy[v]}"
                )

    def energies(self) -> np.ndarray:
        return np.array([self.energy[x] for x in self.graph.vertices], dtype=float)

    def n_plus(self, x: str) -> int:
        """Number of downhill neighbours."""
        return sum(1 for y in self.graph.neighbors(x) if self.energy[y] == self.energy[x] - 1)

    def n_minus(self, x: str) -> int:
        return sum(1 for y in self.graph.neighbors(x) if self.energy[y] == self.energy[x] + 1)

    def local_minima(self) -> tuple[str, ...]:
        return tuple(x for x in self.graph.vertices if self.n_plus(x) == 0)


def make_landscape(vertices: Sequence[str], edges, energy: Mapping[str, int] | Sequence[int]) -> Landscape:
    g = build_graph(vertices, edges)
    if not isinstance(energy, Mapping):
        if len(energy) != g.n:
            raise InvalidLandscape("InvalidLandscape: energy list length differs from vertex count")
        energy = dict(zip(g.vertices, energy))
    clean = {}
    for x, e in energy.items():
        if isinstance(e, float) and e.is_integer():
            e = int(e)
        clean[str(x)] = e
    return Landscape(g, clean)


@dataclass(frozen=True)
class ThermalModel:
    T: float
    eps: float
    Z: float
    gibbs: np.ndarray


def thermal_model(l: Landscape, T: float) -> ThermalModel:
    if not T > 0:
        raise ValidationError(f"temperature must be > 0, got {T!r}")
    boltz = np.exp(-l.energies() / T)
    Z = float(boltz.sum())
    return ThermalModel(T, math.exp(-1.0 / (2.0 * T)), Z, boltz / Z)


def build_generator(l: Landscape, T: float) -> np.ndarray:
    """Generator ``Lambda_T``: rate 1 downhill, ``exp(-1/T)`` uphill, rows summing to 0.

    The diagonal is minus the left-to-right sum of the row's off-diagonal
    entries, so that sum plus the diagonal is exactly zero.
    """
    if not T > 0:
        raise ValidationError(f"temperature must be > 0, got {T!r}")
    g = l.graph
    n = g.n
    lam = np.zeros((n, n))
    up = math.exp(-1.0 / T)
    for x in g.vertices:
        i = g.index[x]
        for y in g.adjacency[x]:
            dE = l.energy[y] - l.energy[x]
            lam[i, g.index[y]] = 1.0 if dE < 0 else up
        s = 0.0
        for k in range(n):
            if k != i:
                s += lam[i, k]
        lam[i, i] = -s
    return lam


def row_sums(lam: np.ndarray) -> list[float]:
    """Left-to-right off-diagonal sum plus diagonal, per row."""
    out = []
    n = lam.shape[0]
    for i in range(n):
        s = 0.0
        for k in range(n):
            if k != i:
                s += lam[i, k]
        out.append(s + lam[i, i])
    return out


def check_stationarity(l: Landscape, T: float) -> float:
    """``|| mu_T^T Lambda_T ||_inf``."""
    lam = build_generator(l, T)
    mu = thermal_model(l, T).gibbs
    return float(np.max(np.abs(mu @ lam))) if lam.size else 0.0


def detailed_balance_defect(l: Landscape, T: float) -> float:
    """Largest relative mismatch of ``mu(x) lambda_xy`` and ``mu(y) lambda_yx`` over edges."""
    lam = build_generator(l, T)
    mu = thermal_model(l, T).gibbs
    g = l.graph
    worst = 0.0
    for u, v in g.edge_list():
        i, j = g.index[u], g.index[v]
        a, b = mu[i] * lam[i, j], mu[j] * lam[j, i]
        worst = max(worst, abs(a - b) / max(abs(a), abs(b)))
    return worst


def symmetrized_operator(l: Landscape, T: float) -> np.ndarray:
    """``H_T = -eps A_G + V_eps`` with ``V_eps = n_+ + eps^2 n_-``."""
    eps = math.exp(-1.0 / (2.0 * T))
    g = l.graph
    H = -eps * g.adjacency_matrix()
    for x in g.vertices:
        i = g.index[x]
        H[i, i] = l.n_plus(x) + eps * eps * l.n_minus(x)
    return H


def conjugated_generator(l: Landscape, T: float) -> np.ndarray:
    """``-U* Lambda_T U`` for ``(Uf)(x) = Z^{1/2} exp(E(x)/(2T)) f(x)``.

    ``U`` maps ``l2(counting)`` to ``l2(mu_T)``; its adjoint is
    ``diag(mu_T) U`` as a matrix.
    """
    tm = thermal_model(l, T)
    u = math.sqrt(tm.Z) * np.exp(l.energies() / (2.0 * T))
    U = np.diag(u)
    U_adj = np.diag(tm.gibbs) @ U
    return -(U_adj @ build_generator(l, T) @ U)


@dataclass(frozen=True)
class ConjugationCheck:
    H_formula: np.ndarray
    H_conjugated: np.ndarray
    max_rel_diff: float


def conjugated_operator(l: Landscape, T: float) -> ConjugationCheck:
    """Both constructions of ``H_T`` and their largest entrywise relative gap."""
    Hf = symmetrized_operator(l, T)
    Hc = conjugated_generator(l, T)
    scale = np.maximum(np.abs(Hf), np.abs(Hc))
    nz = scale > 0
    rel = float(np.max(np.abs(Hf - Hc)[nz] / scale[nz])) if nz.any() else 0.0
    return ConjugationCheck(Hf, Hc, rel)


def quadratic_form(l: Landscape, T: float, f: np.ndarray) -> float:
    """``Q_T(f) = sum_{x~y, E(y)=E(x)-1} (f(x) - eps f(y))^2``."""
    eps = math.exp(-1.0 / (2.0 * T))
    g = l.graph
    q = 0.0
    for u, v in g.edge_list():
        x, y = (u, v) if l.energy[v] == l.energy[u] - 1 else (v, u)
        q += (f[g.index[x]] - eps * f[g.index[y]]) ** 2
    return q


def ground_vector(l: Landscape, T: float) -> np.ndarray:
    """``f(x) = eps^E(x)``, annihilated by ``H_T``."""
    eps = math.exp(-1.0 / (2.0 * T))
    return eps ** l.energies()


@dataclass
class GapReport:
    temperatures: list[float]
    eps: list[float]
    gaps: list[float]
    lambda1: list[float]
    fitted_exponent: float
    rounded_even_exponent: int
    fit_residual: float
    distance_to_even: float

    @property
    def exponent_in_exp_minus_1_over_T(self) -> float:
        return self.fitted_exponent / 2.0

    def to_dict(self) -> dict:
        return {
            "temperatures": self.temperatures,
            "eps": self.eps,
            "gaps": self.gaps,
            "lambda1": self.lambda1,
            "fitted_exponent_eps_half": self.fitted_exponent,
            "rounded_even_exponent_eps_half": self.rounded_even_exponent,
            "exponent_exp_minus_1_over_T": self.exponent_in_exp_minus_1_over_T,
            "rounded_exponent_exp_minus_1_over_T": self.rounded_even_exponent // 2,
            "fit_residual": self.fit_residual,
            "distance_to_even": self.distance_to_even,
        }


def spectral_gap(l: Landscape, T: float) -> tuple[float, float]:
    """``(lambda_1, lambda_2)`` of ``H_T``; the gap of the process is ``lambda_2``."""
    H = symmetrized_operator(l, T)
    lam = sym_eigen(H).eigenvalues
    if lam.size < 2:
        raise ValidationError("gap needs at least two vertices")
    if lam[1] <= GAP_COLLISION_TOL * max(1.0, float(np.linalg.norm(H))):
        raise GapCollision(f"GapCollision: second eigenvalue {lam[1]!r} at T={T!r} (disconnected?)")
    return float(lam[0]), float(lam[1])


def gap_order_fit(l: Landscape, temperatures: Sequence[float]) -> GapReport:
    """Fit ``gap ~ C eps^p`` with ``eps = exp(-1/(2T))`` over decreasing temperatures."""
    Ts = [float(t) for t in temperatures]
    if len(Ts) < 4:
        raise ValidationError(f"need >= 4 temperatures, got {len(Ts)}")
    if any(t <= 0 for t in Ts) or any(b >= a for a, b in zip(Ts, Ts[1:])):
        raise ValidationError("temperatures must be positive and strictly decreasing")
    eps, gaps, l1 = [], [], []
    for T in Ts:
        lo, second = spectral_gap(l, T)
        eps.append(math.exp(-1.0 / (2.0 * T)))
        gaps.append(second)
        l1.append(lo)
    slope, _, rms = loglog_slope(eps, gaps)
    even = 2 * int(round(slope / 2.0))
    return GapReport(Ts, eps, gaps, l1, slope, even, rms, abs(slope - even))


@dataclass
class BridgeData:
    T: float
    hbar: float
    potential: Potential
    wells: tuple[str, ...]
    H: np.ndarray
    note: str = ("wells are local minima of the energy; V_eps there is eps^2 n_-(x) = O(hbar^4), "
                 "not exactly zero, so only the abstract quasimode comparison applies")


def anneal_to_tunneling_bridge(l: Landscape, T: float) -> BridgeData:
    """Restate ``H_T`` as ``hbar^2 Delta + V`` with ``hbar^2 = eps`` and ``V = V_eps``."""
    eps = math.exp(-1.0 / (2.0 * T))
    g = l.graph
    vals = {x: l.n_plus(x) + eps * eps * l.n_minus(x) for x in g.vertices}
    return BridgeData(T, math.sqrt(eps), Potential(vals), l.local_minima(), symmetrized_operator(l, T))


@dataclass
class BridgeSweep:
    temperatures: list[float]
    hbars: list[float]
    wells: tuple[str, ...]
    report: object  # tunneling.OrderFitReport
    families: list = field(default_factory=list, repr=False)


def bridge_corollary_sweep(l: Landscape, temperatures: Sequence[float]) -> BridgeSweep:
    """Quasimodes from the Dirichlet problems of ``H_T`` at the local minima,
    compared (first-order interaction matrix vs exact lowest eigenvalues) over
    a temperature grid."""
    from .tunneling import corollary_sweep

    fams, hbars = [], []
    wells = l.local_minima()
    rows = [l.graph.index[x] for x in wells]
    for T in temperatures:
        b = anneal_to_tunneling_bridge(l, T)
        fams.append(qm.dirichlet_family(b.H, rows, delta=max(b.hbar ** 4, 1e-12)))
        hbars.append(b.hbar)
    rep = corollary_sweep(fams, hbars, mode="bridge")
    return BridgeSweep(list(map(float, temperatures)), hbars, wells, rep, fams)
