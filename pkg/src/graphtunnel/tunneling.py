"""Tunneling quasimodes, the well eigenvalues ``mu_j`` and interaction matrices.

For a well ``j`` and a spectral parameter ``lam`` near 0, ``psi_lam`` equals 1
at ``j``, vanishes on the other wells and is given off the wells by the sum
of ``s_lam(P)`` over paths ``P: x -> j`` with well-free interior. ``mu_j`` is
the root of ``sum_{P: j -> j} s_mu(P) = 1``, solved here in the expanded form

    mu = -sum_{k>=2} hbar^(2k) sum_{|P|=k} prod_{l=1}^{k-1} (V(x_l) - mu)^(-1)

by fixed-point iteration from ``mu = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import quasimodes as qm
from .errors import (
    NoConvergence, NotAWell, NotConstantDegree, NotSimplePotential, SeriesMayDiverge,
    ValidationError,
)
from .fitting import EXACT_FLOOR, OrderFit, fit_order
from .graph_core import Graph, Potential, WellSet, bfs_distances
from .hamiltonian import build_hamiltonian, dirichlet_ground_state, dirichlet_restriction
from .linalg import solve_linear, sym_eigen
from .paths import (
    WeightParams, count_paths, enumerate_paths, loop_counts, loop_sum_expanded, min_gap,
    path_weight, series_ratio, truncation_bound, walk_sums,
)

MU_TOL = 1e-14
MU_MAX_ITER = 100
ORDER_SLACK = 0.25


def default_truncation(S0: int | None) -> int:
    """Two orders beyond the leading interaction term: ``2 S0 + 6``."""
    return 2 * (S0 if S0 else 1) + 6


def _check_well(wells: WellSet, j: str):
    if j not in wells.wells:
        raise NotAWell(f"NotAWell: {j!r}")


def leading_mu_term(g: Graph, v: Potential, j: str, hbar: float) -> float:
    """``hbar^4 sum_{y ~ j} 1/V(y)``, the magnitude of the leading term of ``mu_j``."""
    return hbar ** 4 * sum(1.0 / v[y] for y in g.neighbors(j))


@dataclass(frozen=True)
class QuasimodeVector:
    well: str
    values: np.ndarray
    lambda_used: float
    hbar: float
    tail_bound: float | None = None
    truncation_len: int | None = None


@dataclass(frozen=True)
class WellEigenvalue:
    well: str
    mu: float
    iterations: int
    residual: float
    truncation_len: int
    tail_bound: float
    rho: float
    hbar: float
    oracle_mu: float
    leading_term: float

    @property
    def oracle_diff(self) -> float:
        return abs(self.mu - self.oracle_mu)

    def to_dict(self) -> dict:
        return {
            "well": self.well,
            "hbar": self.hbar,
            "mu": self.mu,
            "iterations": self.iterations,
            "residual": self.residual,
            "truncation_len": self.truncation_len,
            "tail_bound": self.tail_bound,
            "rho": self.rho,
            "oracle_mu": self.oracle_mu,
            "oracle_diff": self.oracle_diff,
            "leading_term_positive_form": self.leading_term,
            "abs_mu_over_leading": (abs(self.mu) / self.leading_term) if self.leading_term else None,
            "mu_sign": "negative" if self.mu < 0 else ("zero" if self.mu == 0 else "positive"),
        }


def psi_lambda_pathsum(g: Graph, v: Potential, wells: WellSet, j: str, lam: float, hbar: float,
                       K: int) -> QuasimodeVector:
    """``psi_lam`` from path sums truncated at length ``K``."""
    _check_well(wells, j)
    w = WeightParams(hbar, lam)
    tail = truncation_bound(g, w, v, K)
    vals = walk_sums(g, v, wells, j, w, K)
    vals[g.idx(j)] = 1.0
    return QuasimodeVector(j, vals, lam, hbar, tail, K)


def psi_lambda_exact(g: Graph, v: Potential, wells: WellSet, j: str, lam: float,
                     hbar: float) -> QuasimodeVector:
    """``psi_lam`` from the linear system ``((H - lam) psi)(x) = 0`` for ``x`` off the wells."""
    _check_well(wells, j)
    H = build_hamiltonian(g, v, hbar).entries
    free = [g.index[x] for x in g.vertices if x not in wells.wells]
    vals = np.zeros(g.n)
    jj = g.idx(j)
    vals[jj] = 1.0
    if free:
        M = H[np.ix_(free, free)] - lam * np.eye(len(free))
        rhs = -H[free, jj]
        vals[free] = solve_linear(M, rhs)
    return QuasimodeVector(j, vals, lam, hbar)


def solve_mu(g: Graph, v: Potential, wells: WellSet, j: str, hbar: float, K: int | None = None,
             tol: float = MU_TOL, max_iter: int = MU_MAX_ITER) -> WellEigenvalue:
    """Fixed-point solution of the implicit loop equation for ``mu_j``.

    The result is cross-checked against the ground state of the Dirichlet
    restriction ``H_j`` (``oracle_mu``).
    """
    _check_well(wells, j)
    if K is None:
        K = default_truncation(wells.S0)

    mu = 0.0
    it = 0
    while True:
        rho = series_ratio(g, v, WeightParams(hbar, mu))
        if rho >= 1.0:
            raise SeriesMayDiverge(rho, hbar)
        new = -loop_sum_expanded(g, v, wells, j, WeightParams(hbar, mu), K)
        it += 1
        if not math.isfinite(new):
            raise NoConvergence(f"NoConvergence: iterate became {new!r}")
        done = abs(new - mu) <= tol * max(1.0, abs(mu))
        mu = new
        if done:
            break
        if it >= max_iter:
            raise NoConvergence(f"NoConvergence: mu iteration for {j!r} hit {max_iter} steps")

    w = WeightParams(hbar, mu)
    rho = series_ratio(g, v, w)
    if rho >= 1.0:
        raise SeriesMayDiverge(rho, hbar)
    F = loop_sum_expanded(g, v, wells, j, w, K)
    m = min_gap(g, v, mu)
    m = m if math.isfinite(m) else 0.0
    if mu != 0.0:
        # sum_{P: j->j} s_mu(P) = a(j) * F with a(j) = -1/mu
        residual = abs(-F / mu - 1.0)
        tail = truncation_bound(g, w, v, K, endpoint_factor=m / abs(mu))
    else:
        residual = abs(F)
        tail = truncation_bound(g, w, v, K, endpoint_factor=m)

    hj = dirichlet_restriction(build_hamiltonian(g, v, hbar), wells, j)
    oracle_mu, _ = dirichlet_ground_state(hj)
    return WellEigenvalue(j, mu, it, residual, K, tail, rho, hbar, oracle_mu,
                          leading_mu_term(g, v, j, hbar))


def ground_quasimode(g: Graph, v: Potential, wells: WellSet, j: str, hbar: float,
                     K: int | None = None) -> tuple[WellEigenvalue, QuasimodeVector]:
    """``(mu_j, psi_j)`` with ``psi_j = psi_lam`` evaluated exactly at ``lam = mu_j``."""
    ev = solve_mu(g, v, wells, j, hbar, K)
    return ev, psi_lambda_exact(g, v, wells, j, ev.mu, hbar)


def decay_report(psis: Sequence[QuasimodeVector], wells: WellSet, g: Graph) -> list[dict]:
    """Per-vertex log-log slope of ``|psi_j(x)|`` in ``hbar`` against ``2 D(x, j)``.

    ``psis`` holds the same well's quasimode at three or more values of hbar.
    Vertices where ``psi`` vanishes identically (the other wells) get
    ``slope = None``.
    """
    if len(psis) < 3:
        raise ValidationError("decay_report needs psi at >= 3 values of hbar")
    j = psis[0].well
    if any(p.well != j for p in psis):
        raise ValidationError("decay_report expects quasimodes of a single well")
    dist = bfs_distances(g, j)
    hb = [p.hbar for p in psis]
    rows = []
    for x in g.vertices:
        i = g.index[x]
        vals = [abs(float(p.values[i])) for p in psis]
        D = dist[x]
        if all(val == 0.0 for val in vals):
            slope = None
        elif vals[0] == vals[-1] and all(val == vals[0] for val in vals):
            slope = 0.0
        else:
            slope = fit_order(hb, vals, floor=0.0).slope
        expected = None if D == math.inf else 2 * int(D)
        rows.append({
            "vertex": x,
            "distance": None if D == math.inf else int(D),
            "abs_psi": vals,
            "slope": slope,
            "slope_minus_2D": None if slope is None or expected is None else slope - expected,
        })
    return rows


@dataclass
class InteractionMatrix:
    wells: tuple[str, ...]
    diag: np.ndarray
    offdiag: np.ndarray
    S0: int | None
    mode: str
    hbar: float
    truncation_len: int | None = None
    warnings: list[str] = field(default_factory=list)
    well_eigenvalues: list[WellEigenvalue] = field(default_factory=list, repr=False)

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.diag) + self.offdiag

    def eigenvalues(self) -> np.ndarray:
        return sym_eigen(self.matrix).eigenvalues

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "hbar": self.hbar,
            "wells": list(self.wells),
            "S0": self.S0,
            "truncation_len": self.truncation_len,
            "diag": self.diag.tolist(),
            "offdiag": self.offdiag.tolist(),
            "matrix": self.matrix.tolist(),
            "eigenvalues": self.eigenvalues().tolist(),
        }


def leading_offdiag(g: Graph, v: Potential, wells: WellSet, hbar: float) -> tuple[np.ndarray, list[str]]:
    """``r_ij = -hbar^(2 S0) sum_{|P| = S0} prod_{l=1}^{S0-1} 1/V(x_l)``."""
    N = wells.N
    r = np.zeros((N, N))
    notes = []
    S0 = wells.S0
    if S0 is None:
        return r, notes
    for a, i in enumerate(wells.wells):
        for b, j in enumerate(wells.wells):
            if b <= a:
                continue
            total = 0.0
            for p in enumerate_paths(g, wells, i, j, S0):
                if p.length != S0:
                    continue
                prod = 1.0
                for x in p.vertices[1:-1]:
                    prod *= 1.0 / v[x]
                total += prod
            r[a, b] = r[b, a] = -(hbar ** (2 * S0)) * total
            if total == 0.0:
                notes.append(f"no length-S0 path between wells {i} and {j}: r_ij = 0 at leading order")
    return r, notes


def interaction_matrix_leading(g: Graph, v: Potential, wells: WellSet, hbar: float,
                               K: int | None = None) -> InteractionMatrix:
    if wells.N == 0:
        raise ValidationError("no wells: the potential never vanishes")
    if K is None:
        K = default_truncation(wells.S0)
    evs = [solve_mu(g, v, wells, j, hbar, K) for j in wells.wells]
    r, notes = leading_offdiag(g, v, wells, hbar)
    return InteractionMatrix(wells.wells, np.array([e.mu for e in evs]), r, wells.S0, "leading",
                             hbar, K, notes, evs)


def tunneling_family(g: Graph, v: Potential, wells: WellSet, hbar: float, K: int | None = None,
                     H=None):
    """Quasimode family ``(H, psi_j, mu_j)`` on the cluster interval of the ``|L|``
    lowest eigenvalues, with ``delta = max(hbar^4, 1e-12)``."""
    if wells.N == 0:
        raise ValidationError("no wells: the potential never vanishes")
    H = build_hamiltonian(g, v, hbar).entries if H is None else H
    evs, psis = [], []
    for j in wells.wells:
        ev, psi = ground_quasimode(g, v, wells, j, hbar, K)
        evs.append(ev)
        psis.append(psi.values)
    delta = max(hbar ** 4, 1e-12)
    fam = qm.make_family(H, psis, [e.mu for e in evs], delta=delta)
    return fam, evs


def interaction_matrix_appendixA(g: Graph, v: Potential, wells: WellSet, hbar: float,
                                 K: int | None = None):
    """Interaction matrix ``D_mu + (<r_i|psi_j> + <r_j|psi_i>)/2`` and the full report."""
    fam, evs = tunneling_family(g, v, wells, hbar, K)
    rep = qm.build_interaction_appendixA(fam)
    approx = rep.approx
    diag = np.diag(approx).copy()
    off = approx - np.diag(diag)
    im = InteractionMatrix(wells.wells, diag, off, wells.S0, "appendixA", hbar,
                           evs[0].truncation_len, [], evs)
    return im, rep, fam


def lowest_eigenvalues(g: Graph, v: Potential, hbar: float, N: int) -> np.ndarray:
    return sym_eigen(build_hamiltonian(g, v, hbar).entries).eigenvalues[:N]


@dataclass
class OrderFitReport:
    mode: str
    hbars: list[float]
    S0: int | None
    expected_order: float | None
    threshold: float | None
    errors: list[list[float]]  # errors[t][k]: hbar index t, eigenvalue index k
    approx: list[list[float]]
    exact: list[list[float]]
    fits: list[OrderFit]
    passed: list[bool]
    reference: list[float] = field(default_factory=list)
    reference_fit: OrderFit | None = None
    tail_bounds: list[float] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(self.passed)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "hbars": self.hbars,
            "S0": self.S0,
            "expected_order": self.expected_order,
            "slope_threshold": self.threshold,
            "exact_floor": EXACT_FLOOR,
            "approx_eigenvalues": self.approx,
            "exact_eigenvalues": self.exact,
            "errors": self.errors,
            "fits": [f.to_dict() for f in self.fits],
            "passed": self.passed,
            "all_passed": self.all_passed,
            "reference": self.reference,
            "reference_fit": None if self.reference_fit is None else self.reference_fit.to_dict(),
            "tail_bounds": self.tail_bounds,
            "warnings": self.warnings,
        }


def _check_grid(hbar_grid: Sequence[float]) -> list[float]:
    hb = [float(h) for h in hbar_grid]
    if len(hb) < 4:
        raise ValidationError(f"need >= 4 hbar values, got {len(hb)}")
    if any(h <= 0 for h in hb) or any(b >= a for a, b in zip(hb, hb[1:])):
        raise ValidationError("hbar grid must be positive and strictly decreasing")
    return hb


def _fit_pass(fit: OrderFit, threshold: float | None) -> bool:
    if fit.exact:
        return True
    if threshold is None:
        return False
    return fit.slope >= threshold


def verify_order(g: Graph, v: Potential, wells: WellSet, hbar_grid: Sequence[float],
                 K: int | None = None) -> OrderFitReport:
    """Compare the leading interaction matrix with the ``|L|`` lowest eigenvalues of
    ``H`` over a decreasing hbar grid; each index passes if the fitted order
    of its error is at least ``2 S0 + 2 - 0.25`` (or the error is below the
    exact-agreement floor)."""
    hb = _check_grid(hbar_grid)
    N = wells.N
    errs, app, exa, tails, warns = [], [], [], [], []
    for h in hb:
        im = interaction_matrix_leading(g, v, wells, h, K)
        lam_I = im.eigenvalues()
        lam_H = lowest_eigenvalues(g, v, h, N)
        app.append(lam_I.tolist())
        exa.append(lam_H.tolist())
        errs.append(np.abs(lam_I - lam_H).tolist())
        tails.append(max(e.tail_bound for e in im.well_eigenvalues))
        for w in im.warnings:
            if w not in warns:
                warns.append(w)
    expected = None if wells.S0 is None else float(2 * wells.S0 + 2)
    threshold = None if expected is None else expected - ORDER_SLACK
    fits = [fit_order(hb, [e[k] for e in errs]) for k in range(N)]
    passed = [_fit_pass(f, threshold) for f in fits]
    return OrderFitReport("leading", hb, wells.S0, expected, threshold, errs, app, exa, fits,
                          passed, tail_bounds=tails, warnings=warns)


def corollary_sweep(families: Sequence[qm.QuasimodeFamily], params: Sequence[float],
                    mode: str = "appendixA", S0: int | None = None) -> OrderFitReport:
    """Order fit of the first-order eigenvalue errors against ``eps (eps + eta)``.

    ``params`` is the small parameter the families are indexed by (hbar).
    Each index passes if its fitted order is at least the fitted order of
    ``eps (eps + eta)`` minus 0.25.
    """
    errs, app, exa, ref = [], [], [], []
    for fam in families:
        cmp_ = qm.eig_compare_corollary(fam)
        errs.append(cmp_.errors.tolist())
        app.append(cmp_.approx_eigenvalues.tolist())
        exa.append(cmp_.exact_eigenvalues.tolist())
        ref.append(cmp_.reference)
    ref_fit = fit_order(params, ref)
    threshold = None if ref_fit.exact else ref_fit.slope - ORDER_SLACK
    N = len(errs[0])
    fits = [fit_order(params, [e[k] for e in errs]) for k in range(N)]
    passed = [_fit_pass(f, threshold) for f in fits]
    return OrderFitReport(mode, list(params), S0, None if ref_fit.exact else ref_fit.slope,
                          threshold, errs, app, exa, fits, passed, ref, ref_fit)


def verify_corollary(g: Graph, v: Potential, wells: WellSet, hbar_grid: Sequence[float],
                     K: int | None = None) -> OrderFitReport:
    hb = _check_grid(hbar_grid)
    fams = [tunneling_family(g, v, wells, h, K)[0] for h in hb]
    return corollary_sweep(fams, hb, "appendixA", wells.S0)


def simple_path_weight(length: int, lam: float, hbar: float) -> float:
    """``hbar^(2k) (-lam)^(-1) (1 - lam)^(1-k)`` for a loop of length ``k`` through
    ``V = 1`` vertices, multiplied out in the same order as :func:`path_weight`."""
    prod = 1.0 / (0.0 - lam)
    for _ in range(length - 1):
        prod *= 1.0 / (1.0 - lam)
    return hbar ** (2 * length) * prod


@dataclass
class SimplePotentialReport:
    degree: int
    hbar: float
    truncation_len: int
    S0: int | None
    loop_counts: dict[str, dict[int, int]]
    mus: dict[str, float]
    path_counts: dict[tuple[str, str], int]
    offdiag: np.ndarray
    max_weight_mismatch: float = 0.0

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "hbar": self.hbar,
            "truncation_len": self.truncation_len,
            "S0": self.S0,
            "loop_counts": {j: {str(k): c for k, c in lc.items()} for j, lc in self.loop_counts.items()},
            "mu": self.mus,
            "path_counts": [[i, j, c] for (i, j), c in self.path_counts.items()],
            "offdiag": self.offdiag.tolist(),
            "max_weight_mismatch": self.max_weight_mismatch,
        }


def simple_potential_specialize(g: Graph, v: Potential, wells: WellSet, hbar: float,
                                K: int | None = None, check_weights: bool = True) -> SimplePotentialReport:
    """Purely combinatorial interaction data for ``V`` in ``{0, 1}`` on a regular graph.

    ``mu_j`` solves ``mu = -sum_k hbar^(2k) (1 - mu)^(1-k) N_j(k)`` and
    ``r_ij = -hbar^(2 S0) #{P: i -> j, |P| = S0}``. With ``check_weights``
    each enumerated loop's generic weight is compared with the closed form;
    ``max_weight_mismatch`` records the largest absolute difference.
    """
    if not v.is_simple():
        raise NotSimplePotential("NotSimplePotential: V takes values outside {0, 1}")
    degs = set(g.degrees())
    if len(degs) > 1:
        raise NotConstantDegree(f"NotConstantDegree: degrees {sorted(degs)}")
    d = degs.pop() if degs else 0
    if K is None:
        K = default_truncation(wells.S0)
    if hbar ** 2 * d >= 1.0:
        raise SeriesMayDiverge(hbar ** 2 * d, hbar)

    counts: dict[str, dict[int, int]] = {}
    mus: dict[str, float] = {}
    mismatch = 0.0
    for j in wells.wells:
        lc = loop_counts(g, wells, j, K)
        counts[j] = dict(lc.counts)
        mu = 0.0
        for it in range(MU_MAX_ITER):
            new = 0.0
            for k in range(2, K + 1):
                if lc[k]:
                    new -= hbar ** (2 * k) * (1.0 - mu) ** (1 - k) * lc[k]
            done = abs(new - mu) <= MU_TOL * max(1.0, abs(mu))
            mu = new
            if done:
                break
        else:
            raise NoConvergence(f"NoConvergence: simple mu iteration for {j!r}")
        mus[j] = mu
        if check_weights and mu != 0.0:
            w = WeightParams(hbar, mu)
            for p in enumerate_paths(g, wells, j, j, K):
                mismatch = max(mismatch, abs(path_weight(p, v, w) - simple_path_weight(p.length, mu, hbar)))

    N = wells.N
    r = np.zeros((N, N))
    pc: dict[tuple[str, str], int] = {}
    if wells.S0 is not None:
        for a, i in enumerate(wells.wells):
            for b, j in enumerate(wells.wells):
                if b <= a:
                    continue
                c = count_paths(g, wells, i, j, wells.S0)[wells.S0]
                pc[(i, j)] = c
                r[a, b] = r[b, a] = -(hbar ** (2 * wells.S0)) * c
    return SimplePotentialReport(d, hbar, K, wells.S0, counts, mus, pc, r, mismatch)
