"""Command-line interface.

JSON reports go to stdout, a short human summary to stderr. Exit codes:
0 ok, 1 verification FAIL, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from . import annealing as an
from . import tunneling as tn
from .errors import NumericalError, ValidationError
from .fitting import EXACT_FLOOR
from .formats import REPORT_FORMAT, DIGITS_ENV, dump_report, graph_from_dict, landscape_from_dict, read_input
from .graph_core import detect_wells
from .hamiltonian import build_hamiltonian, dirichlet_restriction
from .linalg import JACOBI_TOL, sym_eigen

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULT_TEMPS = "1/2,1/3,1/4,1/5,1/6"
SIGN_NOTE = ("mu_j from the implicit loop equation is negative; the closed-form leading term "
             "hbar^4 * sum_{y~j} 1/V(y) is positive and matches |mu_j| only")


class UsageError(ValidationError):
    pass


def _report(command, inputs, results, warnings=(), table=None):
    rep = {
        "format": REPORT_FORMAT,
        "command": command,
        "inputs": inputs,
        "results": results,
        "warnings": list(warnings),
        "versions": {"format": REPORT_FORMAT, "package": __version__},
    }
    return rep, table


def _load_graph(path):
    obj, digest = read_input(path)
    g, v = graph_from_dict(obj, path)
    return g, v, detect_wells(g, v), {"file": str(path), "sha256": digest}


def _check_hbar(h):
    if not h > 0:
        raise UsageError(f"--hbar must be > 0, got {h!r}")


def cmd_wells(args):
    g, v, wells, inputs = _load_graph(args.graph)
    dmat = [[None if d == float("inf") else int(d) for d in row] for row in wells.pairwise_distances]
    results = {
        "wells": list(wells.wells),
        "N": wells.N,
        "S0": wells.S0,
        "pairwise_distances": dmat,
        "degrees": dict(zip(g.vertices, g.degrees())),
    }
    table = [["well", *wells.wells]] + [[w, *row] for w, row in zip(wells.wells, dmat)]
    summary = f"{wells.N} well(s) {list(wells.wells)}, S0 = {wells.S0}"
    return _report("wells", inputs, results, table=table), summary


def cmd_spectrum(args):
    _check_hbar(args.hbar)
    g, v, wells, inputs = _load_graph(args.graph)
    inputs.update(hbar=args.hbar, dirichlet_well=args.dirichlet_well, jacobi_tol=JACOBI_TOL)
    H = build_hamiltonian(g, v, args.hbar)
    if args.dirichlet_well is not None:
        H = dirichlet_restriction(H, wells, args.dirichlet_well)
    dec = sym_eigen(H.entries)
    results = {
        "kind": H.kind,
        "index": list(H.index),
        "eigenvalues": dec.eigenvalues.tolist(),
        "residual": dec.residual,
        "sweeps": dec.sweeps,
    }
    table = [["index", "eigenvalue"]] + [[k, lam] for k, lam in enumerate(dec.eigenvalues)]
    return _report("spectrum", inputs, results, table=table), f"{len(dec.eigenvalues)} eigenvalues ({H.kind})"


def cmd_mu(args):
    _check_hbar(args.hbar)
    g, v, wells, inputs = _load_graph(args.graph)
    K = args.max_path_len if args.max_path_len is not None else tn.default_truncation(wells.S0)
    inputs.update(well=args.well, hbar=args.hbar, max_path_len=K, mu_tol=tn.MU_TOL,
                  mu_max_iter=tn.MU_MAX_ITER)
    ev = tn.solve_mu(g, v, wells, args.well, args.hbar, K)
    results = ev.to_dict()
    results["sign_note"] = SIGN_NOTE if ev.mu < 0 else None
    table = [["field", "value"]] + [[k, val] for k, val in results.items() if val is not None]
    summary = f"mu_{args.well} = {ev.mu:.16e} (oracle diff {ev.oracle_diff:.2e}, {ev.iterations} iterations)"
    return _report("mu", inputs, results, table=table), summary


def _comparison(g, v, wells, hbar, eig_I):
    exact = tn.lowest_eigenvalues(g, v, hbar, wells.N)
    errs = np.abs(np.asarray(eig_I) - exact)
    return exact, errs


def cmd_interaction(args):
    _check_hbar(args.hbar)
    g, v, wells, inputs = _load_graph(args.graph)
    K = args.max_path_len if args.max_path_len is not None else tn.default_truncation(wells.S0)
    inputs.update(hbar=args.hbar, mode=args.mode, max_path_len=K)
    warnings = []
    if args.mode == "leading":
        im = tn.interaction_matrix_leading(g, v, wells, args.hbar, K)
        results = im.to_dict()
        warnings.extend(im.warnings)
    else:
        im, rep, fam = tn.interaction_matrix_appendixA(g, v, wells, args.hbar, K)
        results = im.to_dict()
        results["report"] = rep.to_dict()
        results["interval"] = list(fam.interval)
        results["gap"] = fam.gap
        results["lambda_S"] = fam.lambda_S
    eig_I = im.eigenvalues()
    exact, errs = _comparison(g, v, wells, args.hbar, eig_I)
    results["exact_lowest_eigenvalues"] = exact.tolist()
    results["errors"] = errs.tolist()
    results["well_eigenvalues"] = [e.to_dict() for e in im.well_eigenvalues]
    table = [["index", "interaction_eigenvalue", "exact_eigenvalue", "error"]]
    table += [[k, a, b, e] for k, (a, b, e) in enumerate(zip(eig_I, exact, errs))]
    summary = f"{args.mode} interaction matrix {wells.N}x{wells.N}, max error {errs.max():.3e}"
    return _report("interaction", inputs, results, warnings, table), summary


def cmd_verify(args):
    if args.steps < 4:
        raise UsageError(f"--steps must be >= 4, got {args.steps}")
    if not 0 < args.hbar_min < args.hbar_max:
        raise UsageError("need 0 < --hbar-min < --hbar-max")
    g, v, wells, inputs = _load_graph(args.graph)
    grid = np.geomspace(args.hbar_max, args.hbar_min, args.steps).tolist()
    K = args.max_path_len if args.max_path_len is not None else tn.default_truncation(wells.S0)
    inputs.update(hbar_min=args.hbar_min, hbar_max=args.hbar_max, steps=args.steps, hbar_grid=grid,
                  max_path_len=K, slope_slack=tn.ORDER_SLACK, exact_floor=EXACT_FLOOR)
    rep = tn.verify_order(g, v, wells, grid, K)
    results = rep.to_dict()
    results["verdict"] = ["PASS" if p else "FAIL" for p in rep.passed]
    table = [["hbar", "index", "interaction_eigenvalue", "exact_eigenvalue", "error"]]
    for h, a, b, e in zip(rep.hbars, rep.approx, rep.exact, rep.errors):
        table += [[h, k, a[k], b[k], e[k]] for k in range(len(e))]
    slopes = ", ".join("exact" if f.exact else f"{f.slope:.3f}" for f in rep.fits)
    summary = f"order check (threshold {rep.threshold}): slopes [{slopes}] -> " + \
        ("PASS" if rep.all_passed else "FAIL")
    return _report("verify", inputs, results, rep.warnings, table), summary, rep.all_passed


def _parse_temps(text):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        try:
            out.append(float(Fraction(tok)))
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"bad temperature {tok!r}") from None
    return out


def cmd_anneal(args):
    obj, digest = read_input(args.landscape)
    land = landscape_from_dict(obj, args.landscape)
    temps = _parse_temps(args.temps)
    inputs = {"file": str(args.landscape), "sha256": digest, "temps": temps,
              "eps_convention": "eps = exp(-1/(2T))", "gap_collision_tol": an.GAP_COLLISION_TOL}
    rep = an.gap_order_fit(land, temps)
    checks = []
    for T in temps:
        lam = an.build_generator(land, T)
        conj = an.conjugated_operator(land, T)
        H = conj.H_formula
        f = an.ground_vector(land, T)
        checks.append({
            "T": T,
            "max_abs_row_sum": max(abs(s) for s in an.row_sums(lam)),
            "stationarity_residual": an.check_stationarity(land, T),
            "generator_norm": float(np.linalg.norm(lam)),
            "conjugation_max_rel_diff": conj.max_rel_diff,
            "ground_vector_residual": float(np.max(np.abs(H @ f))),
        })
    results = rep.to_dict()
    results["local_minima"] = list(land.local_minima())
    results["identities"] = checks
    table = [["T", "eps", "gap"]] + [[T, e, gp] for T, e, gp in zip(rep.temperatures, rep.eps, rep.gaps)]
    summary = (f"gap ~ eps^{rep.fitted_exponent:.3f} (eps=exp(-1/2T)), even exponent "
               f"{rep.rounded_even_exponent}, fit residual {rep.fit_residual:.3f}")
    return _report("anneal", inputs, results, table=table), summary


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="graphtunnel",
        description="Tunneling spectra of Schrodinger operators on finite graphs.",
        epilog=f"Report schema {REPORT_FORMAT}. Set {DIGITS_ENV} to round floats in reports. "
               "Exit codes: 0 ok, 1 verification FAIL, 2 invalid input, 3 numerical failure.",
    )
    p.add_argument("--format", choices=["json", "csv"], default="json",
                   help="output format for stdout (default: json)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("wells", help="wells, S0 and pairwise well distances")
    s.add_argument("graph")
    s.set_defaults(func=cmd_wells)

    s = sub.add_parser("spectrum", help="full or Dirichlet spectrum of H")
    s.add_argument("graph")
    s.add_argument("--hbar", type=float, required=True)
    s.add_argument("--dirichlet-well", default=None, help="restrict to functions vanishing on the other wells")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("mu", help="well eigenvalue mu_j from the implicit loop equation")
    s.add_argument("graph")
    s.add_argument("--well", required=True)
    s.add_argument("--hbar", type=float, required=True)
    s.add_argument("--max-path-len", type=int, default=None,
                   help="truncation length K (default: 2*S0+6, or 8 without S0)")
    s.set_defaults(func=cmd_mu)

    s = sub.add_parser("interaction", help="interaction matrix and comparison with the exact spectrum")
    s.add_argument("graph")
    s.add_argument("--hbar", type=float, required=True)
    s.add_argument("--mode", choices=["leading", "appendixA"], default="leading",
                   help="leading-order path formula or quasimode construction (default: leading)")
    s.add_argument("--max-path-len", type=int, default=None,
                   help="truncation length K (default: 2*S0+6, or 8 without S0)")
    s.set_defaults(func=cmd_interaction)

    s = sub.add_parser("verify", help="fit the error order of the leading interaction matrix")
    s.add_argument("graph")
    s.add_argument("--hbar-min", type=float, default=0.025, help="default: 0.025")
    s.add_argument("--hbar-max", type=float, default=0.2, help="default: 0.2")
    s.add_argument("--steps", type=int, default=4, help="number of geometric grid points, >= 4 (default: 4)")
    s.add_argument("--max-path-len", type=int, default=None,
                   help="truncation length K (default: 2*S0+6, or 8 without S0)")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("anneal", help="spectral gap order of the annealing generator")
    s.add_argument("landscape")
    s.add_argument("--temps", default=DEFAULT_TEMPS,
                   help=f"comma-separated decreasing temperatures, fractions allowed (default: {DEFAULT_TEMPS})")
    s.set_defaults(func=cmd_anneal)
    return p


def _write_csv(table, out):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in table:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    out.write(buf.getvalue())


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK

    passed = True
    try:
        out = args.func(args)
        if len(out) == 3:
            (rep, table), summary, passed = out
        else:
            (rep, table), summary = out
        rep["inputs"]["format"] = args.format
        if args.format == "csv":
            _write_csv(table, stdout)
        else:
            stdout.write(dump_report(rep))
    except ValidationError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except NumericalError as exc:
        stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except OSError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    stderr.write(summary + "\n")
    return EXIT_OK if passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
