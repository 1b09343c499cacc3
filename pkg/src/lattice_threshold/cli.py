"""Command-line front end.

Exit codes: 0 ok, 1 usage, 2 domain error, 3 convergence failure,
4 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .asymptotics import (expansion_variables, regime, scan_coupling, scan_momentum,
                          verify_theorem_1, verify_theorem_2)
from .dispersion import as_quasimomentum, pi_class, spectral_window
from .eigensolver import DEFAULT_TOL, solve
from .errors import ConvergenceError, DomainError, NoBoundState
from .green import nu, nu_edge
from .lattice_oracle import extrapolated_eigenvalue, nu_tensor, watson_w3

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_CONVERGENCE, EXIT_VERIFY = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _real_list(text: str) -> list:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}")
    if not all(math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError("components must be finite")
    return values


def _format_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def render(records: list, fmt: str) -> str:
    """Serialize a list of flat dicts as CSV (header row, LF endings) or a JSON array."""
    if fmt == "json":
        return json.dumps(records, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if records:
        columns = list(records[0])
        writer.writerow(columns)
        for rec in records:
            writer.writerow([_format_cell(rec.get(c)) for c in columns])
    return buf.getvalue()


def _momentum(args):
    d = args.dim
    k = args.k if args.k is not None else [0.0] * d
    if len(k) != d:
        raise UsageError(f"--k has {len(k)} components but --dim is {d}")
    return as_quasimomentum(k)


def cmd_spectrum(args):
    K = _momentum(args)
    w = spectral_window(K)
    return [{"e_min": w.e_min, "e_max": w.e_max, "pi_class": pi_class(K), "d_eff": K.d_eff}], EXIT_OK


def cmd_threshold(args):
    K = _momentum(args)
    value, err = nu_edge(K, full_output=True)
    return [{"nu_edge": value, "mu0": 1.0 / value, "rel_err": err}], EXIT_OK


def cmd_nu(args):
    K = _momentum(args)
    if args.s is None:
        raise UsageError("nu needs --s")
    value, err = nu(K, args.s, full_output=True)
    return [{"s": args.s, "nu": value, "rel_err": err}], EXIT_OK


def cmd_eigenvalue(args):
    K = _momentum(args)
    if args.mu is None:
        raise UsageError("eigenvalue needs --mu")
    try:
        b = solve(args.mu, K, tol=args.tol)
    except NoBoundState as exc:
        return [{"bound": False, "mu": exc.mu, "mu0": exc.mu0}], EXIT_OK
    return [{"bound": True, "mu": b.mu, "z": b.z, "s": b.s, "residual": b.residual,
             "iterations": b.iterations, "bracket_lo": b.bracket[0], "bracket_hi": b.bracket[1]}], EXIT_OK


def default_s_window(d: int) -> tuple:
    return (1e-12, 1e-4) if d == 3 else (1e-8, 1e-2)


def cmd_scan(args):
    d = args.dim
    if args.axis == "coupling":
        K = _momentum(args)
        lo, hi = default_s_window(K.d_eff)
        lo = args.s_min if args.s_min is not None else lo
        hi = args.s_max if args.s_max is not None else hi
        points = args.points or 17
        if not 0 < lo < hi or points < 2:
            raise UsageError("need 0 < s-min < s-max and at least two points")
        records = []
        for lam, s in scan_coupling(K, np.logspace(math.log10(lo), math.log10(hi), points)):
            v = expansion_variables(lam, K.d_eff) if regime(K.d_eff) != "d4" or lam < math.exp(-1) else None
            records.append({"s": s, "lambda": lam, "sigma": v and v.sigma, "tau": v and v.tau,
                            "omega": v and v.omega})
        return records, EXIT_OK
    kmax = args.kmax if args.kmax is not None else 0.25
    points = args.points or 9
    if not kmax > 0 or points < 1:
        raise UsageError("need kmax > 0 and at least one point")
    norms = [kmax * 2.0 ** -i for i in range(points)]
    rows = scan_momentum(d, args.direction, norms)
    return [{"k_norm": r, "z_minus_emax0": z} for r, _, z in reversed(rows)], EXIT_OK


def cmd_verify(args):
    if args.dim not in (3, 4, 5, 6):
        raise UsageError("verify supports --dim 3, 4, 5 or 6")
    K = _momentum(args)
    reports = [verify_theorem_1(K, coarse=args.coarse),
               verify_theorem_2(args.dim, args.direction, coarse=args.coarse)]
    records = []
    for rep in reports:
        for c in rep.checks:
            records.append({"report": rep.title, "check": c.name, "measured": c.measured,
                            "predicted": c.predicted, "deviation": c.deviation,
                            "tolerance": c.tolerance, "passed": c.passed})
    return records, EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY


def cmd_oracle(args):
    K = _momentum(args)
    grid = args.grid
    records = []
    if args.mu is not None:
        z, est = extrapolated_eigenvalue(args.mu, K, (grid, 2 * grid, 4 * grid))
        ref = solve(args.mu, K, tol=args.tol).z
        e_max = spectral_window(K).e_max
        records.append({"quantity": "s", "oracle": z - e_max, "evaluator": ref - e_max,
                        "rel_diff": abs((z - ref) / (ref - e_max)), "oracle_err": est})
    if args.s is not None:
        value, est = nu_tensor(K, args.s, N=grid)
        ref = nu(K, args.s)
        records.append({"quantity": "nu", "oracle": value, "evaluator": ref,
                        "rel_diff": abs(value / ref - 1.0), "oracle_err": est})
    if not records:
        if K.d != 3 or any(K.components):
            raise UsageError("oracle needs --s or --mu (the bare form is d=3, K=0 only)")
        w3 = watson_w3()
        ref = nu_edge(K)
        value = 0.5 * (2.0 * math.pi) ** 3 * w3
        records.append({"quantity": "nu_edge", "oracle": value, "evaluator": ref,
                        "rel_diff": abs(value / ref - 1.0), "oracle_err": None})
    return records, EXIT_OK


COMMANDS = {
    "spectrum": (cmd_spectrum, "spectral window and pi class of K"),
    "threshold": (cmd_threshold, "edge value nu(K) and threshold mu0(K)"),
    "nu": (cmd_nu, "nu(K, E_max + s)"),
    "eigenvalue": (cmd_eigenvalue, "bound state above the band"),
    "scan": (cmd_scan, "coupling or momentum scan table"),
    "verify": (cmd_verify, "check the leading asymptotic laws"),
    "oracle": (cmd_oracle, "compare against brute-force finite-lattice oracles"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--dim", type=int, required=True, help="lattice dimension d")
    common.add_argument("--k", type=_real_list, help="quasimomentum components (default 0)")
    common.add_argument("--direction", type=_real_list, help="momentum-scan direction")
    common.add_argument("--mu", type=float, help="coupling")
    common.add_argument("--s", type=float, help="distance above the band edge")
    common.add_argument("--s-min", type=float)
    common.add_argument("--s-max", type=float)
    common.add_argument("--points", type=int)
    common.add_argument("--kmax", type=float, help="largest |K| in a momentum scan")
    common.add_argument("--grid", type=int, default=32, help="oracle grid size per axis")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="determinant tolerance")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="write output to this path")
    common.add_argument("--coarse", action="store_true", help="reduced verification grids")

    parser = _Parser(prog="lattice-threshold", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "scan":
            p.add_argument("--axis", choices=("coupling", "momentum"), default="coupling")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = COMMANDS[args.command][0]
    try:
        records, code = handler(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except NoBoundState as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (DomainError, ValueError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    text = render(records, args.format)
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
