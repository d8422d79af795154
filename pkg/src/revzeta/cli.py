"""Command line front end.

    revzeta invariants PROFILE.json
    revzeta special-values PROFILE.json
    revzeta determinant PROFILE.json
    revzeta eigenvalues PROFILE.json [--k-max K --n-max N | --lambda-cut L]
    revzeta heat PROFILE.json [--lambda-cut L --t-min T0 --t-max T1]
    revzeta verify [PROFILE.json] [--only 1,3,10]

Every command writes one JSON document (stdout or ``--out``).  Exit status:
0 success, 1 a verify check failed, 2 malformed input, 3 numerical failure.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import errors
from .heatkernel import (fit_coefficients, geometric_coefficients, heat_trace,
                         dictionary_residuals)
from .profile import QuadratureSpec, geometric_invariants, load_profile
from .sturm import mode_table, spectrum_below
from .verify import CRITERIA, run_acceptance
from .zeta import determinant, full_special_values

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

INPUT_ERRORS = (errors.ProfileError, errors.DomainError, errors.CoverageError, errors.FitError,
                OSError, json.JSONDecodeError, KeyError, TypeError)
NUMERICAL_ERRORS = (errors.QuadratureError, errors.IntegrationError, errors.BracketError,
                    errors.ConsistencyError)


def dumps(obj, indent=2, _level=0):
    """JSON with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        text = format(x + 0.0, ".17g")
        return text if any(ch in text for ch in ".en") else text + ".0"
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def _quad(args):
    return QuadratureSpec(rel_tol=args.rel_tol)


def cmd_invariants(args):
    prof = load_profile(args.profile)
    return {"profile": prof.to_json(), "profile_hash": prof.digest,
            "invariants": geometric_invariants(prof, _quad(args)).to_json()}


def cmd_special_values(args):
    prof = load_profile(args.profile)
    quad = _quad(args)
    out = full_special_values(prof, quad).to_json()
    out["heat_kernel"] = {"coefficients": geometric_coefficients(prof, quad).to_json(),
                          "dictionary_residuals": dictionary_residuals(prof, quad)}
    return out


def cmd_determinant(args):
    return determinant(load_profile(args.profile), _quad(args)).to_json()


def cmd_eigenvalues(args):
    prof = load_profile(args.profile)
    if args.lambda_cut is not None:
        table = spectrum_below(prof, args.lambda_cut, args.bisect_tol)
    else:
        table = mode_table(prof, args.k_max, args.n_max, args.bisect_tol)
    return table.to_json()


def cmd_heat(args):
    prof = load_profile(args.profile)
    quad = _quad(args)
    if not args.t_min < args.t_max:
        raise errors.DomainError(f"need t-min < t-max, got {args.t_min}, {args.t_max}")
    geo = geometric_coefficients(prof, quad)
    table = spectrum_below(prof, args.lambda_cut, args.bisect_tol)
    trace = heat_trace(table, np.geomspace(args.t_min, args.t_max, args.points), geo.C_minus1)
    return {"trace": trace.to_json(), "geometric": geo.to_json(),
            "fitted": fit_coefficients(trace).to_json(), "eigenvalues": len(table),
            "lambda_cut": args.lambda_cut}


def cmd_verify(args):
    prof = load_profile(args.profile) if args.profile else None
    results = run_acceptance(args.only, prof)
    for r in results:
        print(r.line(), file=sys.stderr)
    return {"passed": all(r.passed for r in results), "checks": [r.to_json() for r in results]}


def _criteria_list(text):
    try:
        nums = sorted({int(t) for t in text.split(",") if t.strip()})
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated criterion numbers, got {text!r}")
    bad = [n for n in nums if n not in CRITERIA]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown criteria {bad}; valid 1..{max(CRITERIA)}")
    return nums


def _positive(kind):
    def parse(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return parse


def build_parser():
    parser = argparse.ArgumentParser(
        prog="revzeta",
        description="Spectral zeta function of the Dirichlet Laplacian on a surface of revolution.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, profile_required=True):
        if profile_required:
            p.add_argument("profile", help="profile JSON: {shape, params, a, b}")
        else:
            p.add_argument("profile", nargs="?", help="optional profile JSON for the generic checks")
        p.add_argument("--rel-tol", type=_positive(float), default=1e-12,
                       help="quadrature relative tolerance (default 1e-12)")
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        return p

    common(sub.add_parser("invariants", help="geometric invariants of the profile"))
    common(sub.add_parser("special-values", help="residues and values at s = 1, 1/2, 0, -1/2"))
    common(sub.add_parser("determinant", help="zeta'(0) and the regularized determinant"))
    p = common(sub.add_parser("eigenvalues", help="eigenvalue table"))
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--n-max", type=_positive(int), default=10)
    p.add_argument("--lambda-cut", type=_positive(float), default=None,
                   help="all eigenvalues below this value (overrides --k-max/--n-max)")
    p.add_argument("--bisect-tol", type=_positive(float), default=1e-10)
    p = common(sub.add_parser("heat", help="heat trace and fitted coefficients"))
    p.add_argument("--lambda-cut", type=_positive(float), default=4000.0)
    p.add_argument("--t-min", type=_positive(float), default=0.02)
    p.add_argument("--t-max", type=_positive(float), default=0.2)
    p.add_argument("--points", type=int, default=30)
    p.add_argument("--bisect-tol", type=_positive(float), default=1e-10)
    p = common(sub.add_parser("verify", help="run the acceptance checks"), profile_required=False)
    p.add_argument("--only", type=_criteria_list, default=None,
                   help="comma-separated criterion numbers (default: all)")
    return parser


COMMANDS = {
    "invariants": cmd_invariants,
    "special-values": cmd_special_values,
    "determinant": cmd_determinant,
    "eigenvalues": cmd_eigenvalues,
    "heat": cmd_heat,
    "verify": cmd_verify,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "k_max", 0) < 0:
        print("revzeta: --k-max must be >= 0", file=sys.stderr)
        return EXIT_INPUT
    try:
        report = COMMANDS[args.command](args)
        text = dumps(report) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except NUMERICAL_ERRORS as exc:
        print(f"revzeta {args.command}: numerical failure: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_NUMERICAL
    except INPUT_ERRORS as exc:
        print(f"revzeta {args.command}: invalid input: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.command == "verify" and not report["passed"]:
        return EXIT_CHECK_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
