"""Command-line entry point: ``python -m hardybounds <command> ...``.

Exit status is 0 on success, 1 when a validation or certificate check
fails, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .errors import ConditioningError, DomainError, SandwichViolation, ValidationError
from .pointsets import FAMILIES, generate_sample, load_sample, save_sample, write_json_atomic
from .search import MODES, ExtremalProblem, brute_force_g, search_g
from .solver import certificate_to_dict, solve_dp_over_disk
from .study import (
    build_report,
    fit_scaling,
    load_report,
    parse_grid,
    rows_from_report,
    run_sandwich_study,
    save_report,
    verify_report,
    write_csv,
)

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


def _grid(text):
    try:
        return parse_grid(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _param(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    try:
        return key, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"value of {key!r} must be a number") from None


def _emit(data, out):
    if out:
        write_json_atomic(out, data)
    else:
        json.dump(data, sys.stdout, indent=1, allow_nan=False)
        sys.stdout.write("\n")


def _problem(args) -> ExtremalProblem:
    if args.problem:
        with open(args.problem) as fh:
            record = json.load(fh)
        try:
            sample = load_sample(record["sample_path"])
            return ExtremalProblem(sample, float(record["epsilon"]), float(record["R"]),
                                   float(record.get("p", 2.0)), record.get("mode", "weighted"))
        except KeyError as exc:
            raise ValidationError(f"problem file lacks field {exc}") from None
    if args.sample is None or args.epsilon is None:
        raise _Usage("--sample and --epsilon are required unless --problem is given")
    return ExtremalProblem(load_sample(args.sample), args.epsilon, args.R, 2.0, args.mode)


class _Usage(Exception):
    pass


def _bound_record(bound):
    return {
        "value": bound.value,
        "kind": bound.kind,
        "infeasible": bound.infeasible,
        "certificate_zeros": [] if bound.certificate is None
        else [[z.real, z.imag] for z in bound.certificate],
        "sample_indices": list(bound.sample_indices or ()),
        "argmax_point": None if bound.argmax_point is None
        else [bound.argmax_point.real, bound.argmax_point.imag],
        "residuals": {k: (None if math.isinf(v) else v) for k, v in bound.residuals.items()},
        "scope": bound.scope,
    }


def cmd_gen_set(args):
    sample = generate_sample(args.family, args.count, dict(args.param or []), args.seed)
    if args.out:
        save_sample(args.out, sample)
    else:
        from .pointsets import sample_to_dict
        _emit(sample_to_dict(sample), None)
    return EXIT_OK


def cmd_search_g(args):
    prob = _problem(args)
    bound = search_g(prob, budget=args.budget, seed=args.seed)
    record = _bound_record(bound)
    if args.brute:
        exact = brute_force_g(prob)
        record["oracle"] = _bound_record(exact)
    _emit(record, args.out)
    return EXIT_OK


def cmd_solve_dp(args):
    prob = _problem(args)
    result = solve_dp_over_disk(prob, angular_nodes=args.nodes)
    _emit(certificate_to_dict(result), args.out)
    return EXIT_OK


def _print_failures(failures):
    for rec in failures:
        print(json.dumps(rec, indent=1), file=sys.stderr)


def cmd_verify_sandwich(args):
    if args.report:
        failures = verify_report(load_report(args.report))
        if failures:
            print(f"{len(failures)} row(s) failed verification", file=sys.stderr)
            _print_failures(failures)
            return EXIT_INVALID
        print(f"{args.report}: all rows verify")
        return EXIT_OK
    if args.sample is None:
        raise _Usage("--sample is required unless --report is given")
    sample = load_sample(args.sample)
    try:
        rows = run_sandwich_study(sample, args.R, args.epsilon_grid, budget=args.budget,
                                  seed=args.seed, mode=args.mode, angular_nodes=args.nodes)
    except SandwichViolation as exc:
        print(str(exc), file=sys.stderr)
        print(json.dumps(exc.forensics, indent=1), file=sys.stderr)
        return EXIT_INVALID
    report = build_report(sample, args.R, rows, mode=args.mode, budget=args.budget,
                          seed=args.seed, angular_nodes=args.nodes)
    failures = verify_report(report)
    if args.out:
        save_report(args.out, report)
    else:
        _emit(report, None)
    if args.csv:
        write_csv(args.csv, rows)
    if failures:
        _print_failures(failures)
        return EXIT_INVALID
    return EXIT_OK


def cmd_fit_scaling(args):
    rows = rows_from_report(load_report(args.report))
    fit = fit_scaling(rows)
    _emit({"alpha_hat": fit.alpha_hat, "intercept": fit.intercept,
           "r_squared": fit.r_squared, "rows_used": fit.rows_used}, args.out)
    return EXIT_OK


def cmd_selftest(args):
    from .selftest import run_selftest

    ok = run_selftest(verbose=True)
    return EXIT_OK if ok else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hardybounds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def common(p, problem=True):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="output JSON path (stdout if omitted)")
        if problem:
            p.add_argument("--sample", help="sample JSON file")
            p.add_argument("--R", type=float, default=0.5)
            p.add_argument("--mode", choices=MODES, default="weighted")

    p = sub.add_parser("gen-set", help="generate a point sample")
    p.add_argument("--family", choices=[f for f in FAMILIES if f != "explicit"], required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--param", type=_param, action="append", help="family parameter KEY=VALUE")
    common(p, problem=False)
    p.set_defaults(func=cmd_gen_set)

    p = sub.add_parser("search-g", help="certified lower bound for g on a sample")
    common(p)
    p.add_argument("--problem", help="problem JSON {sample_path, epsilon, R, p, mode}")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--budget", type=int, default=200)
    p.add_argument("--brute", action="store_true", help="also run the exact enumeration")
    p.set_defaults(func=cmd_search_g)

    p = sub.add_parser("solve-dp", help="D_2 on a sample via the kernel solver")
    common(p)
    p.add_argument("--problem", help="problem JSON {sample_path, epsilon, R, p, mode}")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--nodes", type=int, default=256, help="angular grid size")
    p.set_defaults(func=cmd_solve_dp)

    p = sub.add_parser("verify-sandwich", help="run or re-verify a sandwich study")
    common(p)
    p.add_argument("--epsilon-grid", type=_grid, default=parse_grid("0.5:0.5:12"),
                   help="start:factor:count (default 0.5:0.5:12)")
    p.add_argument("--budget", type=int, default=200)
    p.add_argument("--nodes", type=int, default=256, help="angular grid size")
    p.add_argument("--csv", help="flat CSV export of the rows")
    p.add_argument("--report", help="re-verify this report instead of running a study")
    p.set_defaults(func=cmd_verify_sandwich)

    p = sub.add_parser("fit-scaling", help="fit log D_2 against log g from a report")
    p.add_argument("--report", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit_scaling)

    p = sub.add_parser("selftest", help="closed-form and oracle checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"hardybounds {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, DomainError, ConditioningError, SandwichViolation, ValueError) as exc:
        print(f"hardybounds {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"hardybounds {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
