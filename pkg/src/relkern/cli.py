"""
Command-line front end.

Exit codes: 0 success, 2 input error, 3 PSD failure, 4 infeasible fit,
5 verification failure.
"""

import argparse
import sys

import numpy as np

from . import dataio as io
from .core import DimensionError, Tolerance, as_point, as_vector
from .kernels import KernelSpecError, NonHermitianKernelError, build_kernel, check_psd
from .relative import RelativeElement, fit_differences, is_feasible
from .rkhs import SingularSystemError, evaluate_many, fit_values
from .sip_banach import SipSpace, sip_axiom_report
from .sampling import random_kernel
from .verify import corrupt_symmetry, run_verification

EXIT_OK, EXIT_INPUT, EXIT_PSD, EXIT_INFEASIBLE, EXIT_VERIFY = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


def parse_anchor(text):
    """``"x1,...,xd:v1,...,vm"`` -> (point, value)."""
    try:
        left, right = text.split(":")
        x = as_point([float(v) for v in left.split(",")])
        v = as_vector([io.parse_complex(v) for v in right.split(",")])
    except ValueError as exc:
        raise UsageError(f"bad --anchor {text!r}; expected 'x1,...,xd:v1,...,vm'") from exc
    return x, v


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"{args.command} needs --{name.replace('_', '-')}")


def _emit(args, text):
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise io.InputError(f"cannot write {args.out}: {exc.strerror or exc}") from exc
    else:
        sys.stdout.write(text)


def _tol(args):
    return Tolerance(abs_tol=args.abs_tol, rel_tol=args.rel_tol)


def cmd_check_psd(args):
    _require(args, "kernel", "data")
    K = build_kernel(io.read_kernel_spec(args.kernel))
    points = io.read_points_csv(args.data)
    try:
        res = check_psd(K, points, _tol(args))
        report = {"is_psd": res.is_psd, "min_eigenvalue": res.min_eigenvalue, "floor": res.floor}
    except NonHermitianKernelError as exc:
        report = {"is_psd": False, "min_eigenvalue": None, "error": str(exc)}
    report.update(n=int(points.shape[0]), m=K.m)
    _emit(args, io.dumps(report))
    return EXIT_OK if report["is_psd"] else EXIT_PSD


def cmd_fit_values(args):
    _require(args, "kernel", "data")
    K = build_kernel(io.read_kernel_spec(args.kernel))
    points, values = io.read_values_csv(args.data)
    try:
        f = fit_values(K, points, values, ridge=args.ridge, tol=_tol(args))
    except SingularSystemError as exc:
        print(f"relkern: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    _emit(args, io.dumps(io.value_model(f, args.ridge)))
    return EXIT_OK


def cmd_fit_differences(args):
    _require(args, "kernel", "data")
    K = build_kernel(io.read_kernel_spec(args.kernel))
    xs, ys, deltas = io.read_differences_csv(args.data)
    anchor = parse_anchor(args.anchor) if args.anchor else None
    g = fit_differences(K, xs, ys, deltas, ridge=args.ridge, anchor=anchor, tol=_tol(args))
    _emit(args, io.dumps(io.difference_model(g, args.ridge)))
    if not is_feasible(g, deltas, _tol(args)):
        print(
            f"relkern: constraints are inconsistent; least-squares residual {g.info.residual:.6g}",
            file=sys.stderr,
        )
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_eval(args):
    _require(args, "model", "data")
    model = io.load_model(io.read_json(args.model))
    points = io.read_points_csv(args.data)
    if isinstance(model, RelativeElement):
        values = model.evaluate_many(points)
    else:
        values = evaluate_many(model, points)
    report = {"points": points.tolist(), "values": io.vectors_to_json(values)}
    _emit(args, io.dumps(report))
    return EXIT_OK


def cmd_verify(args):
    factory = random_kernel
    if args.inject_fault == "asymmetry":

        def factory(rng, family, m):
            return corrupt_symmetry(random_kernel(rng, family, m))

    report = run_verification(seed=args.seed, trials=args.trials, factory=factory, tol=_tol(args))
    _emit(args, io.dumps(report))
    if not report["passed"]:
        print(f"relkern: verification failed in suite {report['first_failure']}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_sip_check(args):
    space = SipSpace(args.p, args.dim)
    rep = sip_axiom_report(space, trials=args.trials, seed=args.seed, tol=_tol(args))
    report = rep.to_dict()
    ok = (
        rep.positivity_ok
        and rep.cauchy_schwarz_violations == 0
        and max(rep.linearity_defect, rep.conj_homogeneity_defect, rep.compatibility_defect) <= args.abs_tol
        and rep.dual_norm_defect <= args.abs_tol
    )
    report["passed"] = bool(ok)
    _emit(args, io.dumps(report))
    return EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {
    "check-psd": (cmd_check_psd, "verify the block Gram of a kernel is PSD on a point set"),
    "fit-values": (cmd_fit_values, "minimum-norm fit of point values"),
    "fit-differences": (cmd_fit_differences, "minimum-norm fit of pairwise differences"),
    "eval": (cmd_eval, "evaluate a fitted model file at points"),
    "verify": (cmd_verify, "run the randomized identity suites"),
    "sip-check": (cmd_sip_check, "check the l^p semi-inner product axioms"),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kernel", help="kernel spec JSON")
    common.add_argument("--data", help="input CSV")
    common.add_argument("--model", help="fitted model JSON (eval)")
    common.add_argument("--ridge", type=float, default=1e-10)
    common.add_argument("--anchor", help="'x1,...,xd:v1,...,vm' pins the level of a difference fit")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--abs-tol", type=float, default=1e-10)
    common.add_argument("--rel-tol", type=float, default=1e-8)
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--p", type=float, default=2.0, help="exponent for sip-check")
    common.add_argument("--dim", type=int, default=3, help="vector length for sip-check")
    common.add_argument("--inject-fault", choices=["asymmetry"], help=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="relkern", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.trials is None:
        args.trials = 1000 if args.command == "sip-check" else 100
    try:
        if args.ridge < 0:
            raise UsageError("--ridge must be >= 0")
        if args.trials < 1:
            raise UsageError("--trials must be >= 1")
        return COMMANDS[args.command][0](args)
    except (UsageError, io.InputError, KernelSpecError, DimensionError, ValueError) as exc:
        print(f"relkern: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except np.linalg.LinAlgError as exc:
        print(f"relkern: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
