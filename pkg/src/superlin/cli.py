"""
Command-line interface.

Exit status: 0 on success, 1 when the input fails validation or a
construction's precondition, 2 on usage or parse errors.
"""
import argparse
import json
import sys

import numpy as np

from . import io
from .embedding import (InvalidEmbeddingError, classify, induced_control_system,
                        require_valid, validate)
from .linalg import DEFAULT_TOL
from .transform import (PreconditionError, conjugate, prune_unobservable,
                        realize_minimal_visible, shift, to_reduced_visible_form)
from .verify import (ControlSignal, InstanceSpec, cosimulate, generate_instance,
                     integrate_linear, integrate_nonlinear, write_trajectory_csv)


class UsageError(Exception):
    pass


def parse_control(spec):
    """Parse ``const:<v>`` or ``pwc:t0,v0;t1,v1;...``."""
    kind, _, body = spec.partition(":")
    try:
        if kind == "const":
            return ControlSignal.constant(float(body))
        if kind == "pwc":
            pairs = [item.split(",") for item in body.split(";") if item.strip()]
            if not pairs or any(len(pair) != 2 for pair in pairs):
                raise ValueError("expected t,v pairs")
            ts, vs = zip(*[(float(t), float(v)) for t, v in pairs])
            return ControlSignal(ts, vs)
    except ValueError as e:
        raise UsageError(f"--u: {e}") from None
    raise UsageError(f"--u: unknown control kind {kind!r} (use const: or pwc:)")


def _floats_csv(text, name):
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise UsageError(f"{name}: expected comma-separated numbers") from None


def _load_json(path, name):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise UsageError(f"{name}: {e}") from None
    except json.JSONDecodeError as e:
        raise io.DocumentError(f"{path}: malformed JSON at line {e.lineno}: {e.msg}") from None


def _load(path):
    try:
        return io.load_system(path)
    except OSError as e:
        raise UsageError(str(e)) from None


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_validate(args):
    rep = validate(_load(args.file), args.poly_tol, rank_tol=args.tol)
    sys.stdout.write(io.emit_report(rep))
    if not rep.passed:
        failed = ", ".join(c.name for c in rep.checks if not c.passed)
        print(f"validation failed: {failed}", file=sys.stderr)
        return 1
    return 0


def cmd_classify(args):
    sys.stdout.write(io.emit_report(classify(_load(args.file), args.tol)))
    return 0


def cmd_reduce(args):
    red, rep = to_reduced_visible_form(_load(args.file), args.tol, args.poly_tol)
    _write(args.out, io.emit_system(red))
    _write(args.report, io.emit_report(rep))
    return 0


def cmd_min_visible(args):
    _, rep = to_reduced_visible_form(_load(args.file), args.tol, args.poly_tol)
    print(rep.m_v_star)
    return 0


def cmd_realize_min(args):
    out = realize_minimal_visible(_load(args.file), args.tol, args.poly_tol)
    _write(args.out, io.emit_system(out))
    return 0


def cmd_prune(args):
    L = _load(args.file)
    require_valid(L, args.poly_tol, rank_tol=args.tol)
    _write(args.out, io.emit_system(prune_unobservable(L, args.tol)))
    return 0


def cmd_transform(args):
    L = _load(args.file)
    if args.conjugate:
        doc = _load_json(args.conjugate, "--conjugate")
        try:
            out = conjugate(L, np.array(doc["P"], dtype=float), args.tol)
        except (KeyError, ValueError, TypeError, np.linalg.LinAlgError) as e:
            raise io.DocumentError(f"P: {e}") from None
    else:
        doc = _load_json(args.shift, "--shift")
        try:
            out = shift(L, np.array(doc["R"], dtype=float), np.array(doc["S"], dtype=float))
        except (KeyError, ValueError, TypeError) as e:
            raise io.DocumentError(f"R/S: {e}") from None
    _write(args.out, io.emit_system(out))
    return 0


def cmd_simulate(args):
    L = _load(args.file)
    x0 = _floats_csv(args.x0, "--x0")
    if x0.shape != (L.n,):
        raise UsageError(f"--x0: expected {L.n} values")
    u = parse_control(args.u)
    if not (args.T > 0 and 0 < args.h <= args.T):
        raise UsageError("--T and --h: need T > 0 and 0 < h <= T")
    rep = cosimulate(L, x0, u, args.T, args.h)
    if args.traj:
        tx = integrate_nonlinear(induced_control_system(L), x0, u, args.T, args.h)
        tz = integrate_linear(L, x0, u, args.T, args.h)
        with open(args.traj, "w", encoding="utf-8", newline="") as fh:
            write_trajectory_csv(fh, tx, tz)
    sys.stdout.write(io.emit_report(rep))
    return 0


def cmd_gen(args):
    spec = InstanceSpec(args.nx, args.ny, args.m, args.deg, args.rank, args.scramble)
    try:
        inst = generate_instance(spec, args.seed)
    except ValueError as e:
        raise UsageError(f"gen: {e}") from None
    _write(args.out, io.emit_system(inst.L))
    if args.out not in (None, "-"):
        print(json.dumps({"seed": inst.seed, "true_m_v_star": inst.true_m_v_star}))
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                        help=f"relative rank tolerance (default {DEFAULT_TOL:g})")
    common.add_argument("--poly-tol", type=float, default=argparse.SUPPRESS,
                        help=f"polynomial identity tolerance (default {DEFAULT_TOL:g})")

    parser = argparse.ArgumentParser(
        prog="superlin", parents=[common],
        description="Validate, transform and reduce super-linearizations of polynomial systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, "check a system document").add_argument("file")
    add("classify", cmd_classify, "list visible and hidden observables").add_argument("file")

    p = add("reduce", cmd_reduce, "bring to reduced visible form")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    p.add_argument("--report")

    add("min-visible", cmd_min_visible,
        "print the least number of visible observables").add_argument("file")

    p = add("realize-min", cmd_realize_min, "realize the least visible count")
    p.add_argument("file")
    p.add_argument("--out", required=True)

    p = add("prune", cmd_prune, "drop unobservable observables")
    p.add_argument("file")
    p.add_argument("--out", required=True)

    p = add("transform", cmd_transform, "apply a change of observables")
    p.add_argument("file")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--conjugate", metavar="PFILE", help='JSON file {"P": [[...]]}')
    g.add_argument("--shift", metavar="RSFILE", help='JSON file {"R": [[...]], "S": [...]}')
    p.add_argument("--out", required=True)

    p = add("simulate", cmd_simulate, "co-simulate the system and its lifting")
    p.add_argument("file")
    p.add_argument("--x0", required=True, help="comma-separated initial state")
    p.add_argument("--u", default="const:0", help="const:<v> or pwc:t0,v0;t1,v1;...")
    p.add_argument("--T", type=float, default=2.0)
    p.add_argument("--h", type=float, default=1e-3)
    p.add_argument("--traj", help="CSV output for both trajectories")

    p = add("gen", cmd_gen, "generate a random valid instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--nx", type=int, required=True)
    p.add_argument("--ny", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--deg", type=int, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--scramble", action="store_true")
    p.add_argument("--out", required=True)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    args.tol = getattr(args, "tol", DEFAULT_TOL)
    args.poly_tol = getattr(args, "poly_tol", DEFAULT_TOL)
    if args.tol <= 0 or args.poly_tol < 0:
        parser.error("tolerances must be positive")
    try:
        return args.func(args)
    except (InvalidEmbeddingError, PreconditionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (io.DocumentError, UsageError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
