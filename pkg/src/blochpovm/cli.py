"""Command-line entry point.

Exit status is 0 on success, 1 when a validation or construction check
fails and 2 on usage errors or malformed input files.
"""

import argparse
import csv
import io
import os
import sys
from functools import lru_cache

import numpy as np

from . import SCHEMA_VERSION, __version__
from . import serialization as ser
from .bloch import TOL_PSD, NotAStateError, check_density_matrix, projector, random_pure_state, bloch_from_density
from .frames import FrameError, Orientation, canonical_frame, rotate_frame, validate_frame
from .povm import PovmError, PositivityError, build_symmetric_povm, classify, validate_povm
from .search import SearchConfig, certify, optimize_orientation
from .statistics import (
    InformationIncompleteError,
    clamp_probabilities,
    check_probabilities,
    outcome_probabilities,
    projection_residuals,
    reconstruct_state,
    sample_outcomes,
    simplex_points,
    tomography_error,
)
from .su_basis import generate_su_basis, structure_constants, verify_basis_relations

PROJECTION_TOL = 1e-10


class ValidationFailure(Exception):
    """A check failed; maps to exit status 1."""


class UsageError(Exception):
    """Bad flag values or input files; maps to exit status 2."""


@lru_cache(maxsize=None)
def _basis(d):
    return generate_su_basis(d)


def _rng(seed):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        tmp = f"{out}.tmp-{os.getpid()}"
        with open(tmp, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, out)


def _positive_int(name, value, lo=1):
    if value < lo:
        raise UsageError(f"--{name} must be >= {lo}, got {value}")


def _load_state(path, tol_psd):
    rho = ser.state_from_json(ser.load_json(path), _basis, where=path)
    try:
        return check_density_matrix(rho, tol_psd=tol_psd)
    except NotAStateError as exc:
        raise ValidationFailure(f"{path}: {exc}") from None


def _load_povm(path):
    return ser.povm_from_json(ser.load_json(path), _basis, where=path)


def _seeded_frame(d, n, seed):
    return rotate_frame(canonical_frame(d, n), Orientation.random(d, _rng(seed)))


# -- subcommands -----------------------------------------------------------


def cmd_basis(args):
    _positive_int("dim", args.dim, 2)
    basis = _basis(args.dim)
    sc = structure_constants(basis) if args.constants else None
    if sc is not None:
        report = verify_basis_relations(basis, sc, args.tol)
        if not report.passed:
            raise ValidationFailure(f"basis relations fail: {report}")
    _emit(ser.dumps(ser.basis_to_json(basis, sc)), args.out)


def cmd_frame(args):
    if args.seed is None:
        raise UsageError("frame generation requires --seed")
    try:
        frame = _seeded_frame(args.dim, args.outcomes, args.seed)
    except FrameError as exc:
        raise UsageError(str(exc)) from None
    _emit(ser.dumps(ser.frame_to_json(frame)), args.out)


def cmd_povm_build(args):
    d, n = args.dim, args.outcomes
    _positive_int("dim", d, 2)
    if (args.frame is None) == (args.seed is None):
        raise UsageError("povm build needs exactly one of --frame FILE or --seed S")
    try:
        if args.frame is not None:
            frame = ser.frame_from_json(ser.load_json(args.frame), where=args.frame)
        else:
            frame = _seeded_frame(d, n, args.seed)
    except FrameError as exc:
        raise UsageError(str(exc)) from None
    try:
        povm = build_symmetric_povm(d, n, args.kappa, frame, _basis(d), tol_psd=args.tol_psd)
    except PositivityError as exc:
        spectrum = ", ".join(f"{x:.6g}" for x in exc.spectrum)
        raise ValidationFailure(f"{exc}; spectrum of element {exc.index}: [{spectrum}]") from None
    except (PovmError, FrameError) as exc:
        raise ValidationFailure(str(exc)) from None
    _emit(ser.dumps(ser.povm_to_json(povm)), args.out)


def cmd_povm_validate(args):
    povm = _load_povm(args.file)
    report = validate_povm(povm, args.tol)
    frame_report = validate_frame(povm.frame, args.tol)
    labels = sorted(classify(povm, args.tol)) if report.passed else []
    out = {
        "schema_version": SCHEMA_VERSION,
        "kind": "povm_report",
        "passed": bool(report.passed and frame_report.passed),
        "completeness": report.completeness,
        "trace_residual": report.trace_residual,
        "symmetry_residual": report.symmetry_residual,
        "min_eigenvalue": report.min_eigenvalue,
        "worst_element": report.worst_element,
        "min_distance": report.min_distance,
        "near_coincident": [list(p) for p in report.near_coincident],
        "frame_passed": bool(frame_report.passed),
        "classification": labels,
    }
    sys.stdout.write(ser.dumps(out))
    if not out["passed"]:
        raise ValidationFailure(f"{args.file}: POVM fails validation at tol {args.tol}")


def cmd_probs(args):
    rho = _load_state(args.state, args.tol_psd)
    povm = _load_povm(args.povm)
    _check_dims(rho, povm)
    p = outcome_probabilities(rho, povm)
    _emit(ser.dumps(ser.probs_to_json(clamp_probabilities(p))), args.out)


def cmd_reconstruct(args):
    povm = _load_povm(args.povm)
    p = ser.probs_from_json(ser.load_json(args.probs), where=args.probs)
    try:
        p = check_probabilities(p, povm.count)
        rec = reconstruct_state(p, povm)
    except InformationIncompleteError as exc:
        raise ValidationFailure(str(exc)) from None
    except ValueError as exc:
        raise UsageError(f"{args.probs}: {exc}") from None
    out = ser.density_to_json(rec.rho)
    out["min_eigenvalue"] = rec.min_eigenvalue
    out["trace"] = rec.trace
    out["is_state"] = bool(rec.is_state)
    _emit(ser.dumps(out), args.out)


def cmd_sample(args):
    _positive_int("shots", args.shots)
    rho = _load_state(args.state, args.tol_psd)
    povm = _load_povm(args.povm)
    _check_dims(rho, povm)
    counts = sample_outcomes(rho, povm, args.shots, args.seed)
    _emit(ser.dumps(ser.counts_to_json(counts)), args.out)


def cmd_tomo(args):
    _positive_int("shots", args.shots)
    _positive_int("trials", args.trials)
    rho = _load_state(args.state, args.tol_psd)
    povm = _load_povm(args.povm)
    _check_dims(rho, povm)
    try:
        stats = tomography_error(rho, povm, args.shots, args.trials, args.seed, workers=args.workers)
    except InformationIncompleteError as exc:
        raise ValidationFailure(str(exc)) from None
    out = {
        "schema_version": SCHEMA_VERSION,
        "kind": "tomography_stats",
        "dim": povm.dim,
        "count": povm.count,
        "kappa": stats.kappa,
        "shots": stats.shots,
        "trials": stats.trials,
        "seed": args.seed,
        "mean_error": stats.mean_error,
        "std_error": stats.std_error,
        "unphysical_fraction": stats.unphysical_fraction,
        "errors": list(stats.errors),
    }
    _emit(ser.dumps(out), args.out)


def cmd_project(args):
    d, n = args.dim, args.outcomes
    _positive_int("dim", d, 2)
    _positive_int("samples", args.samples)
    if args.purity is not None and not 0.0 <= args.purity <= 1.0:
        raise UsageError("--purity must lie in [0, 1]")
    basis = _basis(d)
    if args.frame is not None:
        frame = ser.frame_from_json(ser.load_json(args.frame), where=args.frame)
        source = args.frame
    else:
        try:
            frame = _seeded_frame(d, n, args.seed)
        except FrameError as exc:
            raise UsageError(str(exc)) from None
        source = f"generated d={d} N={n} seed={args.seed}"
    try:
        povm = build_symmetric_povm(d, n, args.kappa, frame, basis, tol_psd=args.tol_psd)
    except (PovmError, FrameError) as exc:
        raise ValidationFailure(str(exc)) from None
    # state sampling uses a stream independent of the frame stream
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([args.seed, 1])))
    blochs = np.array(
        [bloch_from_density(projector(random_pure_state(d, rng)), basis) for _ in range(args.samples)]
    )
    if args.purity is not None:
        blochs *= args.purity
    _, points = simplex_points(blochs, povm)
    resid = projection_residuals(blochs, povm)
    worst = float(resid.max())
    if worst > PROJECTION_TOL:
        raise ValidationFailure(f"projection identity violated: max residual {worst:.3g}")
    buf = io.StringIO()
    buf.write(f"# frame: {source}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"v{i + 1}" for i in range(points.shape[1])])
    for row in points:
        w.writerow([repr(float(x)) for x in row])
    _emit(buf.getvalue(), args.out)


def cmd_search(args):
    try:
        config = SearchConfig(
            args.dim,
            args.outcomes,
            restarts=args.restarts,
            max_iterations=args.iters,
            master_seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    basis = _basis(args.dim)
    result = optimize_orientation(config, basis, workers=args.workers)
    ok = certify(result, basis, args.margin)
    _emit(ser.dumps(ser.search_result_to_json(result, ok, config)), args.out)
    if args.trace is not None:
        _emit(ser.search_trace_csv(result), args.trace)
    if not ok:
        raise ValidationFailure(f"best frame does not certify at margin {args.margin}")


def _check_dims(rho, povm):
    if rho.shape != (povm.dim, povm.dim):
        raise UsageError(f"state has dimension {rho.shape[0]}, POVM has dimension {povm.dim}")


# -- parser ----------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-psd", type=float, default=TOL_PSD,
                        help="positivity tolerance for eigenvalues (default %(default)g)")
    common.add_argument("--out", help="write the result here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="blochpovm", description="Symmetric POVMs and qudit Bloch-vector geometry."
    )
    parser.add_argument("--version", action="version",
                        version=f"blochpovm {__version__} (schema {SCHEMA_VERSION})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis", parents=[common], help="dump the su(d) generator basis")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--constants", action="store_true", help="include structure constants")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("frame", parents=[common], help="generate a randomly oriented simplex frame")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--outcomes", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_frame)

    povm = sub.add_parser("povm", help="build or validate symmetric POVMs")
    psub = povm.add_subparsers(dest="povm_command", required=True)
    p = psub.add_parser("build", parents=[common])
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--outcomes", type=int, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--frame")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_povm_build)
    p = psub.add_parser("validate", parents=[common])
    p.add_argument("file")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_povm_validate)

    p = sub.add_parser("probs", parents=[common], help="outcome probabilities of a state")
    p.add_argument("--state", required=True)
    p.add_argument("--povm", required=True)
    p.set_defaults(func=cmd_probs)

    p = sub.add_parser("reconstruct", parents=[common], help="linear-inversion state estimate")
    p.add_argument("--probs", required=True)
    p.add_argument("--povm", required=True)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("sample", parents=[common], help="draw outcome counts")
    p.add_argument("--state", required=True)
    p.add_argument("--povm", required=True)
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("tomo", parents=[common], help="finite-shot tomography error study")
    p.add_argument("--state", required=True)
    p.add_argument("--povm", required=True)
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_tomo)

    p = sub.add_parser("project", parents=[common], help="point cloud of quantum probability points")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--outcomes", type=int, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--frame")
    p.add_argument("--purity", type=float, help="scale sampled pure states to this purity index")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("search", parents=[common], help="maximise kappa over frame orientations")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--outcomes", type=int, required=True)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--iters", type=int, default=5000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--margin", type=float, default=1e-6)
    p.add_argument("--trace", help="CSV file for the per-restart incumbent trace")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_search)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except ValidationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ser.SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
