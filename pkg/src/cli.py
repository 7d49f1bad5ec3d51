"""
framekit command line.

Exit codes: 0 success or affirmative verdict, 1 negative verdict,
2 precondition violation, 3 I/O or parse error.
"""
import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from src.batch import BatchExecutor, BatchRequest
from src.config import Settings, load_settings
from src.frames.construct import construct
from src.frames.core import canonicalize, frame_operator, normalize_columns, random_parseval, scale_columns, verify
from src.frames.diagnostics import audit
from src.frames.errors import FrameError, FrameFileError, NotUnitNormError
from src.frames.files import detect_format, parse_vector, read_frame, write_frame
from src.frames.models import CheckStatus, FrameMatrix
from src.frames.scaling import UNIT_NORM_TOL, decide_scalability, oracle_scale

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1

NORMALIZE_TOL = 1e-6


def _format_for(path: str, args: argparse.Namespace, settings: Settings) -> str:
    if args.format:
        return args.format
    try:
        return detect_format(path)
    except FrameFileError:
        return settings.default_format


def _read(path: str, args: argparse.Namespace) -> FrameMatrix:
    return read_frame(path, args.format)


def _write(path: Optional[str], frame: FrameMatrix, args: argparse.Namespace, settings: Settings, **metadata) -> None:
    if path:
        write_frame(path, frame, _format_for(path, args, settings), tolerance=settings.tolerance, **metadata)


def _vector_text(values: np.ndarray) -> str:
    return ", ".join(f"{x:.10g}" for x in values)


def cmd_construct(args: argparse.Namespace, settings: Settings) -> int:
    if args.seed_file:
        try:
            text = Path(args.seed_file).read_text(encoding="utf-8")
        except OSError as e:
            raise FrameFileError(f"Cannot read {args.seed_file}: {e}") from e
        w = parse_vector(text)
    elif args.seed:
        w = parse_vector(args.seed)
    else:
        raise FrameFileError("construct needs --seed or --seed-file")

    if not np.any(w):
        logger.warning("degenerate seed: w = 0, the result is the identity basis plus a zero vector")
    tpf = construct(w, eps_strict=settings.strict_margin)
    frame = tpf.frame
    residual = float(np.max(np.abs(frame_operator(frame) - np.eye(frame.n))))

    print(f"n = {frame.n}, N = {frame.N}")
    print(f"diagonal: {_vector_text(tpf.diagonal)}")
    print(f"det(v_1..v_n) = {float(np.prod(tpf.diagonal)):.17g} (expected {np.sqrt(1.0 - tpf.seed.norm ** 2):.17g})")
    print(f"max |S - I| = {residual:.3e}")
    if args.out:
        _write(args.out, frame, args, settings, name="triangular", seed=w.tolist())
    else:
        for v in frame.vectors:
            print(_vector_text(v))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    frame = _read(args.file, args)
    report = verify(frame, settings.tolerance)
    print(f"A = {report.lower_bound:.10g}")
    print(f"B = {report.upper_bound:.10g}")
    print(f"is_tight = {report.is_tight}")
    print(f"is_parseval = {report.is_parseval}")
    print(f"trace residual = {report.trace_residual:.3e}")
    return EXIT_OK if report.is_parseval else EXIT_NEGATIVE


def _unit_frame(frame: FrameMatrix) -> FrameMatrix:
    lengths = frame.lengths()
    deviation = float(np.max(np.abs(lengths - 1.0)))
    if deviation <= UNIT_NORM_TOL:
        return frame
    if deviation > NORMALIZE_TOL:
        raise NotUnitNormError(f"Columns deviate from unit norm by {deviation:.3g}")
    logger.warning(f"Normalizing columns that deviate from unit norm by {deviation:.3g}")
    unit, _ = normalize_columns(frame)
    return unit


def cmd_scale(args: argparse.Namespace, settings: Settings) -> int:
    frame = _read(args.file, args)
    if frame.N == frame.n + 1:
        frame = _unit_frame(frame)
    verdict = decide_scalability(frame, tol=settings.tolerance)

    print(f"scalable = {verdict.scalable}")
    if verdict.reason:
        print(f"reason = {verdict.reason.value}")
    if verdict.weights is not None:
        print(f"weights: {', '.join(f'{w:.7f}' for w in verdict.weights)}")
    print(f"max identity residual = {verdict.max_identity_residual:.3e}")

    if args.oracle:
        oracle = oracle_scale(
            frame,
            max_iter=settings.oracle_max_iter,
            step_tol=settings.oracle_step_tol,
            threshold=settings.oracle_threshold,
        )
        agree = verdict.scalable == (oracle is not None)
        if agree and oracle is not None:
            agree = float(np.max(np.abs(oracle.weights - np.asarray(verdict.weights)))) <= settings.oracle_tolerance
        print(f"oracle scalable = {oracle is not None}, agreement = {agree}")
        if not agree:
            logger.warning("Closed-form verdict and least-squares oracle disagree")

    if verdict.scalable and args.out:
        _write(args.out, scale_columns(frame, np.asarray(verdict.weights)), args, settings, name="scaled")
    return EXIT_OK if verdict.scalable else EXIT_NEGATIVE


def cmd_diagnose(args: argparse.Namespace, settings: Settings) -> int:
    frame = _read(args.file, args)
    report = audit(frame, settings.tolerance)
    width = max(len(c.name) for c in report.checks)
    for check in report.checks:
        residual = "-" if check.max_residual is None else f"{check.max_residual:.3e}"
        line = f"{check.name:<{width}}  {residual:>10}  {check.status.value}"
        if check.status == CheckStatus.SKIP and check.note:
            line += f"  ({check.note})"
        print(line)
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def cmd_random(args: argparse.Namespace, settings: Settings) -> int:
    frame = random_parseval(args.n, args.N, seed=args.seed)
    if args.out:
        _write(args.out, frame, args, settings, name="random", seed=args.seed)
    else:
        for v in frame.vectors:
            print(_vector_text(v))
    return EXIT_OK


def cmd_canon(args: argparse.Namespace, settings: Settings) -> int:
    form = canonicalize(_read(args.file, args), sign_tol=settings.tolerance)
    if args.out:
        _write(args.out, form.frame, args, settings, name="canonical")
    else:
        for v in form.frame.vectors:
            print(_vector_text(v))
    return EXIT_OK


def cmd_batch(args: argparse.Namespace, settings: Settings) -> int:
    request = BatchRequest(suite=args.suite, count=args.count, seed=args.seed)
    summary = asyncio.run(BatchExecutor(settings).execute(request))
    print(summary.summary_text())
    return EXIT_OK if summary.all_passed else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    # shared by the main parser and every subcommand so --tol works in either position
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="Tolerance (default 1e-9, env FRAMEKIT_TOL)")
    common.add_argument("--format", choices=["structured", "dsv"], default=argparse.SUPPRESS, help="Frame file format")

    parser = argparse.ArgumentParser(prog="framekit", description="Parseval frames with n+1 vectors", parents=[common])
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    parser.add_argument("--config", default=None, help="Path to framekit.config.yaml")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common], help="Triangular Parseval frame from a seed vector")
    p.add_argument("--seed", help="Comma-separated reals")
    p.add_argument("--seed-file", help="File holding the seed vector")
    p.add_argument("--out", help="Output frame file")
    p.set_defaults(handler=cmd_construct)

    p = sub.add_parser("verify", parents=[common], help="Frame bounds and Parseval check")
    p.add_argument("file")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("scale", parents=[common], help="Decide scalability of a unit-norm (n+1)-frame")
    p.add_argument("file")
    p.add_argument("--oracle", action="store_true", help="Cross-check with the least-squares oracle")
    p.add_argument("--out", help="Write the scaled frame here")
    p.set_defaults(handler=cmd_scale)

    p = sub.add_parser("diagnose", parents=[common], help="Audit the necessary identities")
    p.add_argument("file")
    p.set_defaults(handler=cmd_diagnose)

    p = sub.add_parser("random", parents=[common], help="Random Parseval frame")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="Output frame file")
    p.set_defaults(handler=cmd_random)

    p = sub.add_parser("canon", parents=[common], help="Canonical form up to rotation and reflections")
    p.add_argument("file")
    p.add_argument("--out", help="Output frame file")
    p.set_defaults(handler=cmd_canon)

    p = sub.add_parser("batch", parents=[common], help="Run a seeded batch suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_batch)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    args.tol = getattr(args, "tol", None)
    args.format = getattr(args, "format", None)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    settings = load_settings(args.config, tolerance=args.tol)

    try:
        return args.handler(args, settings)
    except FrameFileError as e:
        logger.error(str(e))
        return e.exit_code
    except FrameError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
