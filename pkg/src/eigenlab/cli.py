"""Command-line front door.

Subcommands: run (iterate a matrix file to convergence), verify (sweep
the numbered dynamics observations), audit (fixed-point axioms and
continuity probes), render (SVG frames from a trace), serve (session
service for the interactive explorer).

Exit codes: 0 success / all checks passed, 1 input or flag error,
2 iteration budget exhausted.  All sampling is seeded; identical flags
and files produce identical output bytes.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .dynamics import (
    OBSERVATION_IDS,
    OBSERVATION_SUMMARIES,
    TWO_BY_TWO_ONLY,
    axiom_audit,
    check_observation,
    continuity_probe,
    make_step_fn,
)
from .engine import RunConfig, ShiftStrategy, reconstruct_eigensystem, run
from .errors import EigenLabError, MaxItersExceeded, ValidationError
from .sampling import psd_sampler
from .serialize import dumps_canonical, load_matrix
from .svgplot import overlays_for_matrix, render_svg_frame

log = logging.getLogger("eigenlab")

# Center used by the audit's discontinuity probe: the trailing-block
# half-gap changes sign across this point, which flips the Wilkinson shift.
SIGN_FLIP_CENTER = np.array([[1.0, 1e-3], [1e-3, 1.0]])


def _configure_logging() -> None:
    level = os.environ.get("EIGENLAB_LOG", "info").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    if level not in levels:
        print(f"warning: EIGENLAB_LOG={level!r} not in {{error,info,debug}}; using info",
              file=sys.stderr)
        level = "info"
    logging.basicConfig(level=levels[level], format="%(levelname)s %(name)s: %(message)s")


def _write_trace(path, trace) -> None:
    payload = "".join(dumps_canonical(rec.to_obj()) + "\n" for rec in trace)
    Path(path).write_bytes(payload.encode("ascii"))


def cmd_run(args) -> int:
    try:
        matrix = load_matrix(args.matrix)
        cfg = RunConfig(
            tol=args.tol,
            max_iters=args.max_iters,
            shift=ShiftStrategy.parse(args.shift),
            algorithm=args.algo,
            trace_every=args.trace_every,
        )
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        trace, final = run(matrix, cfg)
    except MaxItersExceeded as exc:
        if args.trace:
            _write_trace(args.trace, exc.trace)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EigenLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if args.trace:
        _write_trace(args.trace, trace)
        log.info("trace with %d records written to %s", len(trace), args.trace)
    decomp = reconstruct_eigensystem(final)
    print(f"converged in {final.k} iterations (algorithm {cfg.algorithm}, shift {cfg.shift})")
    print("eigenvalues:")
    for value in decomp.eigenvalues:
        print(f"  {float(value)!r}")
    print("eigenvectors (columns, matching order):")
    for row in decomp.eigenvectors:
        print("  " + "  ".join(f"{x: .12f}" for x in row))
    return 0


def _parse_observation_ids(text: str) -> list[int]:
    if text == "all":
        return list(OBSERVATION_IDS)
    try:
        ids = [int(part) for part in text.split(",") if part]
    except ValueError:
        raise ValidationError(f"bad observation list {text!r}; use 'all' or e.g. '1,2,9'")
    for i in ids:
        if i not in OBSERVATION_IDS:
            raise ValidationError(f"observation ids must be in 1..10, got {i}")
    if not ids:
        raise ValidationError("no observation ids given")
    return ids


def cmd_verify(args) -> int:
    try:
        ids = _parse_observation_ids(args.observations)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    all_passed = True
    print(f"algorithm {args.algo}, {args.samples} samples per observation, seed {args.seed}")
    for obs_id in ids:
        dims = (2,) if obs_id in TWO_BY_TWO_ONLY else (2, 3, 4, 5, 6)
        sampler = psd_sampler(args.seed + obs_id, dims=dims)
        report = check_observation(obs_id, args.algo, sampler, args.samples)
        status = "PASS" if report.passed else "FAIL"
        print(f"  obs {obs_id:>2}  {status}  {OBSERVATION_SUMMARIES[obs_id]}")
        if not report.passed:
            all_passed = False
            worst = report.violations[0]
            log.info("obs %d first violation: %s", obs_id, dumps_canonical(worst))
    return 0 if all_passed else 1


def cmd_audit(args) -> int:
    try:
        strategy = ShiftStrategy.parse(args.shift)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    sampler = psd_sampler(args.seed, dims=(2, 3, 4))
    report = axiom_audit(args.algo, sampler, args.samples, shift=strategy, seed=args.seed)
    print(f"axiom audit: algorithm {args.algo}, shift {strategy}, "
          f"{args.samples} samples, seed {args.seed}")
    names = {
        1: "iterates a map over PSD matrices (structural)",
        2: "steps preserve the spectrum",
        3: "iteration converges within budget",
        4: "fixed points are diagonal",
        5: "fixed points are attractive",
    }
    for axiom in sorted(report.axiom_passed):
        status = "PASS" if report.axiom_passed[axiom] else "FAIL"
        count = len(report.witnesses.get(axiom, []))
        suffix = f"  ({count} witnesses)" if count else ""
        print(f"  axiom {axiom}  {status}  {names[axiom]}{suffix}")
    for axiom, items in sorted(report.witnesses.items()):
        first = items[0]
        print(f"  axiom {axiom} first witness: {dumps_canonical(first)}")

    shifted_step = make_step_fn(args.algo, strategy)
    naive_step = make_step_fn(args.algo)
    probe_shifted = continuity_probe(shifted_step, SIGN_FLIP_CENTER, 1e-6, 64, args.seed)
    probe_naive = continuity_probe(naive_step, SIGN_FLIP_CENTER, 1e-6, 64, args.seed)
    ratio = probe_shifted.max_amplification / max(probe_naive.max_amplification, 1e-300)
    print("continuity probe at the shift sign-flip center (radius 1e-06):")
    print(f"  configured step max amplification: {probe_shifted.max_amplification!r}")
    print(f"  unshifted step max amplification:  {probe_naive.max_amplification!r}")
    print(f"  ratio: {ratio!r}")
    if ratio >= 100.0:
        print("  the configured shift is discontinuous near this center")

    if args.out:
        obj = {
            "audit": report.to_obj(),
            "continuity": {
                "shifted": probe_shifted.to_obj(),
                "naive": probe_naive.to_obj(),
                "amplificationRatio": ratio,
            },
        }
        Path(args.out).write_text(dumps_canonical(obj) + "\n")
        log.info("audit report written to %s", args.out)
    return 0


def cmd_render(args) -> int:
    trace_path = Path(args.trace)
    if not trace_path.exists():
        print(f"error: trace file {args.trace} not found", file=sys.stderr)
        return 1
    overlay_names = [p for p in args.overlay.split(",") if p]
    for name in overlay_names:
        if name not in ("input", "qr", "lr"):
            print(f"error: unknown overlay {name!r}; expected input,qr,lr", file=sys.stderr)
            return 1
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    import json

    from .serialize import matrix_from_obj

    lines = trace_path.read_text().splitlines()
    for index, line in enumerate(lines):
        try:
            record = json.loads(line)
            n = record["matrix"]["n"]
            matrix = matrix_from_obj(record["matrix"]) if n else np.zeros((0, 0))
        except (ValueError, KeyError, ValidationError) as exc:
            print(f"error: bad trace record {index}: {exc}", file=sys.stderr)
            return 1
        if n in (0,):
            svg = render_svg_frame([])
        elif n in (2, 3):
            svg = render_svg_frame(overlays_for_matrix(matrix, overlay_names))
        else:
            print(f"error: unrenderable dimension {n} at record {index} "
                  "(only 2x2 and 3x3 states render)", file=sys.stderr)
            return 1
        (out_dir / f"frame_{index:06d}.svg").write_bytes(svg.encode("ascii"))
    log.info("%d frames written to %s", len(lines), out_dir)
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    try:
        server = serve(args.host, args.port)
    except OSError as exc:
        print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 1
    log.info("serving sessions on http://%s:%d", args.host, args.port)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        log.info("shutting down")
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eigenlab",
        description="Iterative eigenvalue algorithms on PSD matrices: runs, checks, and views.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="iterate a matrix file to convergence")
    p_run.add_argument("--matrix", required=True, help="path to a {n, data} JSON matrix file")
    p_run.add_argument("--algo", choices=("qr", "lr"), default="qr")
    p_run.add_argument("--shift", default="none",
                       help="none | constant:<float> | gershgorin | wilkinson")
    p_run.add_argument("--tol", type=float, default=1e-10,
                       help="per-row off-diagonal threshold, relative to scale")
    p_run.add_argument("--max-iters", type=int, default=10000)
    p_run.add_argument("--trace", help="write a JSON Lines trace here")
    p_run.add_argument("--trace-every", type=int, default=1)
    p_run.set_defaults(func=cmd_run)

    p_verify = sub.add_parser("verify", help="sweep the dynamics observations")
    p_verify.add_argument("--observations", default="all", help="'all' or comma list of 1..10")
    p_verify.add_argument("--samples", type=int, default=1000)
    p_verify.add_argument("--seed", type=int, required=True)
    p_verify.add_argument("--algo", choices=("qr", "lr"), default="qr")
    p_verify.set_defaults(func=cmd_verify)

    p_audit = sub.add_parser("audit", help="fixed-point axioms and continuity probes")
    p_audit.add_argument("--algo", choices=("qr", "lr"), default="qr")
    p_audit.add_argument("--shift", default="none")
    p_audit.add_argument("--samples", type=int, default=200)
    p_audit.add_argument("--seed", type=int, required=True)
    p_audit.add_argument("--out", help="write the machine-readable report here")
    p_audit.set_defaults(func=cmd_audit)

    p_render = sub.add_parser("render", help="render SVG frames from a trace")
    p_render.add_argument("--trace", required=True)
    p_render.add_argument("--out", required=True, help="output directory for frame_%%06d.svg")
    p_render.add_argument("--overlay", default="input",
                          help="comma list from input,qr,lr")
    p_render.set_defaults(func=cmd_render)

    p_serve = sub.add_parser("serve", help="serve the interactive session protocol")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
