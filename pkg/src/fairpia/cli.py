"""Command-line frontend.

Subcommands: ``fair`` (weighted progressive fairing), ``autofair``
(automatic control-point selection), ``compare`` (iteration vs. direct
energy solve) and ``serve`` (session HTTP service).  Exit codes: 0 when the
run converged, 2 when it hit the iteration cap, 1 on any error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .autoselect import auto_fair, rank_control_points
from .baseline import compare_runs, energy_fair_direct
from .engine import FairingConfig, FairingRun, fair, weight_upper_bound
from .errors import FairPiaError
from .gram import FunctionalKind, gram_for
from .metrics import MetricsRecord
from .modelio import LoadedModel, load_model, parse_range_spec, save_model

EXIT_CONVERGED = 0
EXIT_ERROR = 1
EXIT_ITERATION_CAP = 2

log = logging.getLogger("fairpia")


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors exit with code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(self.exit_on_error_code if hasattr(self, "exit_on_error_code") else EXIT_ERROR)


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format(float(x), ".17g")


def write_trace_csv(path, trace: list[MetricsRecord]) -> None:
    lines = ["k,e_dev,e_iter,e_abs,e_rel"]
    for rec in trace:
        lines.append(
            f"{rec.k},{_fmt(rec.e_dev)},{_fmt(rec.e_iter)},{_fmt(rec.e_abs)},{_fmt(rec.e_rel)}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def resolve_kind(model: LoadedModel, r: int | None, kind_text: str | None) -> FunctionalKind:
    if kind_text:
        kind = FunctionalKind.parse(kind_text)
    elif r is not None:
        kind = FunctionalKind.for_curve(r)
    elif model.kind == "curve":
        kind = FunctionalKind.CURVE_R2
    else:
        kind = FunctionalKind.SURFACE_SECOND
    if kind.is_surface != (model.kind == "surface"):
        raise FairPiaError(f"functional {kind.value} does not apply to a {model.kind} model")
    return kind


def resolve_omega_spec(spec: str, model: LoadedModel) -> tuple[np.ndarray | float, dict]:
    """Weight argument: scalar, '@file' with a JSON array, or a range spec."""
    n = model.n_points
    spec = spec.strip()
    if spec.startswith("@"):
        path = spec[1:]
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        arr = np.asarray(data, dtype=float)
        if arr.shape != (n,):
            raise FairPiaError(f"weight file {path} has {arr.size} entries, model has {n} points")
        return arr, {"form": "file", "path": path}
    if ":" in spec:
        base = model.weights
        arr = parse_range_spec(spec, n, base)
        return arr, {"form": "ranges", "spec": spec}
    try:
        value = float(spec)
    except ValueError:
        raise FairPiaError(f"cannot parse weight spec {spec!r}") from None
    return value, {"form": "scalar", "value": value}


def run_manifest(args_echo: dict, run: FairingRun, kind: FunctionalKind) -> dict:
    final = run.trace[-1]
    manifest = {
        "command": args_echo,
        "kind": kind.value,
        "stopReason": run.stop_reason,
        "iterations": run.iterations,
        "fixedPoint": run.fixed_point,
        "final": {
            "eDev": _num_or_none(final.e_dev),
            "eIter": _num_or_none(final.e_iter),
            "eAbs": _num_or_none(final.e_abs),
            "eRel": _num_or_none(final.e_rel),
        },
        "warnings": run.warnings,
    }
    if run.active_set is not None:
        manifest["activeSet"] = [i + 1 for i in run.active_set]  # 1-based like the range spec
    if run.ranking is not None:
        manifest["ranking"] = [
            {"index": rp.index + 1, "z": rp.impact, "excluded": rp.excluded}
            for rp in run.ranking
        ]
    return manifest


def _num_or_none(x: float):
    return None if (isinstance(x, float) and math.isnan(x)) else float(x)


def _print_manifest(manifest: dict) -> None:
    sys.stdout.write(json.dumps(manifest, indent=2, sort_keys=False) + "\n")


def _exit_code(run: FairingRun) -> int:
    return EXIT_CONVERGED if run.stop_reason == "converged" else EXIT_ITERATION_CAP


# ---------------------------------------------------------------------------
# subcommands


def cmd_fair(args) -> int:
    model = load_model(args.input)
    kind = resolve_kind(model, args.r, args.kind)
    omega, omega_echo = resolve_omega_spec(args.omega, model)
    config = FairingConfig(
        kind=kind,
        omega=omega,
        max_iterations=args.max_iter,
        iter_tolerance=args.tol,
        weight_policy=args.weight_policy,
        active_set=_parse_active(args.active, model.n_points),
    )
    run = fair(model.geometry, config)
    if args.output:
        save_model(args.output, run.geometry, weights=None, metadata=model.metadata)
    if args.trace:
        write_trace_csv(args.trace, run.trace)
    manifest = run_manifest(
        {"subcommand": "fair", "input": str(args.input), "omega": omega_echo,
         "maxIter": args.max_iter, "tol": args.tol, "weightPolicy": args.weight_policy},
        run, kind,
    )
    _print_manifest(manifest)
    return _exit_code(run)


def cmd_autofair(args) -> int:
    model = load_model(args.input)
    kind = resolve_kind(model, args.r, args.kind)
    omega_text = args.omega_by_rank.strip()
    parts = [float(tok) for tok in omega_text.split(",") if tok.strip()]
    omega = parts[0] if len(parts) == 1 else np.asarray(parts)
    run = auto_fair(
        model.geometry,
        m=args.select,
        omega=omega,
        kind=kind,
        max_iterations=args.max_iter,
        iter_tolerance=args.tol,
        weight_policy=args.weight_policy,
    )
    if args.output:
        save_model(args.output, run.geometry, weights=None, metadata=model.metadata)
    if args.trace:
        write_trace_csv(args.trace, run.trace)
    manifest = run_manifest(
        {"subcommand": "autofair", "input": str(args.input), "m": args.select,
         "omegaByRank": omega_text, "maxIter": args.max_iter, "tol": args.tol},
        run, kind,
    )
    _print_manifest(manifest)
    return _exit_code(run)


def cmd_compare(args) -> int:
    model = load_model(args.input)
    kind = resolve_kind(model, args.r, args.kind)
    omega = float(args.omega)
    # uniform weights keep the system symmetric positive definite, so the
    # iteration converges for any omega in (0, 1); run it unchecked and tight
    # to expose the shared fixed point with the direct solve
    config = FairingConfig(
        kind=kind, omega=omega, max_iterations=args.max_iter,
        iter_tolerance=args.tol, weight_policy="unchecked",
    )
    run = fair(model.geometry, config)
    direct = energy_fair_direct(model.geometry, omega, kind)
    report = compare_runs(run, direct, kind)
    sys.stdout.write(report.format_table() + "\n")
    sys.stdout.write(
        f"pia iterations      {run.iterations} ({run.stop_reason})\n"
        f"max distance / diag {_fmt(report.max_point_distance / report.bbox_diagonal if report.bbox_diagonal else 0.0)}\n"
    )
    return EXIT_CONVERGED


def cmd_rank(args) -> int:
    model = load_model(args.input)
    kind = resolve_kind(model, args.r, args.kind)
    ranking = rank_control_points(model.geometry, kind)
    bounds = weight_upper_bound(gram_for(model.geometry, kind))
    sys.stdout.write("rank,index,z,excluded,weight_bound\n")
    for rp in ranking:
        sys.stdout.write(
            f"{rp.rank},{rp.index + 1},{_fmt(rp.impact)},{int(rp.excluded)},{_fmt(bounds[rp.index])}\n"
        )
    return EXIT_CONVERGED


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(static_dir=args.static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_CONVERGED


def _parse_active(text: str | None, n: int) -> list[int] | None:
    """Active set flag: comma-separated 1-based indices / inclusive ranges."""
    if not text:
        return None
    indices: set[int] = set()
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "-" in chunk:
            lo, _, hi = chunk.partition("-")
            lo_i, hi_i = int(lo), int(hi)
        else:
            lo_i = hi_i = int(chunk)
        if not (1 <= lo_i <= hi_i <= n):
            raise FairPiaError(f"active range {chunk!r} out of bounds for {n} points")
        indices.update(range(lo_i - 1, hi_i))
    return sorted(indices)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fairpia", description=__doc__)
    parser.add_argument("--version", action="version", version=f"fairpia {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, with_output=True):
        p.add_argument("input", help="model file (JSON)")
        p.add_argument("-r", type=int, choices=(1, 2, 3), default=None,
                       help="curve functional order (stretch/strain/jerk)")
        p.add_argument("--kind", default=None,
                       help="functional kind: r1|r2|r3|surface-first|surface-second")
        p.add_argument("--max-iter", type=int, default=800, help="iteration cap (default 800)")
        p.add_argument("--tol", type=float, default=1e-6,
                       help="stop when |E_iter[k+1] - E_iter[k]| < tol (default 1e-6)")
        if with_output:
            p.add_argument("-o", "--output", default=None, help="write faired model here")
            p.add_argument("--trace", default=None, help="write per-iteration CSV trace here")

    p_fair = sub.add_parser(
        "fair", help="weighted progressive-iterative fairing",
        epilog=(
            "WEIGHTS: --omega accepts a scalar ('1e-6'), a JSON array file "
            "('@weights.json'), or a range spec ('25-32:1e-5,46-57:8e-6,default:1e-6') "
            "with 1-based inclusive ranges, later entries winning on overlap."
        ),
    )
    add_common(p_fair)
    p_fair.add_argument("--omega", required=True, help="fairing weight(s); see WEIGHTS below")
    p_fair.add_argument("--weight-policy", choices=("clamp", "strict", "unchecked"), default="clamp",
                        help="out-of-bound weights: clamp to 99%% of the stability bound "
                             "(default), reject, or admit unchecked")
    p_fair.add_argument("--active", default=None,
                        help="restrict updates to these 1-based indices/ranges (e.g. '3,7-9')")
    p_fair.set_defaults(func=cmd_fair)

    p_auto = sub.add_parser("autofair", help="fair the m highest-impact control points")
    add_common(p_auto)
    p_auto.add_argument("-m", "--select", type=int, required=True,
                        help="number of control points to adjust")
    p_auto.add_argument("--omega-by-rank", required=True,
                        help="one weight, or m comma-separated weights assigned in rank order")
    p_auto.add_argument("--weight-policy", choices=("clamp", "strict", "unchecked"), default="clamp")
    p_auto.set_defaults(func=cmd_autofair)

    p_cmp = sub.add_parser("compare", help="uniform-weight fairing vs direct energy solve")
    add_common(p_cmp, with_output=False)
    p_cmp.add_argument("--omega", type=float, required=True, help="uniform fairing weight")
    # tight defaults: this is a fixed-point diagnostic, not a styling run
    p_cmp.set_defaults(func=cmd_compare, max_iter=20000, tol=1e-13)

    p_rank = sub.add_parser("rank", help="print the energy-impact ranking")
    add_common(p_rank, with_output=False)
    p_rank.set_defaults(func=cmd_rank)

    p_serve = sub.add_parser("serve", help="run the session HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8787)
    p_serve.add_argument("--static-dir", default=None,
                         help="also serve this directory at / (the weight studio UI)")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("FAIRPIA_LOG", "WARNING").upper())
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help/--version; map usage errors to 1
        return int(exc.code) if exc.code in (0, EXIT_ERROR) else EXIT_ERROR
    try:
        return args.func(args)
    except FairPiaError as exc:
        log.error("%s", exc)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        log.error("%s", exc)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
