"""Command-line harness: ``pelastica {eval,minimize,surgery,verify,sweep}``.

Exit codes: 0 success, 1 error (including usage errors), 2 not converged or
not applicable.  Every command writes ``manifest.json`` into ``--out`` next
to its results; outputs carry no timestamps, so rerunning a manifest gives
byte-identical files.

Named generators (``--generator NAME:ARGS``)::

    circle:R             circle of radius R
    ellipse:a,b          ellipse with semi-axes a, b
    peanut:amp,k         polar r = 1 + amp cos(k phi)
    egg:amp              polar r = 1 + amp cos(phi)
    square               unit square
    rounded:rho          unit square with corner radius rho
    polygon-smooth:seed  random smooth convex oval (alias oval:seed)
    perturbed:seed       random star-shaped perturbed circle
"""

from __future__ import annotations

import argparse
import io
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

import numpy as np

from . import bounds, formats, generators
from .curve_core import CurveError, circularity, metrics
from .energy import CurvatureIntegrand, circle_quotient, energy_report
from .optimize import OptimizationError, OptimizerConfig, minimize_Fp
from .surgery import (
    NoQualifyingChords,
    centrosymmetrize,
    notch_removal,
    perturb_theta_eps,
    reduce_two_convex_arcs,
)

EXIT_OK, EXIT_ERROR, EXIT_NOT_CONVERGED = 0, 1, 2
SURGERY_OPS = ("centrosymmetrize", "perturb", "notch", "reduce")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage problems are errors (exit 1); exit 2 is reserved for "not converged"
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# manifest parsing


def _p_list(text: str) -> list[float]:
    try:
        ps = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"--p expects comma-separated numbers, got {text!r}") from exc
    if not ps or any(not p > 1 for p in ps):
        raise UsageError(f"every exponent must exceed 1, got {text!r}")
    return ps


def _integrand(spec: str | None, p: float) -> CurvatureIntegrand:
    """``power:P``, ``positive_power:P``, a JSON file, or default ``|t|^p``."""
    if spec is None:
        return CurvatureIntegrand.power(p)
    kind, _, arg = spec.partition(":")
    try:
        if kind in ("power", "positive_power"):
            return CurvatureIntegrand(kind, float(arg) if arg else p)
        path = Path(spec)
        if path.is_file():
            import json

            return CurvatureIntegrand.from_json(json.loads(path.read_text()))
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"bad integrand {spec!r}: {exc}") from exc
    raise UsageError(f"integrand must be power:P, positive_power:P or a JSON file, got {spec!r}")


def _check_N(N: int) -> int:
    if N < 64 or N > 4096 or N & (N - 1):
        raise UsageError(f"N must be a power of two in [64, 4096], got {N}")
    return N


def _tag(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", text).strip("_") or "curve"


def _inputs(args) -> list[tuple[str, object]]:
    """``(curve_id, curve)`` for every ``--input`` file and ``--generator`` spec."""
    items: list[tuple[str, object]] = []
    for path in args.input or []:
        if not Path(path).is_file():
            raise UsageError(f"input file not found: {path}")
        items.append((_tag(Path(path).stem), formats.load_curve(path)))
    M = 4 * args.N
    for spec in args.generator or []:
        try:
            items.append((_tag(spec), generators.angle_curve(spec, args.N, M)))
        except (ValueError, IndexError, TypeError) as exc:
            raise UsageError(f"bad generator {spec!r}: {exc}") from exc
    if not items:
        raise UsageError("give at least one --input FILE or --generator SPEC")
    return items


def _angle(curve, N: int, spec_id: str):
    try:
        return formats.as_angle_curve(curve, N)
    except CurveError as exc:
        raise CurveError(f"{spec_id}: {exc}") from exc


def _manifest(args, outputs: list[str]) -> dict:
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in ("func", "command", "input", "generator", "out")}
    return {
        "command": args.command,
        "inputs": {"files": args.input or [], "generators": args.generator or []},
        "params": params,
        "outputs": {"directory": str(args.out), "files": sorted(outputs)},
    }


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _finish(args, out: Path, written: list[str]) -> None:
    formats.write_json(_manifest(args, written + ["manifest.json"]), out / "manifest.json")


# ---------------------------------------------------------------------------
# commands

EVAL_FIELDS = ("curve_id", "p", "e_f", "f_p", "f_p_plus", "q_p", "q_p_plus", "circle_q_p",
               "length", "area", "width", "diameter", "convex", "centroid_x", "centroid_y",
               "circularity")


def cmd_eval(args) -> int:
    ps = _p_list(args.p)
    N = _check_N(args.N)
    rows = []
    for cid, raw in _inputs(args):
        curve = _angle(raw, N, cid)
        m = metrics(curve)
        for p in ps:
            rep = energy_report(curve, p, _integrand(args.f, p))
            rows.append({
                "curve_id": cid, "p": p, "e_f": rep.e_f, "f_p": rep.f_p, "f_p_plus": rep.f_p_plus,
                "q_p": rep.q_p, "q_p_plus": rep.q_p_plus, "circle_q_p": circle_quotient(p),
                "length": m.length, "area": m.area, "width": m.width, "diameter": m.diameter,
                "convex": m.convex, "centroid_x": m.centroid[0], "centroid_y": m.centroid[1],
                "circularity": circularity(curve),
            })
    out = _out_dir(args)
    with open(out / "eval.csv", "w") as fh:
        formats.write_rows(rows, fh, EVAL_FIELDS)
    formats.write_json(rows, out / "eval.json")
    _finish(args, out, ["eval.csv", "eval.json"])
    for r in rows:
        print(f"{r['curve_id']} p={r['p']:g}: F_p={r['f_p']:.10g} Q_p={r['q_p']:.10g} "
              f"(circle {r['circle_q_p']:.10g})")
    return EXIT_OK


def _config(args, p: float) -> OptimizerConfig:
    return OptimizerConfig(p=p, target_area=args.area, N=_check_N(args.N), max_outer=args.max_outer,
                           grad_tol=args.grad_tol, constraint_tol=args.tol)


HISTORY_FIELDS = ("outer", "F_p", "area_defect", "closure_defect", "grad_norm", "augmented", "q_p")


def _minimize_one(job):
    """Worker: run one optimisation and return everything to be written."""
    cid, raw, cfg = job
    initial = _angle(raw, cfg.N, cid)
    res = minimize_Fp(initial, cfg)
    hist = io.StringIO()
    formats.write_rows(res.history, hist, HISTORY_FIELDS)
    return {
        "tag": f"{cid}_p{cfg.p:g}",
        "result": formats.dumps(formats.result_to_json(res)),
        "history": hist.getvalue(),
        "initial_svg": formats.render_svg([initial], title=f"{cid} initial"),
        "final_svg": formats.render_svg([res.curve], title=f"{cid} final p={cfg.p:g}"),
        "row": {"curve_id": cid, "p": cfg.p, "converged": res.converged,
                "outer_iterations": res.outer_iterations, "q_p": res.q_p,
                "circle_q_p": circle_quotient(cfg.p), "circularity": res.circularity,
                "el_residual": res.el_residual, "el_alpha": res.el_alpha, "simple": res.simple},
    }


def _run_minimize(args, workers: int = 1) -> tuple[list[dict], Path, list[str]]:
    ps = _p_list(args.p)
    jobs = [(cid, raw, _config(args, p)) for cid, raw in _inputs(args) for p in ps]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(_minimize_one, jobs))  # map keeps manifest order
    else:
        done = [_minimize_one(j) for j in jobs]
    out = _out_dir(args)
    written = []
    for d in done:
        t = d["tag"]
        (out / f"{t}_result.json").write_text(d["result"])
        (out / f"{t}_history.csv").write_text(d["history"])
        (out / f"{t}_initial.svg").write_text(d["initial_svg"])
        (out / f"{t}_final.svg").write_text(d["final_svg"])
        written += [f"{t}_result.json", f"{t}_history.csv", f"{t}_initial.svg", f"{t}_final.svg"]
    return [d["row"] for d in done], out, written


def _report_runs(rows: list[dict]) -> int:
    for r in rows:
        state = "converged" if r["converged"] else "NOT converged"
        print(f"{r['curve_id']} p={r['p']:g}: {state} after {r['outer_iterations']} outer; "
              f"Q_p/circle-1={r['q_p'] / r['circle_q_p'] - 1:.3e} circularity={r['circularity']:.3e} "
              f"EL residual={r['el_residual']:.3e}")
    return EXIT_OK if all(r["converged"] for r in rows) else EXIT_NOT_CONVERGED


def cmd_minimize(args) -> int:
    rows, out, written = _run_minimize(args)
    _finish(args, out, written)
    return _report_runs(rows)


SWEEP_FIELDS = ("curve_id", "p", "converged", "outer_iterations", "q_p", "circle_q_p",
                "circularity", "el_residual", "el_alpha", "simple")


def cmd_sweep(args) -> int:
    rows, out, written = _run_minimize(args, workers=args.workers)
    with open(out / "sweep.csv", "w") as fh:
        formats.write_rows(rows, fh, SWEEP_FIELDS)
    _finish(args, out, written + ["sweep.csv"])
    return _report_runs(rows)


def cmd_verify(args) -> int:
    ps = _p_list(args.p)
    N = _check_N(args.N)
    checks = [c.strip() for c in args.checks.split(",") if c.strip()] if args.checks else list(bounds.ALL_CHECKS)
    unknown = sorted(set(checks) - set(bounds.ALL_CHECKS))
    if unknown:
        raise UsageError(f"unknown check(s) {unknown}; choose from {', '.join(bounds.ALL_CHECKS)}")
    curves: list[tuple[str, object]] = []
    if args.family:
        if args.family not in list(generators.FAMILIES) + ["mixed"]:
            raise UsageError(f"unknown family {args.family!r}")
        curves += list(bounds.fuzz_curves(args.family, args.n, args.seed, N))
    if args.input or args.generator:
        curves += [(cid, _angle(raw, N, cid)) for cid, raw in _inputs(args)]
    if not curves:
        raise UsageError("give --family or at least one --input/--generator")
    results = []
    for cid, curve in curves:
        results += bounds.run_checks(curve, ps, checks, cid)
    out = _out_dir(args)
    with open(out / "checks.csv", "w") as fh:
        bounds.write_csv(results, fh)
    _finish(args, out, ["checks.csv"])
    failed = [r for r in results if r.required and not r.passed]
    for name, (ok, total) in bounds.summarize(results).items():
        print(f"{name}: {ok}/{total} passed")
    print(f"summary: {len(results) - len(failed)}/{len(results)} required checks passed "
          f"over {len(curves)} curves")
    return EXIT_ERROR if failed else EXIT_OK


def cmd_surgery(args) -> int:
    N = _check_N(args.N)
    (cid, raw), *rest = _inputs(args)
    if rest:
        raise UsageError("surgery takes exactly one input curve")
    curve = _angle(raw, N, cid)
    p = _p_list(args.p)[0]
    f = _integrand(args.f, p)
    out = _out_dir(args)
    written: list[str] = []
    try:
        if args.operation == "centrosymmetrize":
            reports = [centrosymmetrize(curve, f)]
            payload = {"reports": [formats.surgery_to_json(r) for r in reports]}
        elif args.operation == "notch":
            reports = [notch_removal(curve, f)]
            payload = {"reports": [formats.surgery_to_json(r) for r in reports]}
        elif args.operation == "perturb":
            eps = args.eps if args.eps is not None else 0.1 * curve.L / (2 * np.pi)
            perturbed, est = perturb_theta_eps(curve, eps, p)
            notch = notch_removal(perturbed, f)
            reports = [notch]
            payload = {"perturbation": {**est, "p": p, "curve": formats.curve_to_json(perturbed)},
                       "reports": [formats.surgery_to_json(notch)]}
        else:
            reports, comparison = reduce_two_convex_arcs(curve, f)
            payload = {"comparison": comparison,
                       "reports": [formats.surgery_to_json(r) for r in reports]}
    except (NoQualifyingChords, CurveError) as exc:
        formats.write_json({"status": "not-applicable", "operation": args.operation,
                            "message": str(exc)}, out / "surgery.json")
        _finish(args, out, ["surgery.json"])
        print(f"{args.operation} not applicable to {cid}: {exc}")
        return EXIT_NOT_CONVERGED
    payload = {"status": "ok", "operation": args.operation, "integrand": f.to_json(), **payload}
    formats.write_json(payload, out / "surgery.json")
    overlays = [o for r in reports for o in formats.surgery_overlays(r)]
    (out / "before.svg").write_text(formats.render_svg([curve], overlays, title=f"{cid} before"))
    (out / "after.svg").write_text(formats.render_svg([r.output for r in reports],
                                                      title=f"{cid} after {args.operation}"))
    written += ["surgery.json", "before.svg", "after.svg"]
    _finish(args, out, written)
    for r in reports:
        print(f"{r.construction}: E {r.energy_before:.10g} -> {r.energy_after:.10g}, "
              f"A {r.area_before:.10g} -> {r.area_after:.10g}")
    if args.operation == "reduce":
        c = payload["comparison"]
        print(f"E_input={c['E_input']:.8g} >= mean_E_halves={c['mean_E_halves']:.8g} "
              f">= mean_E_discs={c['mean_E_discs']:.8g} >= E_disc={c['E_disc']:.8g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _common(sp: argparse.ArgumentParser, N: int = 256, p: str = "2") -> None:
    sp.add_argument("--input", action="append", metavar="FILE", help="curve JSON file (repeatable)")
    sp.add_argument("--generator", action="append", metavar="SPEC",
                    help="named generator NAME:ARGS (repeatable; see top-level help)")
    sp.add_argument("--p", default=p, help="exponent list, e.g. 1.5,2,3 (default %(default)s)")
    sp.add_argument("--N", type=int, default=N, help="grid size, power of two in [64, 4096] (default %(default)s)")
    sp.add_argument("--out", default="out", help="output directory (default %(default)s)")


def _optim(sp: argparse.ArgumentParser) -> None:
    d = OptimizerConfig()
    sp.add_argument("--area", type=float, default=d.target_area, help="target area (default pi)")
    sp.add_argument("--max-outer", type=int, default=d.max_outer, help="outer iteration cap")
    sp.add_argument("--tol", type=float, default=d.constraint_tol, help="constraint tolerance")
    sp.add_argument("--grad-tol", type=float, default=d.grad_tol, help="gradient-norm tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pelastica", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("eval", help="energies, quotient and metrics per (curve, p)")
    _common(sp, N=1024)
    sp.add_argument("--f", help="integrand: power:P, positive_power:P or JSON file")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("minimize", help="minimize F_p at fixed area")
    _common(sp)
    _optim(sp)
    sp.set_defaults(func=cmd_minimize)

    sp = sub.add_parser("sweep", help="minimize over every (curve, p) pair")
    _common(sp)
    _optim(sp)
    sp.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("surgery", help="run one construction and write its ledger")
    sp.add_argument("operation", choices=SURGERY_OPS)
    _common(sp, N=512)
    sp.add_argument("--f", help="integrand: power:P, positive_power:P or JSON file")
    sp.add_argument("--eps", type=float, help="perturbation length for 'perturb'")
    sp.set_defaults(func=cmd_surgery)

    sp = sub.add_parser("verify", help="check the inequalities over curves or a fuzz family")
    _common(sp, N=4096, p="1.5,2,3")
    sp.add_argument("--checks", help=f"comma list from {','.join(bounds.ALL_CHECKS)} (default all)")
    sp.add_argument("--family", help="fuzz family: " + ", ".join(list(generators.FAMILIES) + ["mixed"]))
    sp.add_argument("--n", type=int, default=200, help="fuzz family size (default %(default)s)")
    sp.add_argument("--seed", type=int, default=0, help="first fuzz seed (default %(default)s)")
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"pelastica: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (CurveError, OptimizationError, ValueError, KeyError, OSError) as exc:
        print(f"pelastica: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
