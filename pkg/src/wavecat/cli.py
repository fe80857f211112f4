"""Command-line runner.

Every command writes CSV (header row, 12 significant digits, RFC 4180
quoting and CRLF line ends) to ``--out`` or stdout, and a short human
summary to stderr. Exit codes: 0 success, 1 usage or input error,
2 invariant or tolerance failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import dsl, optics, scenario
from .checks import run_checks
from .hilbert import HilbertError, identity
from .optics import SYSTEM_SPACE
from .pointer import DEFAULT_EXTENT, DEFAULT_G, DEFAULT_POINTS, DEFAULT_SIGMA, PointerGrid, measure_weak_value
from .scenario import PROJECTOR_NAMES, ScenarioConfig

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


def fmt(x) -> str:
    x = float(x)
    if x == 0.0:
        x = 0.0  # drop the sign of negative zero
    return format(x, ".12g")


def to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _angle(text: str) -> float:
    try:
        return dsl.parse_number(text)
    except (ValueError, OverflowError):
        raise argparse.ArgumentTypeError(f"not an angle: {text!r} (use a number, pi or pi/N)") from None


def _config(args) -> ScenarioConfig:
    return ScenarioConfig(args.alpha, args.phi, args.phi2)


# -- commands ------------------------------------------------------------------


def cmd_report(args):
    cfg = _config(args)
    rep = scenario.weak_value_report(cfg)
    rows = [[f"Pi^{n[0]}_{n[2:]}", v.real, v.imag] for n, v in rep.values.items()]
    rows += [
        ["sum_all", rep.sum_all.real, rep.sum_all.imag],
        ["sum_RP_LW", rep.sum_RP_LW.real, rep.sum_RP_LW.imag],
        ["postselection_probability", rep.postselection_probability, 0.0],
    ]
    bad = rep.violations(args.tolerance)
    summary = [
        f"alpha={cfg.alpha:.6g} phi1={cfg.phi1:.6g} phi2={cfg.phi2:.6g}",
        f"<Pi^R_P>_w = {rep.values['R_P'].real:.12g}, <Pi^L_W>_w = {rep.values['L_W'].real:.12g}",
    ]
    summary += [f"VIOLATION {b}" for b in bad] or [f"all identities hold within {args.tolerance:g}"]
    return to_csv(["name", "re", "im"], rows), summary, EXIT_FAIL if bad else EXIT_OK


def cmd_sweep(args):
    if args.steps < 2:
        raise UsageError("--steps must be >= 2")
    alphas = np.linspace(args.alpha_start, args.alpha_stop, args.steps)
    rows, worst = [], 0.0
    for a in alphas:
        rep = scenario.weak_value_report(ScenarioConfig(float(a), args.phi, args.phi2))
        worst = max(worst, abs(rep.sum_RP_LW - 1), abs(rep.sum_all - 1))
        rows.append([float(a), rep.values["R_P"].real, rep.values["L_W"].real, rep.sum_RP_LW.real])
    ok = worst <= args.tolerance
    summary = [f"{args.steps} points, max |sum - 1| = {worst:.3g}"]
    return to_csv(["alpha", "wv_RP_re", "wv_LW_re", "sum"], rows), summary, EXIT_OK if ok else EXIT_FAIL


def cmd_pointer(args):
    cfg = _config(args)
    try:
        grid = PointerGrid(args.grid_points, args.extent, args.sigma)
    except HilbertError as exc:
        raise UsageError(str(exc)) from None
    tol = 2e-3 if args.tolerance is None else args.tolerance
    pre, post = scenario.pre_state(cfg), scenario.post_state(cfg)
    observables = dict(scenario.projector_set(cfg))
    observables["identity"] = identity(SYSTEM_SPACE)
    rows, failed = [], []
    for name, op in observables.items():
        analytic = scenario.weak_value(op, pre, post)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                est = measure_weak_value(pre, post, op, grid, args.g)
        except HilbertError:
            rows.append([name, analytic.real, analytic.imag, math.nan, math.nan, math.nan, math.nan])
            failed.append(name)
            continue
        err = max(abs(est.value.real - analytic.real), abs(est.value.imag - analytic.imag))
        if err > tol:
            failed.append(name)
        rows.append(
            [name, analytic.real, analytic.imag, est.value.real, est.value.imag, err, est.postselection_probability]
        )
    header = ["projector", "analytic_re", "analytic_im", "est_re", "est_im", "abs_err", "postsel_prob"]
    summary = [f"g={args.g:g} sigma={args.sigma:g} points={args.grid_points} extent={args.extent:g}"]
    summary += [f"FAIL {n}" for n in failed] or [f"all estimates within {tol:g}"]
    return to_csv(header, rows), summary, EXIT_FAIL if failed else EXIT_OK


def _sample_input(which: str, cfg: ScenarioConfig):
    return {
        "pre": scenario.pre_state,
        "post": scenario.post_state,
        "orthogonal": scenario.orthogonal_post_state,
    }[which](cfg)


def cmd_sample(args):
    if args.shots < 1:
        raise UsageError("--shots must be >= 1")
    if args.seed is None:
        raise UsageError("--seed is required for sampling")
    cfg = _config(args)
    stats = scenario.sample_detectors(_sample_input(args.state, cfg), cfg, args.shots, args.seed)
    rows = [
        [name, count, freq, p]
        for name, count, freq, p in zip(scenario.DETECTORS, stats.counts, stats.frequencies, stats.probabilities)
    ]
    summary = [f"state={args.state} shots={args.shots} seed={args.seed} counts={list(stats.counts)}"]
    return to_csv(["detector", "count", "frequency", "analytic_probability"], rows), summary, EXIT_OK


def cmd_check(args):
    cfg = _config(args)
    summary = []
    if not cfg.phases_matched:
        summary.append(f"NOTE unequal phases: phi1={cfg.phi1:.6g} != phi2={cfg.phi2:.6g}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", optics.UnequalPhaseWarning)
        results = run_checks(cfg, args.tolerance, args.perturb_sigma1234)
    rows = []
    for r in results:
        summary.append(f"{'PASS' if r.passed else 'FAIL'} {r.group}: {r.detail}")
        rows.append([r.group, "pass" if r.passed else "fail", r.detail])
    failed = [r.group for r in results if not r.passed]
    if failed:
        summary.append(f"failing groups: {', '.join(failed)}")
    return to_csv(["group", "status", "detail"], rows), summary, EXIT_FAIL if failed else EXIT_OK


def _circuit_path(text: str) -> Path:
    p = Path(text)
    if p.exists():
        return p
    bundled = dsl.bundled_path(text)
    if bundled.exists():
        return bundled
    raise UsageError(f"circuit file not found: {text}")


def cmd_compile(args):
    if not args.circuit:
        raise UsageError("--circuit is required")
    path = _circuit_path(args.circuit)
    try:
        spec = dsl.load(path)
        ops = dsl.compile_circuit(spec)
    except dsl.ParseError as exc:
        raise UsageError(f"{path}:{exc}") from None
    except HilbertError as exc:
        raise UsageError(f"{path}: {exc}") from None
    summary = [f"{len(ops)} element(s), registers {', '.join(r.name for r in spec.registers)}"]
    if args.canonical:
        return dsl.roundtrip(spec), summary, EXIT_OK
    u = dsl.pipeline_unitary(ops, spec.space)
    summary.append(f"unitarity error {u.unitarity_error():.3g}")
    pre = spec.selection_state("pre")
    if pre is None:
        n = spec.space.total_dimension
        rows = [[i, j, u.matrix[i, j].real, u.matrix[i, j].imag] for i in range(n) for j in range(n)]
        return to_csv(["row", "col", "re", "im"], rows), summary, EXIT_OK
    out = u.apply(pre)
    rows = [[lab, a.real, a.imag, abs(a) ** 2] for lab, a in dsl.amplitudes_table(out)]
    return to_csv(["basis", "re", "im", "probability"], rows), summary, EXIT_OK


COMMANDS = {
    "report": cmd_report,
    "sweep": cmd_sweep,
    "pointer": cmd_pointer,
    "sample": cmd_sample,
    "check": cmd_check,
    "compile": cmd_compile,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--alpha", type=_angle, default=math.pi / 4, help="toolbox angle (radians, default pi/4)")
    common.add_argument("--phi", type=_angle, default=math.pi / 3, help="phase phi1 (and phi2 unless given)")
    common.add_argument("--phi2", type=_angle, default=None, help="force a different phi2 (unequal-phase scenario)")
    common.add_argument("--out", type=Path, default=None, help="write CSV here instead of stdout")

    parser = _Parser(prog="wavecat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("report", parents=[common], help="weak values of the eight projectors")
    p.add_argument("--tolerance", type=float, default=1e-10)

    p = sub.add_parser("sweep", parents=[common], help="weak values over an alpha grid")
    p.add_argument("--alpha-start", type=_angle, default=0.0)
    p.add_argument("--alpha-stop", type=_angle, default=math.pi / 2)
    p.add_argument("--steps", type=int, default=33)
    p.add_argument("--tolerance", type=float, default=1e-10)

    p = sub.add_parser("pointer", parents=[common], help="weak values read from a simulated pointer")
    p.add_argument("--g", type=float, default=DEFAULT_G)
    p.add_argument("--sigma", type=float, default=DEFAULT_SIGMA)
    p.add_argument("--grid-points", type=int, default=DEFAULT_POINTS)
    p.add_argument("--extent", type=float, default=DEFAULT_EXTENT)
    p.add_argument("--tolerance", type=float, default=None, help="max abs error (default 2e-3)")

    p = sub.add_parser("sample", parents=[common], help="Monte Carlo detector clicks")
    p.add_argument("--state", choices=("pre", "post", "orthogonal"), default="pre")
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("check", parents=[common], help="run the invariant groups")
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.add_argument("--perturb-sigma1234", type=float, default=0.0, help=argparse.SUPPRESS)

    p = sub.add_parser("compile", parents=[common], help="parse and compile a .circuit file")
    p.add_argument("--circuit", default=None, help="path, or the name of a bundled circuit")
    p.add_argument("--canonical", action="store_true", help="print the canonical circuit text instead")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text, summary, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"wavecat {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out is not None:
        args.out.write_bytes(text.encode("utf-8"))
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
    for line in summary:
        print(line, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
