"""``solitonlab`` command line.

Subcommands::

    soliton   build a translating soliton from flow constants (p or log, b, d)
    flow      evolve a curve CSV and fit a translation to the snapshots
    verify    check a sampled curve against the energy/flow dictionary
    figure1   render the four p = 1 panels as SVG
    reference write a closed-form oracle curve as CSV

Exit codes: 0 success, 2 no soliton exists, 3 domain violation, 4 stability
bound exceeded.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import make_interp_spline

from . import io
from .energy import (
    SolitonProblem,
    curvature_range,
    el_residual,
    energy_from_flow,
    first_integral,
    flow_from_energy,
)
from .errors import (
    DomainError,
    DomainExit,
    NoSolitonError,
    SolitonLabError,
    StepTooLarge,
)
from .flow import Boundary, FlowConfig, evolve, fit_translation
from .reference import Reference, ReferenceKind, make_reference
from .soliton import (
    CurvatureProfile,
    canonical_alignment,
    integrate_profile,
    reconstruct_curve,
    soliton_residual,
)

log = logging.getLogger("solitonlab")

EXIT_OK, EXIT_NO_SOLITON, EXIT_DOMAIN, EXIT_STABILITY = 0, 2, 3, 4
VERIFY_TOL = 1e-3


@dataclass(frozen=True)
class Figure1Panel:
    tag: str
    lam: float
    d: float
    half_span: float = 10.0

    @property
    def filename(self) -> str:
        return f"figure1_{self.tag}_lambda{self.lam:+g}.svg"


# d is a free constant of each panel; these keep every curvature range admissible
FIGURE1_PANELS = (
    Figure1Panel("a", -0.5, 1.0),
    Figure1Panel("b", 0.0, 1.0),
    Figure1Panel("c", 1.0, 0.25),
    Figure1Panel("d", 1.8, 1.0),
)


def _problem_from_args(args, a: float = 1.0) -> SolitonProblem:
    if args.log:
        return SolitonProblem.logarithmic(a=a, b=args.b)
    return SolitonProblem.power(args.p, a=a, b=args.b)


def _finite(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"{text!r} is not a finite number")
    return value


def _positive(text: str) -> float:
    value = _finite(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"{text!r} must be positive")
    return value


def _add_law_flags(parser, need_a: bool = False):
    law = parser.add_mutually_exclusive_group(required=True)
    law.add_argument("--p", type=_finite, help="power-law flow exponent")
    law.add_argument("--log", action="store_true", help="logarithmic flow (log kappa + b)")
    parser.add_argument("--b", type=_finite, default=0.0, help="speed offset b (default 0)")
    if need_a:
        parser.add_argument("--a", type=_finite, default=1.0, help="flow constant a (default 1)")


# -- soliton -----------------------------------------------------------------

def build_soliton(problem: SolitonProblem, d: float, half_span: float, tol: float = 1e-10):
    """Energy, profile, canonical curve, matched problem and a residual summary."""
    energy = energy_from_flow(problem)
    matched = flow_from_energy(energy, d)
    profile = integrate_profile(energy, d, half_span, step_tol=tol)
    curve = reconstruct_curve(profile)
    summary = {
        "soliton_residual_max": soliton_residual(curve, matched),
        "first_integral_drift": profile.max_drift,
    }
    return energy, profile, curve, matched, summary


def soliton_metadata(energy, profile: CurvatureProfile, matched: SolitonProblem, summary) -> dict:
    rng = curvature_range(energy, profile.d)
    return {
        "mode": matched.mode.value,
        "p": matched.p,
        "b": matched.b,
        "a": matched.a,
        "V": list(matched.V),
        "lambda": energy.lam,
        "energy": energy.label(),
        "d": profile.d,
        "kappa_range": [io.json_safe(rng.lo), io.json_safe(rng.hi)],
        "span": list(profile.span),
        "samples": len(profile),
        "truncated": profile.truncated,
        "residuals": summary,
    }


def cmd_soliton(args) -> int:
    problem = _problem_from_args(args)
    energy, profile, curve, matched, summary = build_soliton(problem, args.d, args.half_span,
                                                             args.tol)
    meta = soliton_metadata(energy, profile, matched, summary)
    out = Path(args.out)
    io.write_curve_csv(out.with_suffix(".csv"), curve)
    io.write_json(out.with_suffix(".json"), meta)
    if args.svg:
        io.write_svg(out.with_suffix(".svg"), curve, metadata=meta, title=energy.label())
    print(io.dump_json(meta), end="")
    return EXIT_OK


# -- flow --------------------------------------------------------------------

def cmd_flow(args) -> int:
    closed = {"auto": None, "closed": True, "free": False}[args.boundary]
    initial = io.read_curve_csv(args.input, closed=closed)
    problem = _problem_from_args(args, a=args.a)
    config = FlowConfig(
        problem, args.t_end, cfl=args.cfl, snapshots=args.snapshots,
        boundary=Boundary.CLOSED if initial.closed else Boundary.FREE_ENDS, dt=args.dt)
    traj = evolve(initial, config)

    out_dir = Path(args.out_dir)
    paths = []
    for k, state in enumerate(traj.states):
        path = out_dir / f"snapshot_{k:03d}.csv"
        io.write_curve_csv(path, state)
        paths.append(path.name)
    report = {
        "times": traj.times,
        "snapshots": paths,
        "steps": traj.steps,
        "stop_reason": traj.stop_reason,
        "resample_events": len(traj.resample_events),
        "fit": None,
    }
    if len(traj) >= 3:
        fit = fit_translation(traj)
        report["fit"] = {
            "V": fit.V.tolist(),
            "shape_residual": fit.shape_residual,
            "linearity_residual": fit.linearity_residual,
            "translating": fit.translating,
        }
    if initial.closed:
        report["mean_radius"] = [
            float(np.mean(np.hypot(*(s.points - s.points.mean(axis=0)).T))) for s in traj.states]
    io.write_json(out_dir / "trajectory.json", report)
    print(io.dump_json(report), end="")
    return EXIT_OK


# -- verify ------------------------------------------------------------------

def _arc_derivatives(values, s, closed):
    # quintic interpolation keeps second-derivative error small up to the free ends
    if closed:
        period = s[-1] - s[0] + (s[-1] - s[-2])
        spline = make_interp_spline(np.append(s, s[0] + period), np.append(values, values[0]),
                                    k=5, bc_type="periodic")
    else:
        spline = make_interp_spline(s, values, k=5)
    return spline(s, 1), spline(s, 2)


def verify_curve(curve, problem: SolitonProblem) -> dict:
    """Both sides of the soliton/critical-curve equivalence for a sampled curve.

    Curvature derivatives come from a quintic spline in arc length; d is the
    median of the first integral and fixes a through the dictionary.
    """
    energy = energy_from_flow(problem)
    kappa = curve.kappas
    kappa_s, kappa_ss = _arc_derivatives(kappa, curve.arc, curve.closed)
    el = np.abs(el_residual(energy, kappa, kappa_s, kappa_ss))
    fi = first_integral(energy, kappa, kappa_s)
    d = float(np.median(fi))
    if not d > 0:
        raise DomainError(f"first integral has non-positive median {d:.6g}; no soliton frame")
    matched = flow_from_energy(energy, d)
    aligned = canonical_alignment(curve, matched)
    res = soliton_residual(aligned, matched)
    el_max = float(el.max())
    return {
        "energy": energy.label(),
        "el_residual_max": el_max,
        "first_integral_drift": float(np.max(np.abs(fi - d)) / d),
        "d_estimate": d,
        "a": matched.a,
        "soliton_residual_max": res,
        "verdict": "PASS" if el_max < VERIFY_TOL and res < VERIFY_TOL else "FAIL",
    }


def cmd_verify(args) -> int:
    closed = {"auto": None, "closed": True, "free": False}[args.boundary]
    curve = io.read_curve_csv(args.input, closed=closed)
    report = verify_curve(curve, _problem_from_args(args))
    if args.report:
        io.write_json(args.report, report)
    print(io.dump_json(report), end="")
    return EXIT_OK


# -- figure 1 ----------------------------------------------------------------

def figure1_panel(panel: Figure1Panel):
    """Profile, canonical curve and SVG metadata for one p = 1 panel."""
    problem = SolitonProblem.power(1.0, b=-panel.lam)
    energy, profile, curve, matched, summary = build_soliton(problem, panel.d, panel.half_span)
    meta = soliton_metadata(energy, profile, matched, summary)
    meta["panel"] = panel.tag
    meta["total_turning"] = float(simpson(profile.kappa, x=profile.s))
    return profile, curve, meta


def render_figure1(out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    written = []
    for panel in FIGURE1_PANELS:
        _, curve, meta = figure1_panel(panel)
        title = f"p=1, lambda={panel.lam:g}, d={panel.d:g}"
        written.append(io.write_svg(out_dir / panel.filename, curve, metadata=meta, title=title))
    return written


def cmd_figure1(args) -> int:
    for path in render_figure1(args.out_dir):
        print(path)
    return EXIT_OK


# -- reference ---------------------------------------------------------------

def cmd_reference(args) -> int:
    ref = Reference(ReferenceKind(args.kind), args.scale, args.span)
    curve, _ = make_reference(ref, args.samples)
    io.write_curve_csv(args.out, curve)
    print(args.out)
    return EXIT_OK


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="solitonlab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("soliton", help="build a translating soliton")
    _add_law_flags(p)
    p.add_argument("--d", type=_positive, default=1.0, help="first-integral constant (default 1)")
    p.add_argument("--half-span", type=_positive, default=8.0)
    p.add_argument("--tol", type=_positive, default=1e-10, help="ODE rtol/atol")
    p.add_argument("--out", default="soliton", help="output stem for .csv/.json/.svg")
    p.add_argument("--svg", action="store_true", help="also write an SVG")
    p.set_defaults(func=cmd_soliton)

    f = sub.add_parser("flow", help="evolve a curve CSV")
    f.add_argument("input")
    _add_law_flags(f, need_a=True)
    f.add_argument("--t-end", type=_positive, required=True)
    f.add_argument("--snapshots", type=int, default=10)
    f.add_argument("--cfl", type=_positive, default=0.25)
    f.add_argument("--dt", type=_positive, default=None, help="fixed time step (checked)")
    f.add_argument("--boundary", choices=("auto", "closed", "free"), default="auto")
    f.add_argument("--out-dir", default="flow_out")
    f.set_defaults(func=cmd_flow)

    v = sub.add_parser("verify", help="check a curve CSV against the dictionary")
    v.add_argument("input")
    _add_law_flags(v)
    v.add_argument("--boundary", choices=("auto", "closed", "free"), default="auto")
    v.add_argument("--report", default=None, help="also write the JSON report here")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("figure1", help="render the four p=1 panels")
    g.add_argument("out_dir")
    g.set_defaults(func=cmd_figure1)

    r = sub.add_parser("reference", help="write an oracle curve as CSV")
    r.add_argument("kind", choices=[k.value for k in ReferenceKind])
    r.add_argument("--scale", type=_positive, default=1.0)
    r.add_argument("--span", type=_positive, default=4.0)
    r.add_argument("--samples", type=int, default=513)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_reference)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except NoSolitonError as exc:
        print(f"error: no soliton: {exc}", file=sys.stderr)
        return EXIT_NO_SOLITON
    except StepTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STABILITY
    except (DomainError, DomainExit, SolitonLabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
