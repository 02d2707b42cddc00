"""Command-line interface: simulate, oracle, synthesize, check, fit.

File-based composition: CSV for curves (header ``t,probability`` plus a
``# units=`` comment), JSON for tables, models, fit results, and bound
reports.  Exit codes are a stable scripting contract: 0 success, 2
input/contract error, 3 numerical-domain error, 4 constraint or
factorization failure.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys

import numpy as np

from . import constraints, fitting, grid, synthesis
from .flipflop import (
    DisagreementCurve,
    FlipflopParams,
    disagreement_probability,
    simulate_curve,
)
from .models import KnobModel, RelFreqTable, model_distance, overlap, probability

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_CONSTRAINT = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgebit",
        description="Metastable 1-bit recorder model and knob-model toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="disagreement-vs-time curve from the closed form")
    sim.add_argument("--lambda", dest="lam", type=float, required=True)
    sim.add_argument("--b", type=float, required=True, help="packet width (dimensionless)")
    sim.add_argument("--c", type=float, default=0.0, help="bias of the initial packet")
    sim.add_argument("--t-max", type=float, default=6.0)
    sim.add_argument("--dt", type=float, default=0.01)
    sim.add_argument("--classical", action="store_true", help="hbar -> 0 limit curve")
    sim.add_argument("--numeric", action="store_true", help="quadrature path (required for c != 0)")
    sim.add_argument("--out", default="disagreement.csv")
    sim.add_argument("--plot", default=None, help="also render the curve to this PNG")

    orc = sub.add_parser("oracle", help="closed form vs split-step grid comparison")
    orc.add_argument("--lambda", dest="lam", type=float, default=1.81)
    orc.add_argument("--b", type=float, default=0.556)
    orc.add_argument("--n", type=int, default=256)
    orc.add_argument("--L", type=float, default=12.0)
    orc.add_argument("--dt", type=float, default=0.005)
    orc.add_argument("--t-max", type=float, default=3.0)
    orc.add_argument("--t-step", type=float, default=0.5)
    orc.add_argument("--tol", type=float, default=5e-3)
    orc.add_argument("--out", default=None, help="write the comparison report as JSON")
    orc.add_argument("--plot", default=None, help="render the comparison to this PNG")

    syn = sub.add_parser("synthesize", help="build a factoring model from a frequency table")
    syn.add_argument("table", help="RelFreqTable JSON file")
    syn.add_argument("--out", default="model.json")
    syn.add_argument("--inequivalent", action="store_true",
                     help="append an orthogonal block witnessing resolution freedom")
    syn.add_argument("--seed", type=int, default=None)

    chk = sub.add_parser("check", help="overlap and separation bounds for a model vs a table")
    chk.add_argument("model", help="KnobModel JSON file")
    chk.add_argument("table", help="RelFreqTable JSON file")
    chk.add_argument("--out", default=None, help="write both bound reports as JSON")

    fitp = sub.add_parser("fit", help="fit (omega, lambda, b) to a disagreement record")
    fitp.add_argument("record", help="CSV record with header t,probability")
    fitp.add_argument("--out", default="fit.json")
    fitp.add_argument("--curve-out", default=None, help="write the fitted curve CSV")
    fitp.add_argument("--plot", default=None, help="render record + fit to this PNG")
    fitp.add_argument("--fixed-omega", type=float, default=None)
    fitp.add_argument("--omega-bounds", type=float, nargs=2, default=(0.2, 5.0))
    fitp.add_argument("--lambda-bounds", type=float, nargs=2, default=(0.0, 4.0))
    fitp.add_argument("--b-bounds", type=float, nargs=2, default=(0.05, 3.0))
    fitp.add_argument("--grid-seeds", type=int, default=8)

    return parser


def _cmd_simulate(args) -> int:
    try:
        params = FlipflopParams.dimensionless(args.lam, args.b, args.c)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.c != 0.0 and not (args.numeric or args.classical):
        print(
            "error: the closed form requires c = 0; pass --numeric for a biased start",
            file=sys.stderr,
        )
        return EXIT_INPUT
    try:
        curve = simulate_curve(
            params, args.t_max, args.dt, classical=args.classical, numeric=args.numeric
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    curve.write_csv(args.out)
    print(f"wrote {len(curve)} rows to {args.out}")
    if args.plot:
        from .plotting import save_curve_plot

        label = "classical limit" if args.classical else "model"
        save_curve_plot(
            curve, args.plot, title=f"{label}: lambda={args.lam}, b={args.b}"
        )
        print(f"wrote figure to {args.plot}")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    try:
        spec = grid.GridSpec(n=args.n, half_width=args.L, dt=args.dt, lam=args.lam)
        state = grid.init_packet(spec, args.b, 0.0)
    except (ValueError, grid.PacketDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    params = FlipflopParams.dimensionless(args.lam, args.b)
    times = np.arange(0.0, args.t_max + args.t_step / 2, args.t_step)
    rows = []
    worst = 0.0
    try:
        for t in times:
            state = grid.evolve(state, float(t))
            numeric = grid.disagreement_from_grid(state)
            analytic = disagreement_probability(float(t), params)
            err = abs(numeric - analytic)
            worst = max(worst, err)
            rows.append(
                {"t": float(t), "analytic": analytic, "numeric": numeric, "abs_error": err}
            )
            print(
                f"t={t:6.3f}  analytic={analytic:.6f}  grid={numeric:.6f}  |diff|={err:.3e}"
            )
    except grid.LeakageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    ok = worst <= args.tol
    print(f"max |analytic - numeric| = {worst:.3e} ({'PASS' if ok else 'FAIL'} at tol {args.tol:g})")
    report = {
        "lambda": args.lam,
        "b": args.b,
        "grid": {"n": args.n, "half_width": args.L, "dt": args.dt},
        "rows": rows,
        "max_abs_error": worst,
        "tol": args.tol,
        "pass": ok,
    }
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2)
        print(f"wrote report to {args.out}")
    if args.plot:
        from .plotting import save_oracle_plot

        save_oracle_plot(
            [r["t"] for r in rows],
            [r["analytic"] for r in rows],
            [r["numeric"] for r in rows],
            args.plot,
        )
        print(f"wrote figure to {args.plot}")
    return EXIT_OK if ok else EXIT_CONSTRAINT


def _load_table(path: str) -> RelFreqTable:
    with open(path) as fh:
        return RelFreqTable.from_json_dict(json.load(fh))


def _cmd_synthesize(args) -> int:
    try:
        nu = _load_table(args.table)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: invalid table: {exc}", file=sys.stderr)
        return EXIT_INPUT

    base = synthesis.synthesize_model(nu)
    if args.inequivalent:
        if args.seed is None:
            print("error: --inequivalent requires --seed", file=sys.stderr)
            return EXIT_INPUT
        try:
            model = synthesis.generate_inequivalent_model(nu, args.seed)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    else:
        model = base.model

    with open(args.out, "w") as fh:
        fh.write(model.to_json(indent=2))

    worst_fact = max(
        abs(probability(model, a, b, c) - float(row[ci]))
        for (a, b), row in nu.rows.items()
        for ci, c in enumerate(nu.space.outcomes)
    )
    max_overlap = 0.0
    for a1, a2 in itertools.combinations(nu.space.a_settings, 2):
        max_overlap = max(max_overlap, overlap(model.rho[a1], model.rho[a2]))
    print(f"wrote model (dim {model.dim}) to {args.out}")
    print(f"max factorization error: {worst_fact:.3e}")
    print(f"max pairwise preparation overlap: {max_overlap:.3e}")
    if args.inequivalent:
        dist = model_distance(base.model, model)
        gap = min(
            max(
                float(
                    np.max(
                        np.abs(
                            np.linalg.eigvalsh(
                                model.resolution[b][c]
                                - np.pad(base.model.resolution[b][c], (0, 1))
                            )
                        )
                    )
                )
                for c in nu.space.outcomes
            )
            for b in nu.space.b_settings
        )
        print(f"distance to base construction: {dist:.3e}")
        print(f"resolution norm gap vs base: {gap:.6f}")
    return EXIT_OK


def _cmd_check(args) -> int:
    try:
        with open(args.model) as fh:
            model = KnobModel.from_json_dict(json.load(fh))
        nu = _load_table(args.table)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    problems = model.validate()
    if problems:
        print("error: model contract violations:", file=sys.stderr)
        for p in problems:
            print(f"  {p}", file=sys.stderr)
        return EXIT_INPUT
    try:
        overlap_report = constraints.check_overlap_constraint(model, nu)
        separation_report = constraints.check_separation_constraint(model, nu)
    except constraints.FactorizationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    payload = {
        "overlap": overlap_report.to_json_dict(),
        "separation": separation_report.to_json_dict(),
    }
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
        print(f"wrote reports to {args.out}")
    ok = overlap_report.all_satisfied and separation_report.all_satisfied
    print(
        f"overlap bound: {'PASS' if overlap_report.all_satisfied else 'FAIL'} "
        f"(worst margin {overlap_report.worst_margin:.3e})"
    )
    print(
        f"separation bound: {'PASS' if separation_report.all_satisfied else 'FAIL'} "
        f"(worst margin {separation_report.worst_margin:.3e})"
    )
    return EXIT_OK if ok else EXIT_CONSTRAINT


def _cmd_fit(args) -> int:
    try:
        data = fitting.load_record_csv(args.record)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    config = fitting.FitConfig(
        omega_bounds=tuple(args.omega_bounds),
        lambda_bounds=tuple(args.lambda_bounds),
        b_bounds=tuple(args.b_bounds),
        grid_seeds=args.grid_seeds,
        fixed_omega=args.fixed_omega,
    )
    try:
        result = fitting.fit(data, config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    with open(args.out, "w") as fh:
        fh.write(result.to_json(indent=2))
    print(
        f"omega={result.omega:.6g} lambda={result.lam:.6g} b={result.b:.6g} "
        f"objective={result.objective:.3e} converged={result.converged}"
    )
    if result.message:
        print(f"warning: {result.message}")
    fitted = DisagreementCurve(
        data.times,
        fitting.model_curve(data.times, result.omega, result.lam, result.b),
        units=data.units,
    )
    if args.curve_out:
        fitted.write_csv(args.curve_out)
        print(f"wrote fitted curve to {args.curve_out}")
    if args.plot:
        from .plotting import save_fit_plot

        save_fit_plot(data, fitted, args.plot)
        print(f"wrote figure to {args.plot}")
    return EXIT_OK


_HANDLERS = {
    "simulate": _cmd_simulate,
    "oracle": _cmd_oracle,
    "synthesize": _cmd_synthesize,
    "check": _cmd_check,
    "fit": _cmd_fit,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return _HANDLERS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
