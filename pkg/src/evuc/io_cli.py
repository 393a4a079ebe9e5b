"""Instance files, synthetic instance generation, CLI and benchmark output.

The instance document is a single JSON file; EV entries are accepted in
raw state-of-charge form or in reduced cumulative-energy form and are
reduced on load. The generator builds commuter-style fleets and a unit
stack sized so that every charging vector inside the naive relaxation is
dispatchable, which keeps generated instances feasible by construction.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__, engine, gpoly, lp, model


class ParseError(ValueError):
    """An instance document is malformed; the message carries the field path."""


# ---------------------------------------------------------------------------
# instance (de)serialization

def _num_list(node, path: str) -> list[float]:
    if not isinstance(node, list) or not all(isinstance(v, (int, float)) for v in node):
        raise ParseError(f"{path}: expected a list of numbers")
    return [float(v) for v in node]


def _get(node: dict, key: str, path: str, required: bool = True, default=None):
    if key not in node:
        if required:
            raise ParseError(f"{path}.{key}: missing field")
        return default
    return node[key]


def _unit_from_dict(node: dict, path: str) -> model.ProductionUnit:
    if not isinstance(node, dict):
        raise ParseError(f"{path}: expected an object")
    extra_rows = []
    for k, row in enumerate(_get(node, "extra_rows", path, required=False, default=[]) or []):
        rpath = f"{path}.extra_rows[{k}]"
        coeffs = _get(row, "coeffs", rpath)
        if not isinstance(coeffs, dict):
            raise ParseError(f"{rpath}.coeffs: expected an object mapping step to value")
        try:
            pairs = tuple((int(i), float(v)) for i, v in coeffs.items())
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{rpath}.coeffs: {exc}") from exc
        sense = _get(row, "sense", rpath)
        if sense not in ("<=", ">=", "="):
            raise ParseError(f"{rpath}.sense: expected one of <=, >=, =")
        extra_rows.append(model.LinearRow(pairs, sense, float(_get(row, "rhs", rpath))))
    ramp_up = _get(node, "ramp_up", path, required=False)
    ramp_down = _get(node, "ramp_down", path, required=False)
    return model.ProductionUnit(
        name=str(_get(node, "name", path)),
        cost=_num_list(_get(node, "cost", path), f"{path}.cost"),
        p_min=_num_list(_get(node, "p_min", path), f"{path}.p_min"),
        p_max=_num_list(_get(node, "p_max", path), f"{path}.p_max"),
        ramp_up=None if ramp_up is None else float(ramp_up),
        ramp_down=None if ramp_down is None else float(ramp_down),
        extra_rows=tuple(extra_rows),
    )


def instance_to_dict(instance: model.Instance) -> dict:
    units = []
    for unit in instance.units:
        units.append({
            "name": unit.name,
            "cost": unit.cost.tolist(),
            "p_min": unit.p_min.tolist(),
            "p_max": unit.p_max.tolist(),
            "ramp_up": unit.ramp_up,
            "ramp_down": unit.ramp_down,
            "extra_rows": [
                {"coeffs": {str(i): v for i, v in row.coeffs},
                 "sense": row.sense, "rhs": row.rhs}
                for row in unit.extra_rows
            ],
        })
    profiles = []
    for profile in instance.fleet:
        profiles.append({
            "count": profile.count,
            "p_min": profile.p_min.tolist(),
            "p_max": profile.p_max.tolist(),
            "s_min": profile.s_min.tolist(),
            "s_max": profile.s_max.tolist(),
        })
    return {
        "horizon": {"T": instance.horizon.T, "step_hours": instance.horizon.step_hours},
        "demand": instance.demand.tolist(),
        "units": units,
        "ev_profiles": profiles,
    }


def instance_from_dict(doc: dict) -> model.Instance:
    if not isinstance(doc, dict):
        raise ParseError("document root must be an object")
    hor = _get(doc, "horizon", "$")
    try:
        horizon = model.TimeHorizon(int(_get(hor, "T", "horizon")),
                                    float(_get(hor, "step_hours", "horizon",
                                               required=False, default=1.0)))
    except model.ValidationError as exc:
        raise ParseError(f"horizon: {exc}") from exc
    T = horizon.T
    demand = _num_list(_get(doc, "demand", "$"), "demand")
    units = [
        _unit_from_dict(node, f"units[{m}]")
        for m, node in enumerate(_get(doc, "units", "$", required=False, default=[]) or [])
    ]
    fleet: list[model.EVProfile] = []
    for n, node in enumerate(doc.get("ev_profiles") or []):
        path = f"ev_profiles[{n}]"
        try:
            fleet.append(model.EVProfile(
                p_min=_num_list(_get(node, "p_min", path), f"{path}.p_min"),
                p_max=_num_list(_get(node, "p_max", path), f"{path}.p_max"),
                s_min=_num_list(_get(node, "s_min", path), f"{path}.s_min"),
                s_max=_num_list(_get(node, "s_max", path), f"{path}.s_max"),
                count=int(_get(node, "count", path, required=False, default=1)),
            ))
        except model.LengthMismatch:
            raise
        except model.ValidationError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    for n, node in enumerate(doc.get("ev_profiles_raw") or []):
        path = f"ev_profiles_raw[{n}]"
        try:
            raw = model.EVProfileRaw(
                p_min=_num_list(_get(node, "p_min", path), f"{path}.p_min"),
                p_max=_num_list(_get(node, "p_max", path), f"{path}.p_max"),
                soc_min=_num_list(_get(node, "soc_min", path), f"{path}.soc_min"),
                soc_max=_num_list(_get(node, "soc_max", path), f"{path}.soc_max"),
                soc_init=float(_get(node, "soc_init", path)),
                drive=_num_list(_get(node, "drive", path), f"{path}.drive"),
            )
            fleet.append(model.reduce_profile(
                raw, int(_get(node, "count", path, required=False, default=1))))
        except model.LengthMismatch:
            raise
        except model.ValidationError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    instance = model.Instance(horizon=horizon, demand=demand, units=units, fleet=fleet)
    model.validate_instance(instance)
    return instance


def save_instance(instance: model.Instance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(instance), fh, indent=1)
        fh.write("\n")


def load_instance(path: str) -> model.Instance:
    """Parse and fully validate an instance document."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return instance_from_dict(doc)


# ---------------------------------------------------------------------------
# synthetic instance generation

@dataclass
class GeneratorParams:
    """Knobs of the synthetic generator.

    fleet_size vehicles are split evenly over num_profiles classes, with
    the division remainder on the first class. ev_share is the target
    total EV charging energy as a fraction of total demand energy.
    """

    T: int = 168
    step_hours: float = 1.0
    num_profiles: int = 10
    fleet_size: int = 5_100_000
    ev_share: float = 0.035
    v2g: bool = False
    num_units: int = 8
    seed: int = 0


def _demand_curve(params: GeneratorParams, rng: np.random.Generator) -> np.ndarray:
    T, tau = params.T, params.step_hours
    hours = np.arange(T) * tau
    hod = hours % 24.0
    dow = (hours // 24.0).astype(int) % 7
    base = 42_000.0
    shape = 1.0 + 0.16 * np.cos(2 * np.pi * (hod - 19.0) / 24.0) \
        + 0.06 * np.cos(4 * np.pi * (hod - 9.0) / 24.0)
    weekend = np.where(dow >= 5, 0.93, 1.0)
    noise = rng.normal(0.0, 0.01 * base, size=T)
    return np.maximum(base * shape * weekend + noise, 0.2 * base)


def _commuter_profile(params: GeneratorParams, rng: np.random.Generator):
    """One commuter archetype in raw state-of-charge form (per vehicle, MW/MWh).

    Weekday: away between a morning departure and an evening return, with
    the daily driving energy split over the two travel steps. Weekend:
    plugged except one early-afternoon trip. Returned drive energies are
    later rescaled globally to hit the target demand share.
    """
    T, tau = params.T, params.step_hours
    depart = float(rng.uniform(6.5, 9.5))
    ret = float(rng.uniform(16.5, 19.5))
    charger_mw = float(rng.choice([3.7, 7.4, 11.0])) * 1e-3
    battery = float(rng.uniform(0.040, 0.080))  # MWh
    soc_init = float(rng.uniform(0.45, 0.70)) * battery
    reserve = 0.10 * battery
    daily_energy = float(rng.uniform(0.7, 1.3))  # relative; rescaled later
    weekend_trip = 0.5 * daily_energy

    hours = np.arange(T) * tau
    hod = hours % 24.0
    dow = (hours // 24.0).astype(int) % 7
    weekdayish = dow < 5
    away_week = weekdayish & (hod >= depart) & (hod < ret)
    away_wend = ~weekdayish & (hod >= 13.0) & (hod < 16.0)
    away = away_week | away_wend

    p_max = np.where(away, 0.0, charger_mw)
    p_min = np.where(away & np.full(T, True), 0.0,
                     -0.25 * charger_mw if params.v2g else 0.0)
    p_min = np.where(away, 0.0, p_min)
    drive = np.zeros(T)
    for day_start in range(0, T, max(1, int(round(24.0 / tau)))):
        day = dow[day_start] if day_start < T else 0
        steps_per_day = int(round(24.0 / tau))
        if day < 5:
            t_dep = day_start + int(depart / tau) % steps_per_day
            t_ret = day_start + int(ret / tau) % steps_per_day
            if t_dep < T:
                drive[t_dep] += 0.5 * daily_energy
            if t_ret < T:
                drive[t_ret] += 0.5 * daily_energy
        else:
            t_trip = day_start + int(13.0 / tau) % steps_per_day
            if t_trip < T:
                drive[t_trip] += weekend_trip
    soc_min = np.full(T, reserve)
    soc_min[-1] = soc_init  # end where you started: weekly energy neutrality
    soc_max = np.full(T, battery)
    return {
        "p_min": p_min, "p_max": p_max, "soc_min": soc_min, "soc_max": soc_max,
        "soc_init": soc_init, "drive": drive, "charger_mw": charger_mw,
    }


def generate_instance(params: GeneratorParams) -> model.Instance:
    """Deterministic synthetic instance: demand curve, unit stack, EV fleet.

    Unit capacity covers the demand peak plus the full naive charging
    envelope of the fleet, so the master problem is feasible for every
    charging vector the relaxation can propose.
    """
    rng = np.random.default_rng(np.uint64(params.seed))
    T, tau = params.T, params.step_hours
    demand = _demand_curve(params, rng)
    demand_energy = float(np.sum(demand) * tau)

    N = max(0, int(params.num_profiles))
    base_count = params.fleet_size // N if N else 0
    counts = [base_count] * N
    if N:
        counts[0] += params.fleet_size - base_count * N
    raws = [_commuter_profile(params, rng) for _ in range(N)]

    # rescale driving energy so the fleet's required charge hits the share
    total_drive = sum(c * float(np.sum(r["drive"])) for c, r in zip(counts, raws))
    if total_drive > 0:
        alpha = params.ev_share * demand_energy / total_drive
        for r, c in zip(raws, counts):
            # keep each day's need well inside one night of charging
            day_steps = min(T, int(round(24.0 / tau)))
            night_capacity = 0.6 * r["charger_mw"] * tau * max(1, day_steps // 2)
            max_day = float(np.max(np.convolve(r["drive"], np.ones(day_steps))[:T]))
            cap = night_capacity / max_day if max_day > 0 else np.inf
            r["drive"] = r["drive"] * min(alpha, cap)

    fleet = []
    for r, c in zip(raws, counts):
        raw = model.EVProfileRaw(
            p_min=r["p_min"], p_max=r["p_max"], soc_min=r["soc_min"],
            soc_max=r["soc_max"], soc_init=r["soc_init"], drive=r["drive"],
        )
        fleet.append(model.reduce_profile(raw, c))

    ev_peak = 0.0
    ev_floor = 0.0
    if fleet:
        ev_peak = float(np.max(sum(p.count * p.p_max for p in fleet)))
        ev_floor = float(np.min(sum(p.count * p.p_min for p in fleet)))

    M = max(1, int(params.num_units))
    mean_d, max_d = float(np.mean(demand)), float(np.max(demand))
    n_base = max(1, round(0.3 * M)) if M >= 3 else 0
    n_peak = max(1, round(0.3 * M)) if M >= 3 else 0
    n_mid = M - n_base - n_peak
    class_of = ["base"] * n_base + ["mid"] * n_mid + ["peak"] * n_peak

    # capacity must cover the demand peak plus the fleet's full charging
    # envelope, whatever the class mix
    required = 1.15 * (max_d + ev_peak)
    totals = {
        "base": 0.5 * mean_d if n_base else 0.0,
        "mid": 0.4 * mean_d if n_mid else 0.0,
        "peak": max(0.2 * mean_d, required - 0.9 * mean_d) if n_peak else 0.0,
    }
    allocated = sum(totals.values())
    if allocated < required:
        scale_up = required / allocated
        totals = {k: v * scale_up for k, v in totals.items()}
    cost_range = {"base": (8.0, 18.0), "mid": (35.0, 95.0), "peak": (110.0, 280.0)}

    hours = np.arange(T) * tau
    hod = hours % 24.0
    units = []
    for kind in ("base", "mid", "peak"):
        members = [i for i, k in enumerate(class_of) if k == kind]
        if not members:
            continue
        shares = rng.uniform(0.7, 1.3, size=len(members))
        shares = shares / shares.sum() * totals[kind]
        for j, cap in zip(members, shares):
            level = float(rng.uniform(*cost_range[kind]))
            phase = float(rng.uniform(0.0, 24.0))
            cost = level * (1.0 + 0.03 * np.cos(2 * np.pi * (hod - phase) / 24.0))
            p_min = np.full(T, 0.25 * cap) if kind == "base" else np.zeros(T)
            ramp = 0.10 * cap * tau if kind == "base" else None
            units.append(model.ProductionUnit(
                name=f"{kind}-{j:02d}", cost=cost, p_min=p_min,
                p_max=np.full(T, cap), ramp_up=ramp, ramp_down=ramp,
            ))

    # guard against deep V2G discharging dropping net demand below the
    # committed baseload minimum
    committed = sum(float(u.p_min[0]) for u in units)
    if float(np.min(demand)) + ev_floor < committed:
        units = [
            model.ProductionUnit(u.name, u.cost, np.zeros(T), u.p_max,
                                 u.ramp_up, u.ramp_down, u.extra_rows)
            for u in units
        ]

    instance = model.Instance(
        horizon=model.TimeHorizon(T, tau), demand=demand,
        units=units, fleet=fleet,
    )
    model.validate_instance(instance)
    return instance


# ---------------------------------------------------------------------------
# reports and benchmark output

def report_to_dict(report: engine.SolveReport, instance: model.Instance | None,
                   options: dict) -> dict:
    return {
        "tool": "evuc",
        "version": __version__,
        "options": options,
        "status": report.status.value,
        "objective": None if np.isnan(report.objective) else report.objective,
        "iterations": [
            {
                "objective": it.objective,
                "cuts_added": it.cuts_added,
                "sfm_value": it.sfm_value,
                "oracle_wall_ms": it.oracle_wall_ms,
                "master_wall_ms": it.master_wall_ms,
            }
            for it in report.iterations
        ],
        "p_schedule": None if report.p_schedule is None else report.p_schedule.tolist(),
        "unit_schedules": None if report.unit_schedules is None else [
            {"name": instance.units[m].name if instance else str(m),
             "z": z.tolist()}
            for m, z in enumerate(report.unit_schedules)
        ],
        "total_cuts": report.total_cuts,
    }


def save_report(report: engine.SolveReport, path: str,
                instance: model.Instance | None, options: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report_to_dict(report, instance, options), fh, indent=1)
        fh.write("\n")


def write_cuts_csv(path: str, cut_log: list[tuple[int, gpoly.Cut]]) -> None:
    """One row per added cut: iteration, sense, bound, sorted subset indices."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "sense", "bound", "subset"])
        for iteration, cut in cut_log:
            writer.writerow([iteration, cut.sense, repr(cut.bound),
                             " ".join(str(i) for i in cut.subset.indices())])


BENCH_COLUMNS = ["T", "N", "run", "iterations", "cuts_added", "objective",
                 "oracle_ms", "master_ms", "total_ms"]


def run_bench(T_list, N_list, runs: int, seed: int, threads: int = 1,
              num_units: int | None = None, log=None, collect_reports: bool = False):
    """Solve one generated instance per (T, N, run) and collect metrics.

    With collect_reports, returns (rows, reports) so callers can inspect
    per-iteration behavior; otherwise just the rows.
    """
    rows = []
    reports = []
    for T in T_list:
        for N in N_list:
            for run in range(runs):
                run_seed = int(np.random.SeedSequence([seed, T, N, run]).generate_state(1)[0])
                params = GeneratorParams(T=T, num_profiles=N, seed=run_seed)
                if num_units is not None:
                    params.num_units = num_units
                instance = generate_instance(params)
                t0 = time.perf_counter()
                report = engine.solve_uc(instance, engine.SolveOptions(threads=threads))
                total_ms = (time.perf_counter() - t0) * 1e3
                row = {
                    "T": T,
                    "N": N,
                    "run": run,
                    "iterations": len(report.iterations),
                    "cuts_added": sum(it.cuts_added for it in report.iterations),
                    "objective": report.objective,
                    "oracle_ms": sum(it.oracle_wall_ms for it in report.iterations),
                    "master_ms": sum(it.master_wall_ms for it in report.iterations),
                    "total_ms": total_ms,
                }
                rows.append(row)
                if collect_reports:
                    reports.append(report)
                if log is not None:
                    log(f"T={T} N={N} run={run}: {row['iterations']} iterations, "
                        f"{row['cuts_added']} cuts, {total_ms:.0f} ms")
    return (rows, reports) if collect_reports else rows


def write_bench_csv(stream, rows) -> None:
    writer = csv.DictWriter(stream, fieldnames=BENCH_COLUMNS)
    writer.writeheader()
    for row in rows:
        writer.writerow(row)


# ---------------------------------------------------------------------------
# command-line interface

class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise _UsageError(f"expected a comma-separated integer list, got {text!r}") from exc


def _build_parser() -> _Parser:
    parser = _Parser(prog="evuc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    default_threads = int(os.environ.get("UC_THREADS", "1"))

    p_solve = sub.add_parser("solve", help="solve an instance file")
    p_solve.add_argument("instance")
    p_solve.add_argument("--out", help="write the solve report as JSON")
    p_solve.add_argument("--cuts-csv", help="write every added cut as CSV")
    p_solve.add_argument("--sep-tol", type=float, default=1e-6)
    p_solve.add_argument("--max-iters", type=int, default=100)
    p_solve.add_argument("--threads", type=int, default=default_threads)
    p_solve.add_argument("--extensive", action="store_true",
                         help="solve the extensive reference form instead")

    p_gen = sub.add_parser("generate", help="write a synthetic instance")
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--T", type=int, default=GeneratorParams.T)
    p_gen.add_argument("--step-hours", type=float, default=GeneratorParams.step_hours)
    p_gen.add_argument("--profiles", type=int, default=GeneratorParams.num_profiles)
    p_gen.add_argument("--fleet-size", type=int, default=GeneratorParams.fleet_size)
    p_gen.add_argument("--ev-share", type=float, default=GeneratorParams.ev_share)
    p_gen.add_argument("--v2g", action="store_true")
    p_gen.add_argument("--units", type=int, default=GeneratorParams.num_units)
    p_gen.add_argument("--seed", type=int, default=0)

    p_check = sub.add_parser("check", help="validate an instance and its borders")
    p_check.add_argument("instance")

    p_bench = sub.add_parser("bench", help="run the benchmark grid")
    p_bench.add_argument("--T-list", type=_int_list, default=[24, 48, 96])
    p_bench.add_argument("--N-list", type=_int_list, default=[2, 10, 50])
    p_bench.add_argument("--runs", type=int, default=10)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--threads", type=int, default=default_threads)
    p_bench.add_argument("--units", type=int, default=None)
    p_bench.add_argument("--out", help="CSV output path (default: stdout)")
    return parser


def _cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    options = {
        "sep_tol": args.sep_tol, "max_iters": args.max_iters,
        "threads": args.threads, "extensive": bool(args.extensive),
    }
    cut_log: list[tuple[int, gpoly.Cut]] = []
    if args.extensive:
        report = engine.solve_extensive(instance)
    else:
        opts = engine.SolveOptions(sep_tol=args.sep_tol, max_iters=args.max_iters,
                                   threads=args.threads)
        on_cuts = (lambda k, cuts: cut_log.extend((k, c) for c in cuts)) if args.cuts_csv else None
        report = engine.solve_uc(instance, opts, on_cuts=on_cuts)
    print(f"status: {report.status.value}")
    if report.status == engine.UcStatus.OPTIMAL:
        print(f"objective: {report.objective:.6f}")
    print(f"iterations: {len(report.iterations)}")
    print(f"total cuts: {report.total_cuts}")
    for k, it in enumerate(report.iterations):
        sfm_txt = "-" if it.sfm_value is None else f"{it.sfm_value:.6g}"
        print(f"  iter {k}: objective={it.objective:.6f} cuts_added={it.cuts_added} "
              f"sfm_value={sfm_txt} master={it.master_wall_ms:.1f}ms "
              f"oracle={it.oracle_wall_ms:.1f}ms")
    if args.out:
        save_report(report, args.out, instance, options)
    if args.cuts_csv:
        write_cuts_csv(args.cuts_csv, cut_log)
    if report.status == engine.UcStatus.ITERATION_LIMIT:
        return 4
    if report.status == engine.UcStatus.INFEASIBLE:
        return 3
    return 0


def _cmd_generate(args) -> int:
    params = GeneratorParams(
        T=args.T, step_hours=args.step_hours, num_profiles=args.profiles,
        fleet_size=args.fleet_size, ev_share=args.ev_share, v2g=args.v2g,
        num_units=args.units, seed=args.seed,
    )
    instance = generate_instance(params)
    save_instance(instance, args.out)
    print(f"wrote {args.out}: T={instance.T}, {len(instance.units)} units, "
          f"{len(instance.fleet)} EV profiles")
    return 0


def _cmd_check(args) -> int:
    instance = load_instance(args.instance)
    evaluator = gpoly.BorderEvaluator(instance.fleet, instance.horizon.step_hours)
    report = gpoly.check_structure(evaluator, samples=100, seed=0)
    if not report.passed:
        w = report.witnesses[0]
        print(f"structure check failed: {w.kind} on A={w.set_a.indices()} "
              f"B={w.set_b.indices()}", file=sys.stderr)
        return 2
    print(f"ok: instance valid, border structure checks passed "
          f"({report.samples} sampled pairs)")
    return 0


def _cmd_bench(args) -> int:
    rows = run_bench(args.T_list, args.N_list, args.runs, args.seed,
                     threads=args.threads, num_units=args.units,
                     log=lambda msg: print(msg, file=sys.stderr))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_bench_csv(fh, rows)
    else:
        write_bench_csv(sys.stdout, rows)
    return 0


def run_cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "bench":
            return _cmd_bench(args)
        raise _UsageError(f"unknown command {args.command!r}")
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ParseError, model.ValidationError) as exc:
        print(f"invalid instance: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"invalid instance: {exc}", file=sys.stderr)
        return 2
    except (engine.EngineError, gpoly.SolveFailure, gpoly.StructureViolation) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run_cli())
