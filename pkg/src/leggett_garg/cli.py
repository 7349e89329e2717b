"""
Command line interface.

    lgi kaon-scan | kaon-max | neutrino-scan | neutrino-max
        | oracle-check | equal-spacing | fig1 {a,b,c}  [options]

Settings resolve as built-in defaults < ``--config`` file < flags. Exit codes:
0 success, 2 usage or configuration error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kaon, neutrino, oracle, scan
from .errors import NumericalError, ParameterError
from .lgi import violation_ratio
from .params import (
    KaonParams,
    NeutrinoParams,
    check_keys,
    kamland_params,
    kaon_params_from_dict,
    load_config,
    neutrino_params_from_dict,
    reference_kaon_params,
)

log = logging.getLogger("leggett_garg")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
ORACLE_THRESHOLD = 1e-10

# flag dest -> (config section, key)
FLAG_KEYS = {
    "system": ("run", "system"),
    "cp": ("kaon", "cp_enabled"),
    "eps_abs": ("kaon", "eps_abs"),
    "eps_re": ("kaon", "eps_re"),
    "tau_s": ("kaon", "tau_s"),
    "tau_l": ("kaon", "tau_l"),
    "delta_m_mev": ("kaon", "delta_m"),
    "delta_m2_ev2": ("neutrino", "delta_m2_ev2"),
    "tan2_theta": ("neutrino", "tan2_theta"),
    "theta_rad": ("neutrino", "theta_rad"),
    "t1_tau_s": ("run", "t1_tau_s"),
    "dt_min": ("run", "dt_min"),
    "dt_max": ("run", "dt_max"),
    "steps": ("run", "steps"),
    "loe_min": ("run", "loe_min"),
    "loe_max": ("run", "loe_max"),
    "seed": ("run", "seed"),
    "samples": ("run", "samples"),
    "out": ("run", "out"),
    "format": ("run", "format"),
    "tol": ("run", "tol"),
}
RUN_KEYS = tuple(key for section, key in FLAG_KEYS.values() if section == "run")

# Per-command defaults for the run section.
COMMAND_DEFAULTS = {
    "kaon-scan": dict(t1_tau_s=5.3, dt_min=0.01, dt_max=10.0, steps=1000),
    "kaon-max": dict(dt_min=None, dt_max=10.0, steps=400, tol=1e-6),
    "neutrino-scan": dict(loe_min=0.0, loe_max=100.0, steps=2001),
    "neutrino-max": dict(loe_min=0.0, loe_max=100.0, steps=20001, tol=1e-9),
    "oracle-check": dict(system="kaon", samples=1000),
    "equal-spacing": dict(system="kaon", samples=1000, tol=1e-6, steps=None),
    "fig1-a": dict(t1_tau_s=5.3, dt_min=0.01, dt_max=10.0, steps=1000),
    "fig1-b": dict(t1_tau_s=5.3, dt_min=0.70, dt_max=0.88, steps=361),
    "fig1-c": dict(loe_min=0.0, loe_max=100.0, steps=2001),
}
BASE_RUN_DEFAULTS = dict(
    system=None,
    t1_tau_s=5.3,
    dt_min=0.01,
    dt_max=10.0,
    steps=1000,
    loe_min=0.0,
    loe_max=100.0,
    seed=scan.DEFAULT_SEED,
    samples=1000,
    out=None,
    format="csv",
    tol=1e-6,
)


@dataclass(frozen=True)
class RunConfig:
    system: str | None
    kaon: KaonParams
    neutrino: NeutrinoParams
    t1_tau_s: float
    dt_min: float | None
    dt_max: float
    steps: int | None
    loe_min: float
    loe_max: float
    seed: int
    samples: int
    out: str | None
    format: str
    tol: float


# -- config resolution ------------------------------------------------------


def flags_to_config(args: argparse.Namespace) -> dict:
    """Config fragment holding only the flags that were given."""
    config: dict = {}
    for dest, (section, key) in FLAG_KEYS.items():
        value = getattr(args, dest, None)
        if value is None:
            continue
        if dest == "cp":
            value = value == "on"
        config.setdefault(section, {})[key] = value
    return config


def config_to_argv(config: dict) -> list:
    """Inverse of ``flags_to_config``: flags reproducing a config mapping."""
    argv = []
    for dest, (section, key) in FLAG_KEYS.items():
        if key not in config.get(section, {}):
            continue
        value = config[section][key]
        if dest == "cp":
            value = "on" if value else "off"
        argv += ["--" + dest.replace("_", "-"), str(value) if not isinstance(value, float) else repr(value)]
    return argv


def merge_configs(base: dict, override: dict) -> dict:
    merged = {section: dict(values) for section, values in base.items()}
    for section, values in override.items():
        target = merged.setdefault(section, {})
        if section == "neutrino" and ({"theta_rad", "tan2_theta"} & set(values)):
            target.pop("theta_rad", None)
            target.pop("tan2_theta", None)
        target.update(values)
    return merged


def resolve(config: dict, command: str) -> RunConfig:
    check_keys("<top level>", config, ("kaon", "neutrino", "run"))
    run_section = config.get("run", {})
    check_keys("run", run_section, RUN_KEYS)

    kaon_section = dict(config.get("kaon", {}))
    base_kaon = reference_kaon_params()
    if "eps_abs" in kaon_section and "eps_re" not in kaon_section:
        # Hold Re(eps)/|eps| at the reference ratio when only |eps| is varied.
        kaon_section["eps_re"] = base_kaon.eps_re * float(kaon_section["eps_abs"]) / base_kaon.eps_abs
    kaon_p = kaon_params_from_dict(kaon_section, base_kaon)
    neutrino_p = neutrino_params_from_dict(config.get("neutrino", {}), kamland_params())

    run = dict(BASE_RUN_DEFAULTS)
    run.update(COMMAND_DEFAULTS.get(command, {}))
    run.update(run_section)
    try:
        rc = RunConfig(
            system=run["system"],
            kaon=kaon_p,
            neutrino=neutrino_p,
            t1_tau_s=float(run["t1_tau_s"]),
            dt_min=None if run["dt_min"] is None else float(run["dt_min"]),
            dt_max=float(run["dt_max"]),
            steps=None if run["steps"] is None else int(run["steps"]),
            loe_min=float(run["loe_min"]),
            loe_max=float(run["loe_max"]),
            seed=int(run["seed"]),
            samples=int(run["samples"]),
            out=run["out"],
            format=str(run["format"]),
            tol=float(run["tol"]),
        )
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"invalid run setting: {exc}") from exc
    if rc.system not in (None, "kaon", "neutrino"):
        raise ParameterError(f"system must be kaon or neutrino, got {rc.system!r}")
    if rc.format not in ("csv", "json"):
        raise ParameterError(f"format must be csv or json, got {rc.format!r}")
    if rc.steps is not None and rc.steps < 2:
        raise ParameterError(f"steps must be >= 2, got {rc.steps}")
    if rc.samples < 1:
        raise ParameterError(f"samples must be >= 1, got {rc.samples}")
    if not rc.tol > 0:
        raise ParameterError(f"tol must be positive, got {rc.tol}")
    return rc


# -- output -------------------------------------------------------------------


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def render(rows: list, columns: list, fmt: str) -> str:
    if fmt == "json":
        clean = [{c: _json_value(row.get(c)) for c in columns} for row in rows]
        return json.dumps(clean, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


def _json_value(value):
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def emit(text: str, out) -> None:
    if out:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise ParameterError(f"cannot write {out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def emit_report(report: dict, rc: RunConfig) -> None:
    if rc.format == "csv":
        emit(render([report], list(report), "csv"), rc.out)
    else:
        emit(json.dumps({k: _json_value(v) for k, v in report.items()}, indent=2) + "\n", rc.out)


# -- evaluation helpers --------------------------------------------------------


def _axis(lo, hi, steps, what):
    if lo is None or hi is None or not lo < hi:
        raise ParameterError(f"empty {what} range [{lo}, {hi}]")
    return np.linspace(lo, hi, steps)


def kaon_rows(params: KaonParams, t1: float, dts: np.ndarray):
    """C and its correlators along dt at fixed t1; failing points become error rows."""
    try:
        ev = kaon.lgi_c_equal_spacing(params, np.full_like(dts, t1), dts)
        values = [(ev.c[i], ev.c12[i], ev.c23[i], ev.c34[i], ev.c14[i], None) for i in range(len(dts))]
    except (NumericalError, ParameterError):
        values = []
        for dt in dts:
            try:
                ev = kaon.lgi_c_equal_spacing(params, t1, float(dt))
                values.append((ev.c, ev.c12, ev.c23, ev.c34, ev.c14, None))
            except NumericalError as exc:
                values.append((math.nan,) * 5 + (type(exc).__name__,))
    return values


def _write_kaon_table(rc: RunConfig, columns_by_params: dict) -> int:
    dts = _axis(rc.dt_min, rc.dt_max, rc.steps, "dt")
    if rc.dt_min <= 0:
        raise ParameterError("dt range must be positive")
    rows = [{"dt_over_tau_s": float(dt)} for dt in dts]
    errors = False
    for name, (params, full) in columns_by_params.items():
        for row, vals in zip(rows, kaon_rows(params, rc.t1_tau_s, dts)):
            if full:
                row.update(c=vals[0], c12=vals[1], c23=vals[2], c34=vals[3], c14=vals[4])
            else:
                row[name] = vals[0]
            if vals[5]:
                row["error"] = vals[5]
                errors = True
    columns = ["dt_over_tau_s"] + (
        ["c", "c12", "c23", "c34", "c14"]
        if any(full for _, full in columns_by_params.values())
        else list(columns_by_params)
    )
    if errors:
        columns.append("error")
    emit(render(rows, columns, rc.format), rc.out)
    return EXIT_NUMERICAL if errors else EXIT_OK


def _neutrino_rows(rc: RunConfig):
    loes = _axis(rc.loe_min, rc.loe_max, rc.steps, "L/E")
    if rc.loe_min < 0:
        raise ParameterError("L/E range must be non-negative")
    point = neutrino.lgi_c(rc.neutrino, loes)
    return [
        {"l_over_e_km_per_mev": float(l), "phase_rad": float(p), "c": float(c)}
        for l, p, c in zip(point.l_over_e, point.phase, point.c_value)
    ]


# -- commands -------------------------------------------------------------------


def cmd_kaon_scan(rc: RunConfig) -> int:
    return _write_kaon_table(rc, {"c": (rc.kaon, True)})


def cmd_kaon_max(rc: RunConfig) -> int:
    domain = scan.kaon_domain(rc.steps, dt_min=rc.dt_min, dt_max=rc.dt_max)
    result = scan.kaon_max(rc.kaon, domain, rc.tol)
    cp = rc.kaon.cp_enabled and rc.kaon.eps_abs > 0
    emit_report(
        {
            "c_max": result.value,
            "t1": result.x[0] if cp else None,
            "dt": result.x[1],
            "cp_enabled": rc.kaon.cp_enabled,
            "eps_abs": rc.kaon.eps_abs,
            "eps_re": rc.kaon.eps_re,
            "violation_ratio": violation_ratio(result.value),
            "evaluations": result.evaluations,
            "at_boundary": result.at_boundary,
        },
        rc,
    )
    return EXIT_OK


def cmd_neutrino_scan(rc: RunConfig) -> int:
    rows = _neutrino_rows(rc)
    emit(render(rows, ["l_over_e_km_per_mev", "phase_rad", "c"], rc.format), rc.out)
    return EXIT_OK


def cmd_neutrino_max(rc: RunConfig) -> int:
    domain = scan.neutrino_domain(rc.steps, rc.loe_min, rc.loe_max)
    result = scan.neutrino_max(rc.neutrino, domain, rc.tol)
    exact = neutrino.analytic_max(rc.neutrino)
    emit_report(
        {
            "c_max": result.value,
            "l_over_e": result.x[0],
            "c_max_analytic": exact.c_max,
            "l_over_e_first_max": exact.l_over_e_star,
            "phase_period_rad": exact.period,
            "theta_rad": rc.neutrino.theta_rad,
            "violation_ratio": violation_ratio(result.value),
            "evaluations": result.evaluations,
        },
        rc,
    )
    return EXIT_OK


def oracle_discrepancy(system: str, params, samples: int, seed: int) -> dict:
    """Largest |closed form - oracle| over random (t1, t2) pairs."""
    rng = np.random.default_rng(seed)
    if system == "kaon":
        model = oracle.kaon_model(params)
        labels, module, span = list(kaon.Strangeness), kaon, 10.0
    else:
        model = oracle.neutrino_model(params)
        labels, module, span = list(neutrino.Flavor), neutrino, 100.0
    t1s = rng.uniform(0.0, span, samples)
    t2s = t1s + rng.uniform(0.0, span, samples)
    worst_joint = 0.0
    worst_corr = 0.0
    for t1, t2 in zip(t1s, t2s):
        for a in labels:
            for b in labels:
                diff = abs(module.joint_prob(params, a, b, t1, t2) - oracle.oracle_joint(model, a, b, t1, t2))
                worst_joint = max(worst_joint, diff)
        if system == "kaon":
            closed = kaon.correlator(params, t1, t2).value
        else:
            closed = neutrino.correlator(params, t2 - t1)
        worst_corr = max(worst_corr, abs(closed - oracle.oracle_correlator(model, t1, t2)))
    return {
        "system": system,
        "samples": samples,
        "seed": seed,
        "max_joint_discrepancy": worst_joint,
        "max_correlator_discrepancy": worst_corr,
        "threshold": ORACLE_THRESHOLD,
        "passed": max(worst_joint, worst_corr) < ORACLE_THRESHOLD,
    }


def cmd_oracle_check(rc: RunConfig) -> int:
    system = rc.system or "kaon"
    params = rc.kaon if system == "kaon" else rc.neutrino
    report = oracle_discrepancy(system, params, rc.samples, rc.seed)
    emit_report(report, rc)
    return EXIT_OK if report["passed"] else EXIT_NUMERICAL


def cmd_equal_spacing(rc: RunConfig) -> int:
    system = rc.system or "kaon"
    if system == "kaon":
        domain = scan.kaon_domain(rc.steps or 400, dt_max=10.0)
        rep = scan.equal_spacing_optimality(rc.kaon, domain, rc.samples, rc.seed, rc.tol)
    else:
        domain = scan.neutrino_domain(rc.steps or 20001, rc.loe_min, rc.loe_max)
        rep = scan.equal_spacing_optimality(rc.neutrino, domain, rc.samples, rc.seed, rc.tol)
    emit_report(
        {
            "system": rep.system,
            "trials": rep.trials,
            "seed": rep.seed,
            "sampled_max": rep.sampled_max,
            "general_max": rep.general_max,
            "equal_spacing_max": rep.equal_max,
            "gap": rep.gap,
            "general_gaps": ";".join(format_value(g) for g in rep.general_point.gaps),
            "within_1e-3": rep.gap <= 1e-3,
            "below_quantum_bound": rep.bound_ok,
        },
        rc,
    )
    return EXIT_OK


def cmd_fig1(rc: RunConfig, panel: str) -> int:
    if panel == "a":
        name = "c_cp_on" if rc.kaon.cp_enabled else "c_cp_off"
        return _write_kaon_table(rc, {name: (rc.kaon, False)})
    if panel == "b":
        on = rc.kaon if rc.kaon.cp_enabled else reference_kaon_params()
        return _write_kaon_table(rc, {"c_cp_on": (on, False), "c_cp_off": (on.with_cp(False), False)})
    rows = _neutrino_rows(rc)
    emit(render(rows, ["l_over_e_km_per_mev", "phase_rad", "c"], rc.format), rc.out)
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------------


def _options_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("settings")
    g.add_argument("--config", help="JSON config with 'kaon', 'neutrino' and 'run' sections")
    g.add_argument("--system", choices=("kaon", "neutrino"))
    g.add_argument("--cp", choices=("on", "off"))
    g.add_argument("--eps-abs", type=float, help="|eps|; Re(eps) follows unless given")
    g.add_argument("--eps-re", type=float)
    g.add_argument("--tau-s", type=float, help="seconds")
    g.add_argument("--tau-l", type=float, help="seconds")
    g.add_argument("--delta-m-mev", type=float)
    g.add_argument("--delta-m2-ev2", type=float)
    g.add_argument("--tan2-theta", type=float)
    g.add_argument("--theta-rad", type=float)
    g.add_argument("--t1-tau-s", type=float)
    g.add_argument("--dt-min", type=float, help="tau_S")
    g.add_argument("--dt-max", type=float, help="tau_S")
    g.add_argument("--steps", type=int)
    g.add_argument("--loe-min", type=float, help="km/MeV")
    g.add_argument("--loe-max", type=float, help="km/MeV")
    g.add_argument("--seed", type=int)
    g.add_argument("--samples", type=int, help="random samples for oracle-check / equal-spacing")
    g.add_argument("--out")
    g.add_argument("--format", choices=("csv", "json"))
    g.add_argument("--tol", type=float)
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    options = _options_parser()
    parser = argparse.ArgumentParser(
        prog="lgi", description="Leggett-Garg quantity for oscillating kaons and neutrinos"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("kaon-scan", "C and correlators vs dt at fixed t1 (CSV)"),
        ("kaon-max", "refined maximum of C over (t1, dt)"),
        ("neutrino-scan", "C vs L/E (CSV)"),
        ("neutrino-max", "refined maximum of C over L/E"),
        ("oracle-check", "closed forms against the amplitude oracle"),
        ("equal-spacing", "general quads against the equal-spacing maximum"),
    ):
        sub.add_parser(name, parents=[options], help=help_text)
    fig = sub.add_parser("fig1", parents=[options], help="plot-ready data for figure panels")
    fig.add_argument("panel", choices=("a", "b", "c"))
    return parser


COMMANDS = {
    "kaon-scan": cmd_kaon_scan,
    "kaon-max": cmd_kaon_max,
    "neutrino-scan": cmd_neutrino_scan,
    "neutrino-max": cmd_neutrino_max,
    "oracle-check": cmd_oracle_check,
    "equal-spacing": cmd_equal_spacing,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    command = f"fig1-{args.panel}" if args.command == "fig1" else args.command
    try:
        file_config = load_config(args.config) if args.config else {}
        rc = resolve(merge_configs(file_config, flags_to_config(args)), command)
        if args.command == "fig1":
            return cmd_fig1(rc, args.panel)
        return COMMANDS[args.command](rc)
    except ParameterError as exc:
        print(f"lgi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"lgi: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except BrokenPipeError:
        # Downstream closed early (e.g. piped into head).
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
