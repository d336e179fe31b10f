"""Command line front end.

Subcommands:
    report   print the regime analysis for one parameter set
    run      time-step one experiment and write CSV series, profile
             dumps, and companion figures
    sweep    run several thresholds and summarize

Configuration comes from an optional flat key=value file (UTF-8, '#'
comments) plus flags; flags win.  Delimited output is deterministic:
identical configs produce byte-identical CSV bodies, with numbers
printed to 17 significant digits so parsing them back recovers the
exact values.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .diagnostics import DiagnosticsRecord, select_target, target_on_grid
from .errors import LiesegangError, ParseError, ValidationError
from .profiles import (
    ModelParams,
    Regime,
    classify_regime,
    gamma_of_ustar,
    make_profile,
    phi_gamma,
    phi_gamma_derivative,
    psi,
    ustar_of_gamma,
)
from .solver import build_grid, psi_on_grid, run

log = logging.getLogger(__name__)

__all__ = ["RunConfig", "cmd_report", "cmd_run", "cmd_sweep", "main", "parse_config"]

_DEFAULTS: dict[str, object] = {
    "alpha": 1.0,
    "beta": 1.0,
    "ustar": 0.49,
    "n": 200,
    "m": None,  # resolved to d_s = d_eta when not given
    "smax": 40.0,
    "stride": 10,
    "out": "out",
    "profiles_at": (),
    "figures": True,
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration of one run."""

    params: ModelParams
    n: int
    m: int
    s_max: float
    sample_stride: int
    out_dir: str
    emit_profiles_at: tuple[float, ...]
    figures: bool = True


def _fmt(value: object) -> str:
    """Deterministic text form: 17 significant digits for floats."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _parse_float_list(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise ParseError(f"invalid comma-separated number list {text!r}: {exc}") from None


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ParseError(f"invalid boolean {text!r}")


_CONVERTERS = {
    "alpha": float,
    "beta": float,
    "ustar": float,
    "n": int,
    "m": int,
    "smax": float,
    "stride": int,
    "out": str,
    "profiles_at": _parse_float_list,
    "figures": _parse_bool,
}


def _read_config_file(path: str) -> dict[str, object]:
    """Parse a flat key=value file into typed config entries."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read config file {path}: {exc}") from None
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key not in _CONVERTERS:
            raise ParseError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CONVERTERS[key](value)
        except ParseError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None
        except ValueError:
            raise ParseError(f"{path}:{lineno}: invalid value for {key}: {value!r}") from None
    return values


def parse_config(
    flags: Mapping[str, object], config_file: str | None = None
) -> RunConfig:
    """Merge defaults, config file, and flags (flags win) and validate.

    flags maps config keys to already-typed values, with None meaning
    "not given"; profiles_at may arrive as a comma-separated string.
    """
    merged = dict(_DEFAULTS)
    if config_file is not None:
        merged.update(_read_config_file(config_file))
    for key, value in flags.items():
        if key not in _CONVERTERS:
            raise ParseError(f"unknown flag key {key!r}")
        if value is None:
            continue
        if key == "profiles_at" and isinstance(value, str):
            value = _parse_float_list(value)
        merged[key] = value

    try:
        params = ModelParams(
            alpha=float(merged["alpha"]),
            beta=float(merged["beta"]),
            u_star=float(merged["ustar"]),
        )
    except ValueError as exc:
        raise ValidationError(str(exc)) from None

    n = int(merged["n"])
    if n < 2:
        raise ValidationError(f"n must be >= 2, got {n}")
    s_max = float(merged["smax"])
    if not (s_max > 0.0 and math.isfinite(s_max)):
        raise ValidationError(f"smax must be positive and finite, got {s_max}")
    m = merged["m"]
    if m is None:
        # default time step equal to the spatial step
        m = max(1, round(s_max * n / params.alpha))
    m = int(m)
    if m < 0:
        raise ValidationError(f"m must be >= 0, got {m}")
    stride = int(merged["stride"])
    if stride < 1:
        raise ValidationError(f"stride must be >= 1, got {stride}")
    profiles_at = tuple(float(t) for t in merged["profiles_at"])
    for t in profiles_at:
        if not (0.0 <= t <= s_max):
            raise ValidationError(f"profiles-at time {t} outside [0, smax={s_max}]")
    return RunConfig(
        params=params,
        n=n,
        m=m,
        s_max=s_max,
        sample_stride=stride,
        out_dir=str(merged["out"]),
        emit_profiles_at=profiles_at,
        figures=bool(merged["figures"]),
    )


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise LiesegangError(f"cannot write {path}: {exc}") from None


def _target_curve(params: ModelParams, eta: np.ndarray) -> tuple[str, np.ndarray]:
    """Long-time target profile of these parameters on given points."""
    label, _, profile = select_target(params)
    if profile is None:
        values = np.array([psi(params, float(e)) for e in eta])
    else:
        values = np.array([phi_gamma(profile, params, float(e)) for e in eta])
    return label, values


def cmd_report(
    params: ModelParams, out_dir: str | None = None, figures: bool = True
) -> str:
    """Print the closed-form analysis for one parameter set.

    Always reports psi(alpha), u*_0, the regime, and the long-time
    target profile; in the supercritical regime adds the matched gamma,
    kappa, the round-trip source value, the derivative-jump residual,
    and the end of the precipitation-free region alpha_star.
    """
    regime = classify_regime(params)
    label, _, _ = select_target(params)
    lines = [
        f"alpha = {_fmt(params.alpha)}",
        f"beta = {_fmt(params.beta)}",
        f"ustar = {_fmt(params.u_star)}",
        f"psi_alpha = {_fmt(psi(params, params.alpha))}",
        f"ustar_zero = {_fmt(ustar_of_gamma(params, 0.0))}",
        f"regime = {regime.value}",
        f"target = {label}",
    ]
    if regime is Regime.SUPERCRITICAL:
        gamma = gamma_of_ustar(params)
        profile = make_profile(params, gamma)
        left = phi_gamma_derivative(profile, params, params.alpha, "left")
        right = phi_gamma_derivative(profile, params, params.alpha, "right")
        residual = abs(right - left + 0.5 * params.alpha * params.beta)
        from .profiles import alpha_star as _alpha_star

        lines += [
            f"gamma = {_fmt(gamma)}",
            f"kappa = {_fmt(profile.kappa)}",
            f"ustar_gamma = {_fmt(profile.u_star_gamma)}",
            f"jump_residual = {_fmt(residual)}",
            f"alpha_star = {_fmt(_alpha_star(params))}",
        ]
    text = "\n".join(lines) + "\n"
    print(text, end="")
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_text(out / "report.txt", text)
        if figures:
            from .figures import save_family_figure

            eta = np.linspace(0.0, 4.0 * params.alpha, 241)
            curves = [("psi", eta, np.array([psi(params, float(e)) for e in eta]))]
            phi0 = make_profile(params, 0.0)
            curves.append(
                ("phi_0", eta, np.array([phi_gamma(phi0, params, float(e)) for e in eta]))
            )
            if regime is Regime.SUPERCRITICAL:
                matched = make_profile(params, gamma_of_ustar(params))
                curves.append(
                    (
                        "phi_gamma",
                        eta,
                        np.array([phi_gamma(matched, params, float(e)) for e in eta]),
                    )
                )
            save_family_figure(curves, out / "profiles.png")
    return text


def _dump_step(t: float, d_s: float, m: int) -> int:
    """Step index nearest the requested dump time."""
    if d_s <= 0.0:
        return 0
    return min(m, max(0, int(math.floor(t / d_s + 0.5))))


def _diagnostics_csv(record: DiagnosticsRecord) -> str:
    lines = ["s,sup_err,v_alpha,h,gamma_tail,extent_x"]
    for p in record.samples:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (p.s, p.sup_err, p.v_alpha, p.h_val, p.gamma_tail, p.extent_x)
            )
        )
    return "\n".join(lines) + "\n"


def cmd_run(config: RunConfig) -> DiagnosticsRecord:
    """Execute one run and write its output files.

    Writes diagnostics.csv (one row per sampled step), one
    profile_s<value>.csv per requested dump time (taken at the nearest
    step), and run.meta echoing the resolved configuration, the matched
    gamma, and the truncation bound that accompanies the reported
    gamma_tail values.  With figures enabled, companion PNGs land next
    to each CSV.
    """
    params = config.params
    grid = build_grid(params, config.n, config.m, config.s_max)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    psi_vals = psi_on_grid(params, grid)
    label, gamma, target_vals = target_on_grid(params, grid)
    nodes = grid.nodes()

    dump_steps: dict[int, list[float]] = {}
    for t in config.emit_profiles_at:
        dump_steps.setdefault(_dump_step(t, grid.d_s, grid.m), []).append(t)
    dumps: list[tuple[float, np.ndarray]] = []

    def dump_observer(j, s, w, q, i_precip) -> None:
        if j in dump_steps:
            v = np.asarray(w) + psi_vals
            for t in dump_steps[j]:
                dumps.append((t, v.copy()))

    record = run(
        params,
        grid,
        observers=(dump_observer,),
        sample_stride=config.sample_stride,
        extra_sample_steps=dump_steps.keys(),
    )

    _write_text(out / "diagnostics.csv", _diagnostics_csv(record))
    for t, v in dumps:
        lines = ["eta,v,target"]
        for i in range(grid.n_full):
            lines.append(f"{_fmt(nodes[i])},{_fmt(v[i])},{_fmt(target_vals[i])}")
        _write_text(out / f"profile_s{t:g}.csv", "\n".join(lines) + "\n")

    gamma_est = record.matched_gamma if record.matched_gamma > 0 else record.samples[-1].h_val
    meta = [
        f"alpha={_fmt(params.alpha)}",
        f"beta={_fmt(params.beta)}",
        f"ustar={_fmt(params.u_star)}",
        f"n={config.n}",
        f"m={config.m}",
        f"smax={_fmt(config.s_max)}",
        f"stride={config.sample_stride}",
        f"out={config.out_dir}",
        "profiles_at=" + ",".join(f"{t:g}" for t in config.emit_profiles_at),
        f"figures={_fmt(config.figures)}",
        f"regime={classify_regime(params).value}",
        f"target={label}",
        f"gamma={_fmt(record.matched_gamma)}",
        f"gamma_tail_truncation={_fmt(0.5 * gamma_est)}",
    ]
    _write_text(out / "run.meta", "\n".join(meta) + "\n")

    if config.figures:
        from .figures import save_diagnostics_figure, save_profile_figure

        save_diagnostics_figure(record, params.u_star, out / "diagnostics.png")
        for t, v in dumps:
            save_profile_figure(nodes, v, target_vals, t, label, out / f"profile_s{t:g}.png")
    return record


def cmd_sweep(base: RunConfig, u_star_values: Sequence[float]) -> list[tuple]:
    """Run one experiment per threshold value and summarize.

    Each run gets its own directory under the base output directory
    (duplicate thresholds are suffix-indexed); a failing run is
    recorded in the summary and does not stop the rest.
    """
    out = Path(base.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows: list[tuple] = []
    family: list[tuple[str, np.ndarray, np.ndarray]] = []
    eta = np.linspace(0.0, 4.0 * base.params.alpha, 241)
    seen: dict[str, int] = {}
    for u in u_star_values:
        stem = f"ustar{u:g}"
        seen[stem] = seen.get(stem, 0) + 1
        name = stem if seen[stem] == 1 else f"{stem}_{seen[stem]}"
        try:
            params = ModelParams(base.params.alpha, base.params.beta, float(u))
            config = replace(base, params=params, out_dir=str(out / name))
            record = cmd_run(config)
            last = record.samples[-1]
            rows.append(
                (u, classify_regime(params).value, record.matched_gamma, last.sup_err, last.h_val)
            )
            label, values = _target_curve(params, eta)
            family.append((f"{label}, u*={u:g}", eta, values))
        except Exception as exc:  # per-run isolation is the contract here
            log.warning("sweep run %s failed: %s", name, exc)
            rows.append((u, "error", math.nan, math.nan, math.nan))
    lines = ["ustar,regime,gamma,final_sup_err,final_h"]
    for u, regime, gamma, sup_err, h_val in rows:
        lines.append(
            f"{_fmt(u)},{regime},{_fmt(gamma)},{_fmt(sup_err)},{_fmt(h_val)}"
        )
    _write_text(out / "sweep_summary.csv", "\n".join(lines) + "\n")
    if base.figures and family:
        from .figures import save_family_figure

        save_family_figure(family, out / "profile_family.png")
    return rows


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="flat key=value config file")
    parser.add_argument("--alpha", type=float, help="source position (default 1)")
    parser.add_argument("--beta", type=float, help="source strength (default 1)")
    parser.add_argument(
        "--figures",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="render companion PNG figures (default on)",
    )
    parser.add_argument("--out", help="output directory (default ./out)")


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, help="cells on [0, alpha] (default 200)")
    parser.add_argument(
        "--m", type=int, help="time steps (default: step size equal to d_eta)"
    )
    parser.add_argument("--smax", type=float, help="final similarity time (default 40)")
    parser.add_argument("--stride", type=int, help="sampling stride in steps (default 10)")
    parser.add_argument(
        "--profiles-at",
        dest="profiles_at",
        metavar="S1,S2,...",
        help="comma list of s values at which to dump profiles",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liesegang",
        description="Liesegang ring simulator in parabolic similarity coordinates",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_report = sub.add_parser("report", help="print regime analysis for one parameter set")
    _add_param_flags(p_report)
    p_report.add_argument("--ustar", type=float, help="precipitation threshold")

    p_run = sub.add_parser("run", help="time-step one experiment and write outputs")
    _add_param_flags(p_run)
    p_run.add_argument("--ustar", type=float, help="precipitation threshold")
    _add_run_flags(p_run)

    p_sweep = sub.add_parser("sweep", help="run several thresholds and summarize")
    _add_param_flags(p_sweep)
    p_sweep.add_argument(
        "--ustar",
        metavar="U1,U2,...",
        help="comma list of thresholds, one run each",
    )
    _add_run_flags(p_sweep)
    return parser


def _flags_from_namespace(ns: argparse.Namespace, skip: tuple[str, ...] = ()) -> dict:
    flags = {}
    for key in _CONVERTERS:
        if key in skip:
            continue
        flags[key] = getattr(ns, key, None)
    return flags


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point for the console script."""
    ns = _build_parser().parse_args(argv)
    try:
        if ns.command == "report":
            config = parse_config(_flags_from_namespace(ns), ns.config)
            # files are written only on an explicit --out; otherwise print only
            out_dir = ns.out
            cmd_report(config.params, out_dir=out_dir, figures=config.figures)
        elif ns.command == "run":
            config = parse_config(_flags_from_namespace(ns), ns.config)
            cmd_run(config)
        elif ns.command == "sweep":
            config = parse_config(_flags_from_namespace(ns, skip=("ustar",)), ns.config)
            if ns.ustar is not None:
                values = _parse_float_list(ns.ustar)
            else:
                values = (config.params.u_star,)
            cmd_sweep(config, values)
    except LiesegangError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0
