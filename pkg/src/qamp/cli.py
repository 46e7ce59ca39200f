"""Command-line surface: parameter sweeps, grids and figure presets.

One subcommand per report type (gain, noise, mandel, squeezing, wigner,
thermal, oracle).  Shipped presets fig1 to fig5 carry the parameter sets of
the five reference figures; ``qamp run --preset figN`` reproduces each data
set, and any flag can override a preset or config-file value.  Outputs are
deterministic: identical configuration gives byte-identical files (floats at
17 significant digits, sorted JSON keys, no timestamps).

Exit codes: 0 success, 2 configuration error, 3 numeric failure (quadrature
tolerance or truncation safety).
"""

from __future__ import annotations

import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from importlib import resources
from pathlib import Path

import click
import numpy as np

from . import __version__
from .core import AmplifierParams, gain, gain_factor, population_ratio
from .errors import ConfigError, NumericsError
from .fields import InputField
from .noise import added_noise, added_noise_limit, delta, m_width
from .oracle import evolve, rho_from_field, truncation_dim
from .phasespace import GridSpec, quasiprob_grid
from .stats import (mandel_q, mandel_zero_time, mean_amplitude,
                    mean_photon_number, output_fluctuations,
                    quadrature_variances, squeezing_loss_time)
from .thermal import DIMENSIONLESS, KELVIN, ThermalState, entropy, entropy_slope, temperature

PRESET_NAMES = ("fig1", "fig2", "fig3", "fig4", "fig5")

_DEFAULTS = {
    "aprime": 1.0,
    "bprime": None,
    "nb": 0.0,
    "tau0": 0.0,
    "omega0": 0.0,
    "epsilon": 1.0,
    "input": None,
    "tau_start": 0.0,
    "tau_end": 10.0,
    "samples": 201,
    "format": "csv",
    "sweep_aprime": None,
    "points": 256,
    "p_order": 0,
    "wigner_times": None,
    "dim": None,
    "step": 1e-4,
    "on_unsafe": "abort",
    "slope_window": None,
    "slope_grid": None,
    "plot": False,
}

_COMMAND_INPUTS = {
    "gain": "coherent:1,0",
    "noise": "coherent:10,0",
    "mandel": "fock:5",
    "squeezing": "squeezed:1,0",
    "wigner": "coherent:1,0",
    "thermal": None,           # defaults to thermal:<nb>, the equilibrium input
    "oracle": "coherent:2,0",
}


# ----------------------------------------------------------------------
# configuration resolution
# ----------------------------------------------------------------------

def load_preset(name: str) -> dict:
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")
    text = resources.files("qamp.presets").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def parse_input(spec: str) -> InputField:
    kind, _, rest = spec.partition(":")
    try:
        if kind == "coherent":
            parts = [float(v) for v in rest.split(",")] if rest else [0.0]
            re, im = (parts + [0.0])[:2]
            return InputField.coherent(complex(re, im))
        if kind == "fock":
            return InputField.fock(int(rest))
        if kind == "squeezed":
            parts = [float(v) for v in rest.split(",")] if rest else [0.0]
            r, phi = (parts + [0.0])[:2]
            return InputField.squeezed(r, phi)
        if kind == "thermal":
            return InputField.thermal(float(rest))
    except (ValueError, TypeError) as err:
        raise ConfigError(f"bad input field {spec!r}: {err}") from None
    raise ConfigError(f"unknown input kind {kind!r} in {spec!r} "
                      "(expected coherent:RE,IM | fock:N | squeezed:R,PHI | thermal:NBAR)")


def resolve_config(command: str, preset: str | None, config_path: str | None,
                   overrides: dict) -> dict:
    cfg = dict(_DEFAULTS)
    cfg["command"] = command
    if preset:
        data = load_preset(preset)
        preset_command = data.pop("command")
        if command == "run":
            cfg["command"] = preset_command
        elif command != preset_command:
            raise ConfigError(f"preset {preset!r} belongs to command "
                              f"{preset_command!r}, not {command!r}")
        cfg.update(data)
        cfg["preset"] = preset
    elif command == "run":
        raise ConfigError("run requires --preset")
    if config_path:
        try:
            with open(config_path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config {config_path}: {err}") from None
        unknown = set(data) - set(_DEFAULTS) - {"command"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(data)
    for key, value in overrides.items():
        if value is not None and value is not False:
            cfg[key] = value
    if cfg["input"] is None:
        fallback = _COMMAND_INPUTS.get(cfg["command"])
        cfg["input"] = fallback if fallback is not None else f"thermal:{cfg['nb']:g}"
    _validate(cfg)
    return cfg


def _validate(cfg: dict):
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg['format']!r}")
    if int(cfg["samples"]) < 2:
        raise ConfigError(f"samples must be >= 2, got {cfg['samples']}")
    if cfg["tau_start"] < 0.0:
        raise ConfigError(f"tau-start must be >= 0, got {cfg['tau_start']}")
    if cfg["tau_end"] <= cfg["tau_start"]:
        raise ConfigError("tau-end must exceed tau-start")
    if cfg["aprime"] <= 0.0:
        raise ConfigError(f"aprime must be > 0, got {cfg['aprime']}")
    if cfg["nb"] < 0.0:
        raise ConfigError(f"nb must be >= 0, got {cfg['nb']}")
    if cfg["bprime"] is not None and cfg["bprime"] < 0.0:
        raise ConfigError(f"bprime must be >= 0, got {cfg['bprime']}")
    if cfg["sweep_aprime"] is not None and any(a <= 0.0 for a in cfg["sweep_aprime"]):
        raise ConfigError("every sweep aprime must be > 0")
    if cfg["command"] == "wigner":
        if int(cfg["points"]) < 16:
            raise ConfigError("wigner grids need points >= 16")
        if cfg["p_order"] not in (-1, 0, 1):
            raise ConfigError("p-order must be -1, 0 or 1")
    field = parse_input(cfg["input"])
    if cfg["command"] == "thermal" and field.kind != "thermal":
        raise ConfigError("the thermal report needs a thermal input state")
    if cfg["command"] == "wigner" and field.kind == "fock":
        raise ConfigError("Fock inputs have no Gaussian quasiprobability grid; "
                          "use the moment reports instead")


def make_params(cfg: dict, aprime: float) -> AmplifierParams:
    bprime = cfg["bprime"] if cfg["bprime"] is not None else aprime * cfg["nb"]
    return AmplifierParams(aprime=aprime, bprime=bprime, tau0=cfg["tau0"],
                           omega0=cfg["omega0"], epsilon=cfg["epsilon"])


def cells_of(cfg: dict):
    sweep = cfg["sweep_aprime"]
    if not sweep:
        return [("", make_params(cfg, cfg["aprime"]))]
    return [(f"aprime{a:g}", make_params(cfg, a)) for a in sweep]


def thread_count(n_jobs: int) -> int:
    env = os.environ.get("QAMP_THREADS", "").strip()
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise ConfigError(f"QAMP_THREADS must be an integer, got {env!r}")
        if cap < 1:
            raise ConfigError("QAMP_THREADS must be >= 1")
        return min(cap, n_jobs)
    return min(4, n_jobs)


# ----------------------------------------------------------------------
# per-command series
# ----------------------------------------------------------------------

def _taus(cfg):
    return np.linspace(cfg["tau_start"], cfg["tau_end"], int(cfg["samples"]))


def series_gain(params, field, taus, cfg):
    cols = {"tau": taus, "G": gain(params, taus), "W": gain_factor(params, taus)}
    return cols, {}


def series_noise(params, field, taus, cfg):
    cols = {
        "tau": taus,
        "delta": delta(params, taus),
        "added_noise": added_noise(params, taus),
        "out_fluct": output_fluctuations(params, field, taus),
        "m": m_width(params, taus),
    }
    limit = added_noise_limit(params)
    return cols, {"caves_limit": 0.5 + params.n_medium,
                  "asymptotic_added_noise": limit if math.isfinite(limit) else None}


def series_mandel(params, field, taus, cfg):
    cols = {"tau": taus, "Q": mandel_q(params, field, taus),
            "G": gain(params, taus)}
    summary = {}
    if field.kind == "fock":
        tau_q = mandel_zero_time(params, field, tau_max=cfg["tau_end"])
        if tau_q is not None:
            summary = {"tau_q": tau_q, "gain_at_tau_q": float(gain(params, tau_q))}
    return cols, summary


def series_squeezing(params, field, taus, cfg):
    var_u, var_v = quadrature_variances(params, field, taus)
    retained = (var_u < 0.5).astype(float)
    cols = {"tau": taus, "var_u": var_u, "var_v": var_v,
            "retained": retained, "G": gain(params, taus)}
    summary = {}
    if field.kind == "squeezed" and field.r > 0.0:
        t_loss = squeezing_loss_time(params, field, tau_max=cfg["tau_end"])
        if t_loss is not None:
            summary = {"loss_time": t_loss, "gain_at_loss": float(gain(params, t_loss))}
    return cols, summary


def series_thermal(params, field, taus, cfg):
    unit = KELVIN if params.omega0 > 0.0 else DIMENSIONLESS
    state = ThermalState(nbar_in=field.nbar, omega0=params.omega0, unit_mode=unit)
    cols = {
        "tau": taus,
        "mean_n": mean_photon_number(params, field, taus),
        "T": temperature(params, state, taus),
        "S": entropy(params, state, taus),
        "N2_over_N1": population_ratio(params, taus),
    }
    summary = {"temperature_unit": unit}
    window = cfg["slope_window"]
    if window and window[1] <= cfg["tau_end"]:
        summary["entropy_slope"] = entropy_slope(params, state, tuple(window))
    return cols, summary


SERIES = {"gain": series_gain, "noise": series_noise, "mandel": series_mandel,
          "squeezing": series_squeezing, "thermal": series_thermal}


# ----------------------------------------------------------------------
# output files
# ----------------------------------------------------------------------

def _fmt(x) -> str:
    return f"{float(x):.17g}"


def write_series_csv(path: Path, cols: dict):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(cols.keys()) + "\n")
        arrays = [np.asarray(v, dtype=float) for v in cols.values()]
        for row in zip(*arrays):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_sidecar(path: Path, cfg: dict, cells: list):
    payload = {"config": _echo(cfg), "cells": cells}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _echo(cfg: dict) -> dict:
    return {k: v for k, v in sorted(cfg.items()) if k != "plot"}


def run_series_command(cfg: dict, out: str):
    compute = SERIES[cfg["command"]]
    field = parse_input(cfg["input"])
    taus = _taus(cfg)
    cells = cells_of(cfg)
    stem = Path(out)
    stem.parent.mkdir(parents=True, exist_ok=True)

    def job(item):
        label, params = item
        cols, summary = compute(params, field, taus, cfg)
        return label, params, cols, summary

    with ThreadPoolExecutor(max_workers=thread_count(len(cells))) as pool:
        results = list(pool.map(job, cells))

    sidecar_cells = []
    rendered = []
    for label, params, cols, summary in results:
        entry = {"label": label or "single", "params": asdict(params),
                 "summary": summary}
        if cfg["format"] == "csv":
            suffix = f"_{label}" if label else ""
            csv_path = stem.with_name(stem.name + suffix + ".csv")
            write_series_csv(csv_path, cols)
            entry["file"] = csv_path.name
        else:
            entry["columns"] = {k: [_fmt(v) for v in np.asarray(vals, dtype=float)]
                                for k, vals in cols.items()}
        sidecar_cells.append(entry)
        rendered.append((label, params, cols, summary))
        for key, val in summary.items():
            if isinstance(val, float):
                click.echo(f"{entry['label']}: {key} = {val:.6g}")
    write_sidecar(stem.with_suffix(".json"), cfg, sidecar_cells)
    if cfg["plot"]:
        from . import plotting
        png = plotting.render_series(cfg, rendered, stem)
        click.echo(f"figure written to {png}")
    click.echo(f"wrote {stem.with_suffix('.json')}")


def run_wigner(cfg: dict, out: str):
    field = parse_input(cfg["input"])
    times = cfg["wigner_times"] or [cfg["tau_end"]]
    cells = cells_of(cfg)
    stem = Path(out)
    stem.parent.mkdir(parents=True, exist_ok=True)
    spec = GridSpec(points=int(cfg["points"]))
    sidecar_cells = []
    grids = []
    for label, params in cells:
        for t in times:
            grid = quasiprob_grid(params, field, float(t), int(cfg["p_order"]),
                                  spec, rotating_frame=True)
            suffix = (f"_{label}" if label else "") + f"_tau{t:g}"
            csv_path = stem.with_name(stem.name + suffix + ".csv")
            grid.write_csv(csv_path)
            grid.write_json(csv_path.with_suffix(".json"))
            sidecar_cells.append({"label": label or "single", "tau": float(t),
                                  "file": csv_path.name,
                                  "normalization": grid.integral()})
            grids.append((label, grid))
    write_sidecar(stem.with_suffix(".json"), cfg, sidecar_cells)
    if cfg["plot"]:
        from . import plotting
        png = plotting.render_wigner(cfg, grids, stem)
        click.echo(f"figure written to {png}")
    click.echo(f"wrote {stem.with_suffix('.json')}")


def run_oracle(cfg: dict, out: str):
    field = parse_input(cfg["input"])
    cells = cells_of(cfg)
    stem = Path(out)
    stem.parent.mkdir(parents=True, exist_ok=True)
    reports = []
    for label, params in cells:
        expected = float(mean_photon_number(params, field, cfg["tau_end"]))
        dim = int(cfg["dim"]) if cfg["dim"] else truncation_dim(expected)
        result = evolve(rho_from_field(field, dim), params, cfg["tau_end"],
                        float(cfg["step"]), sample_interval=0.05,
                        on_unsafe=cfg["on_unsafe"])
        deltas = _analytic_deltas(params, field, result)
        reports.append({
            "label": label or "single",
            "params": asdict(params),
            "dim": dim,
            "step": float(cfg["step"]),
            "truncation_safe": result.truncation_safe,
            "max_trace_drift": float(result.trace_drift.max()),
            "max_leakage": float(result.leakage.max()),
            "analytic_deltas": deltas,
            "series": {
                "tau": [_fmt(t) for t in result.taus],
                "mean_a_re": [_fmt(v) for v in result.mean_a.real],
                "mean_a_im": [_fmt(v) for v in result.mean_a.imag],
                "mean_n": [_fmt(v) for v in result.mean_n],
                "sym_fluct": [_fmt(v) for v in result.sym_fluct],
                "leakage": [_fmt(v) for v in result.leakage],
            },
        })
        click.echo(f"{label or 'single'}: max |<n>_num - <n>_analytic| = "
                   f"{deltas['mean_n']:.3e} (dim={dim}, safe={result.truncation_safe})")
    payload = {"config": _echo(cfg), "reports": reports}
    with open(stem.with_suffix(".json"), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    click.echo(f"wrote {stem.with_suffix('.json')}")


def _analytic_deltas(params, field, result):
    d_a = d_n = d_f = 0.0
    for k, tau in enumerate(result.taus):
        d_a = max(d_a, abs(result.mean_a[k] - complex(mean_amplitude(params, field, tau))))
        d_n = max(d_n, abs(result.mean_n[k] - float(mean_photon_number(params, field, tau))))
        d_f = max(d_f, abs(result.sym_fluct[k] - float(output_fluctuations(params, field, tau))))
    return {"mean_a": d_a, "mean_n": d_n, "sym_fluct": d_f}


# ----------------------------------------------------------------------
# click wiring
# ----------------------------------------------------------------------

def _series_options(fn):
    decorators = [
        click.option("--preset", type=str, default=None, help="Shipped preset name (fig1..fig5)."),
        click.option("--config", "config_path", type=click.Path(), default=None,
                     help="JSON config file matching the run schema."),
        click.option("--out", type=str, default=None, help="Output stem path."),
        click.option("--format", "format_", type=click.Choice(["csv", "json"]), default=None),
        click.option("--aprime", type=float, default=None, help="Gain factor over onset rate."),
        click.option("--bprime", type=float, default=None, help="Thermal floor over onset rate."),
        click.option("--nb", type=float, default=None, help="Medium occupation B/A."),
        click.option("--tau0", type=float, default=None, help="Inversion instant."),
        click.option("--omega0", type=float, default=None, help="Field frequency (rad/s)."),
        click.option("--epsilon", type=float, default=None, help="Onset rate (1/s)."),
        click.option("--input", "input_", type=str, default=None,
                     help="coherent:RE,IM | fock:N | squeezed:R,PHI | thermal:NBAR"),
        click.option("--tau-start", type=float, default=None),
        click.option("--tau-end", type=float, default=None),
        click.option("--samples", type=int, default=None),
        click.option("--plot", is_flag=True, default=False,
                     help="Render a matplotlib figure next to the data files."),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


def _collect_overrides(kw):
    mapping = {"format_": "format", "input_": "input"}
    return {mapping.get(k, k): v for k, v in kw.items()
            if k not in ("preset", "config_path", "out")}


def _dispatch(command, preset, config_path, out, kw):
    try:
        cfg = resolve_config(command, preset, config_path, _collect_overrides(kw))
        out = out or preset or cfg["command"]
        runner = {"wigner": run_wigner, "oracle": run_oracle}.get(cfg["command"], run_series_command)
        runner(cfg, out)
        if cfg.get("wigner_times") and cfg["command"] != "wigner" and preset:
            # presets may bundle phase-space snapshots with a series (fig3)
            wcfg = dict(cfg)
            wcfg["command"] = "wigner"
            run_wigner(wcfg, out + "_wigner")
    except ConfigError as err:
        raise click.UsageError(str(err))
    except NumericsError as err:
        click.echo(f"numeric failure: {err}", err=True)
        sys.exit(3)


@click.group()
@click.version_option(__version__)
def main():
    """Transient linear-amplifier sweeps, phase-space grids and oracle runs."""


@main.command(name="run")
@_series_options
def run_cmd(preset, config_path, out, **kw):
    """Reproduce a shipped figure preset end to end."""
    _dispatch("run", preset, config_path, out, kw)


def _make_series_command(name, doc):
    @main.command(name=name, help=doc)
    @_series_options
    def _cmd(preset, config_path, out, **kw):
        _dispatch(name, preset, config_path, out, kw)
    _cmd.__name__ = f"cmd_{name}"
    return _cmd


cmd_gain = _make_series_command("gain", "Gain G and gain factor W over time.")
cmd_noise = _make_series_command("noise", "Accumulated noise, added noise, output fluctuation and width m.")
cmd_mandel = _make_series_command("mandel", "Mandel Q evolution with the zero-crossing summary.")
cmd_squeezing = _make_series_command("squeezing", "Quadrature variances and squeezing retention.")
cmd_thermal = _make_series_command("thermal", "Occupation, temperature, entropy and population ratio.")


@main.command(name="wigner")
@_series_options
@click.option("--times", type=str, default=None, help="Comma-separated snapshot times.")
@click.option("--points", type=int, default=None, help="Grid points per axis.")
@click.option("--p-order", "p_order", type=int, default=None, help="-1 Q, 0 Wigner, +1 P.")
def cmd_wigner(preset, config_path, out, times, **kw):
    """Quasiprobability grids at chosen times."""
    if times is not None:
        try:
            kw["wigner_times"] = [float(t) for t in times.split(",")]
        except ValueError:
            raise click.UsageError(f"bad --times value {times!r}")
    _dispatch("wigner", preset, config_path, out, kw)


@main.command(name="oracle")
@_series_options
@click.option("--dim", type=int, default=None, help="Fock truncation (default: sized from <n>).")
@click.option("--step", type=float, default=None, help="Fixed integration step.")
@click.option("--on-unsafe", "on_unsafe", type=click.Choice(["abort", "flag"]), default=None,
              help="Behavior when truncation leaks: abort (default) or flag and continue.")
def cmd_oracle(preset, config_path, out, **kw):
    """Truncated-Fock evolution with analytic-difference report."""
    _dispatch("oracle", preset, config_path, out, kw)


if __name__ == "__main__":
    main()
