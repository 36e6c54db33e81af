"""Scenario runner reproducing the desk-scale experiments, with file I/O
for configs, traces, curves, and machine-readable summaries.

Scenario files are JSON with field names mirroring the domain types
(currents in amperes, times in seconds, temperatures in kelvin). Unknown
keys are rejected. All artifacts are deterministic: identical scenario
files yield byte-identical outputs.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import analysis, devicemap, dynamics
from .model import BiasConfiguration, InputSignal, ParameterError, SigmoidParams
from .presets import PRESETS, get_preset

__all__ = [
    "Scenario",
    "ConfigError",
    "load_config",
    "save_config",
    "export_trace",
    "import_trace",
    "export_curves",
    "run_scenario",
    "bias_to_dict",
    "bias_from_dict",
]

SCENARIO_KINDS = (
    "simulate",
    "staircase",
    "neuromod-sweep",
    "temperature-sweep",
    "inactivation-compare",
    "curves",
    "classify",
)

TRACE_HEADER = ["t_s", "i_f_A", "i_s_A", "i_u_A", "i_app_A", "spike"]

# Solver defaults when a scenario omits them.
DEFAULT_DT_TAU_F_FRACTION = 1.0 / 40.0
DEFAULT_T_END_TAU_U_MULTIPLE = 17.5


class ConfigError(ValueError):
    """Malformed or incomplete scenario/config file."""


@dataclass
class Scenario:
    """One runnable experiment; kind-specific fields must be present."""

    kind: str
    bias: BiasConfiguration
    preset: Optional[str] = None
    input: Optional[InputSignal] = None
    dt: Optional[float] = None
    t_end: Optional[float] = None
    record_stride: int = 1
    # staircase
    amplitudes: Optional[list[float]] = None
    level_duration: Optional[float] = None
    # neuromod-sweep
    param: str = "sig_s.i_gain0"
    start: Optional[float] = None
    stop: Optional[float] = None
    steps: int = 16
    confirm: bool = True
    # temperature-sweep
    temperatures: Optional[list[float]] = None
    t_ref: float = 298.15
    # curves / classify
    grid_min: float = 0.0
    grid_max: Optional[float] = None
    resolution: int = 1024

    def validate(self) -> None:
        if self.kind not in SCENARIO_KINDS:
            raise ConfigError(f"unknown scenario kind {self.kind!r}")
        if self.kind in ("simulate", "inactivation-compare") and self.input is None:
            raise ConfigError(f"{self.kind} scenario requires 'input'")
        if self.kind == "staircase":
            if not self.amplitudes or self.level_duration is None:
                raise ConfigError("staircase scenario requires 'amplitudes' and 'level_duration'")
            if self.level_duration <= 3.0 * self.bias.tau_u:
                raise ConfigError(
                    "staircase level_duration must exceed the 3*tau_u settling window"
                )
        if self.kind == "neuromod-sweep" and (self.start is None or self.stop is None):
            raise ConfigError("neuromod-sweep scenario requires 'start' and 'stop'")
        if self.kind == "temperature-sweep" and not self.temperatures:
            raise ConfigError("temperature-sweep scenario requires 'temperatures'")

    def solver_options(self) -> dynamics.SolverOptions:
        dt = self.dt if self.dt is not None else self.bias.tau_f * DEFAULT_DT_TAU_F_FRACTION
        t_end = (
            self.t_end
            if self.t_end is not None
            else self.bias.tau_u * DEFAULT_T_END_TAU_U_MULTIPLE
        )
        return dynamics.SolverOptions(dt=dt, t_end=t_end, record_stride=self.record_stride)


def bias_to_dict(cfg: BiasConfiguration) -> dict:
    return {
        "tau_f": cfg.tau_f,
        "tau_s": cfg.tau_s,
        "tau_u": cfg.tau_u,
        "g_f": cfg.g_f,
        "g_s": cfg.g_s,
        "g_u": cfg.g_u,
        "sig_f": {"i_thr": cfg.sig_f.i_thr, "i_lin": cfg.sig_f.i_lin, "i_gain0": cfg.sig_f.i_gain0},
        "sig_s": {"i_thr": cfg.sig_s.i_thr, "i_lin": cfg.sig_s.i_lin, "i_gain0": cfg.sig_s.i_gain0},
        "inactivation_enabled": cfg.inactivation_enabled,
        "rectify_filter_inputs": cfg.rectify_filter_inputs,
    }


_BIAS_KEYS = {
    "tau_f", "tau_s", "tau_u", "g_f", "g_s", "g_u",
    "sig_f", "sig_s", "inactivation_enabled", "rectify_filter_inputs",
}
_SIG_KEYS = {"i_thr", "i_lin", "i_gain0"}


def bias_from_dict(d: dict, where: str = "bias") -> BiasConfiguration:
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(d) - _BIAS_KEYS
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    missing = _BIAS_KEYS - set(d)
    if missing:
        raise ConfigError(f"{where}: missing keys {sorted(missing)}")
    sigs = {}
    for name in ("sig_f", "sig_s"):
        sd = d[name]
        if not isinstance(sd, dict):
            raise ConfigError(f"{where}.{name}: expected an object")
        unknown = set(sd) - _SIG_KEYS
        if unknown:
            raise ConfigError(f"{where}.{name}: unknown keys {sorted(unknown)}")
        missing = _SIG_KEYS - set(sd)
        if missing:
            raise ConfigError(f"{where}.{name}: missing keys {sorted(missing)}")
        try:
            sigs[name] = SigmoidParams(**sd)
        except ParameterError as e:
            raise ConfigError(f"{where}.{name}: {e}") from e
    try:
        return BiasConfiguration(
            tau_f=d["tau_f"], tau_s=d["tau_s"], tau_u=d["tau_u"],
            g_f=d["g_f"], g_s=d["g_s"], g_u=d["g_u"],
            sig_f=sigs["sig_f"], sig_s=sigs["sig_s"],
            inactivation_enabled=bool(d["inactivation_enabled"]),
            rectify_filter_inputs=bool(d["rectify_filter_inputs"]),
        )
    except ParameterError as e:
        raise ConfigError(f"{where}: {e}") from e


_SCENARIO_KEYS = {
    "kind", "bias", "preset", "input", "dt", "t_end", "record_stride",
    "amplitudes", "level_duration", "param", "start", "stop", "steps", "confirm",
    "temperatures", "t_ref", "grid_min", "grid_max", "resolution",
}


def scenario_from_dict(d: dict) -> Scenario:
    if not isinstance(d, dict):
        raise ConfigError("scenario: expected a JSON object at top level")
    unknown = set(d) - _SCENARIO_KEYS
    if unknown:
        raise ConfigError(f"scenario: unknown keys {sorted(unknown)}")
    if "kind" not in d:
        raise ConfigError("scenario: missing 'kind'")

    if "preset" in d and "bias" in d:
        raise ConfigError("scenario: give either 'preset' or 'bias', not both")
    if "preset" in d:
        try:
            bias = get_preset(d["preset"])
        except KeyError as e:
            raise ConfigError(f"scenario.preset: {e.args[0]}") from e
    elif "bias" in d:
        bias = bias_from_dict(d["bias"])
    else:
        raise ConfigError("scenario: requires 'preset' or 'bias'")

    sig = None
    if "input" in d:
        inp = d["input"]
        if not isinstance(inp, dict) or set(inp) - {"segments"}:
            raise ConfigError("scenario.input: expected {'segments': [[t, amplitude], ...]}")
        try:
            sig = InputSignal(segments=tuple((float(t), float(a)) for t, a in inp["segments"]))
        except (TypeError, ValueError, ParameterError) as e:
            raise ConfigError(f"scenario.input: {e}") from e

    s = Scenario(
        kind=d["kind"],
        bias=bias,
        preset=d.get("preset"),
        input=sig,
        dt=d.get("dt"),
        t_end=d.get("t_end"),
        record_stride=int(d.get("record_stride", 1)),
        amplitudes=d.get("amplitudes"),
        level_duration=d.get("level_duration"),
        param=d.get("param", "sig_s.i_gain0"),
        start=d.get("start"),
        stop=d.get("stop"),
        steps=int(d.get("steps", 16)),
        confirm=bool(d.get("confirm", True)),
        temperatures=d.get("temperatures"),
        t_ref=float(d.get("t_ref", 298.15)),
        grid_min=float(d.get("grid_min", 0.0)),
        grid_max=d.get("grid_max"),
        resolution=int(d.get("resolution", 1024)),
    )
    s.validate()
    return s


def scenario_to_dict(s: Scenario) -> dict:
    d: dict = {"kind": s.kind}
    if s.preset is not None:
        d["preset"] = s.preset
    else:
        d["bias"] = bias_to_dict(s.bias)
    if s.input is not None:
        d["input"] = {"segments": [[t, a] for t, a in s.input.segments]}
    for key in ("dt", "t_end", "amplitudes", "level_duration", "start", "stop",
                "temperatures", "grid_max"):
        v = getattr(s, key)
        if v is not None:
            d[key] = v
    if s.record_stride != 1:
        d["record_stride"] = s.record_stride
    if s.kind == "neuromod-sweep":
        d["param"] = s.param
        d["steps"] = s.steps
        d["confirm"] = s.confirm
    if s.kind == "temperature-sweep":
        d["t_ref"] = s.t_ref
    if s.kind in ("curves", "classify"):
        d["grid_min"] = s.grid_min
        d["resolution"] = s.resolution
    return d


def load_config(path) -> Scenario:
    """Parse a scenario file, rejecting unknown keys with diagnostics."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from e
    return scenario_from_dict(data)


def save_config(s: Scenario, path) -> None:
    Path(path).write_text(_dumps(scenario_to_dict(s)))


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def export_trace(trace: dynamics.Trace, path) -> None:
    """Column-oriented text: one row per sample; the spike column marks
    the sample nearest each detected spike time."""
    spike_rows = set()
    if len(trace.t) > 1:
        dt = trace.t[1] - trace.t[0]
        for ts in np.asarray(trace.spikes):
            k = int(round((ts - trace.t[0]) / dt))
            if 0 <= k < len(trace.t):
                spike_rows.add(k)
    elif len(trace.t) == 1 and len(trace.spikes):
        spike_rows.add(0)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for k in range(len(trace.t)):
            w.writerow(
                [
                    repr(float(trace.t[k])),
                    repr(float(trace.i_f[k])),
                    repr(float(trace.i_s[k])),
                    repr(float(trace.i_u[k])),
                    repr(float(trace.i_app[k])),
                    1 if k in spike_rows else 0,
                ]
            )


def import_trace(path) -> dynamics.Trace:
    """Rebuild a trace from an exported file; spike times come from the
    spike column and bursts are re-segmented from them."""
    cols: dict[str, list[float]] = {name: [] for name in TRACE_HEADER}
    with open(path, newline="") as f:
        r = csv.reader(f)
        try:
            header = next(r)
        except StopIteration:
            raise ConfigError(f"{path}: empty trace file") from None
        if header != TRACE_HEADER:
            raise ConfigError(f"{path}: unexpected header {header}")
        for row in r:
            if len(row) != len(TRACE_HEADER):
                raise ConfigError(f"{path}: malformed row {row}")
            for name, val in zip(TRACE_HEADER, row):
                cols[name].append(float(val))
    t = np.array(cols["t_s"])
    spikes = t[np.array(cols["spike"], dtype=bool)] if len(t) else np.empty(0)
    return dynamics.Trace(
        t=t,
        i_f=np.array(cols["i_f_A"]),
        i_s=np.array(cols["i_s_A"]),
        i_u=np.array(cols["i_u_A"]),
        i_app=np.array(cols["i_app_A"]),
        spikes=spikes,
        bursts=dynamics.segment_bursts(spikes),
    )


def export_curves(curves: analysis.CurveSet, path) -> None:
    """Sampled curves with fold/window annotations as comment lines."""
    with open(path, "w", newline="") as f:
        for name, curve in (("fast", curves.fast), ("slow", curves.slow),
                            ("ultraslow", curves.ultraslow)):
            for x, y in curve.folds:
                f.write(f"# fold curve={name} i_eq_A={x!r} i_app_A={y!r}\n")
            if curve.bistability_window is not None:
                lo, hi = curve.bistability_window
                f.write(f"# window curve={name} i_app_low_A={lo!r} i_app_high_A={hi!r}\n")
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["i_eq_A", "i_app_fast_A", "i_app_slow_A", "i_app_ultraslow_A"])
        for k in range(len(curves.fast.grid)):
            w.writerow(
                [
                    repr(float(curves.fast.grid[k])),
                    repr(float(curves.fast.i_app[k])),
                    repr(float(curves.slow.i_app[k])),
                    repr(float(curves.ultraslow.i_app[k])),
                ]
            )


def metrics_dict(m: dynamics.FiringMetrics) -> dict:
    return {
        "spike_rate_hz": m.spike_rate,
        "burst_rate_hz": m.burst_rate,
        "spikes_per_burst": m.spikes_per_burst,
        "spikes_per_burst_each": list(m.spikes_per_burst_each),
        "duty_cycle": m.duty_cycle,
        "regime_label": m.regime_label,
    }


def report_dict(rep: analysis.RegimeReport) -> dict:
    return {
        "label": rep.label,
        "fast_window_A": list(rep.fast_window) if rep.fast_window else None,
        "slow_window_A": list(rep.slow_window) if rep.slow_window else None,
        "ultraslow_monotone": rep.ultraslow_monotone,
        "rest_return_guaranteed": rep.rest_return_guaranteed,
    }


def metrics_with_fallback(trace: dynamics.Trace) -> dynamics.FiringMetrics:
    """Metrics with the default transient window, falling back to the full
    trace when the horizon is shorter than the settling time."""
    try:
        return dynamics.firing_metrics(trace)
    except (dynamics.WindowError, ParameterError):
        return dynamics.firing_metrics(trace, window_start=0.0)


def event_spans(trace: dynamics.Trace, fall: float) -> list[tuple[float, float]]:
    """Contiguous intervals where i_f stays above the fall threshold and
    which contain at least one detected spike: the time-above-envelope
    measure of spike/burst extent."""
    above = trace.i_f >= fall
    spans = []
    k, n = 0, len(above)
    while k < n:
        if above[k]:
            j = k
            while j < n and above[j]:
                j += 1
            spans.append((float(trace.t[k]), float(trace.t[j - 1])))
            k = j
        else:
            k += 1
    spikes = np.asarray(trace.spikes)
    return [s for s in spans if np.any((spikes >= s[0]) & (spikes <= s[1]))]


def run_scenario(s: Scenario, out_dir) -> dict:
    """Execute a scenario, write its artifacts, and return the summary.

    Analysis outcomes (labels, transitions) are data in the summary, not
    errors; exceptions are raised only for invalid scenarios or unwritable
    outputs.
    """
    s.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary: dict = {"kind": s.kind, "bias": bias_to_dict(s.bias)}
    if s.preset:
        summary["preset"] = s.preset

    if s.kind == "simulate":
        trace = dynamics.integrate(s.bias, s.input, s.solver_options())
        export_trace(trace, out / "trace.csv")
        m = metrics_with_fallback(trace)
        summary["metrics"] = metrics_dict(m)
        summary["spike_times_s"] = [float(t) for t in trace.spikes]
        summary["bursts"] = [[b.start, b.end, b.spike_count] for b in trace.bursts]
        summary["artifacts"] = ["trace.csv"]

    elif s.kind == "staircase":
        sig = InputSignal.staircase(s.amplitudes, s.level_duration)
        opts = replace(
            s.solver_options(), t_end=s.level_duration * len(s.amplitudes)
        )
        trace = dynamics.integrate(s.bias, sig, opts)
        export_trace(trace, out / "trace.csv")
        settle = dynamics.TRANSIENT_TAU_U_MULTIPLE * s.bias.tau_u
        levels = []
        for k, amp in enumerate(s.amplitudes):
            m = dynamics.firing_metrics(
                trace,
                window_start=k * s.level_duration + settle,
                window_end=(k + 1) * s.level_duration,
            )
            levels.append({"amplitude_A": amp, **metrics_dict(m)})
        summary["levels"] = levels
        summary["artifacts"] = ["trace.csv"]

    elif s.kind == "neuromod-sweep":
        report = analysis.neuromod_sweep(
            s.bias, s.start, s.stop, s.steps, param=s.param, confirm=s.confirm,
            grid_max=s.grid_max, resolution=s.resolution,
        )
        summary["sweep"] = {
            "param": report.param,
            "values": report.values,
            "labels": report.labels,
            "classifier_transition_index": report.classifier_transition_index,
            "sim_labels": report.sim_labels,
            "sim_spikes_per_burst": report.sim_spikes_per_burst,
            "sim_burst_rates": report.sim_burst_rates,
            "sim_transition_index": report.sim_transition_index,
        }
        summary["artifacts"] = []

    elif s.kind == "temperature-sweep":
        base_input = s.input or InputSignal.constant(analysis.confirmation_input(s.bias))
        opts = s.solver_options()
        points = []
        artifacts = []
        for t_k in s.temperatures:
            speed = devicemap.speedup_factor(s.t_ref, t_k)
            cfg_t = devicemap.temperature_transform(s.bias, s.t_ref, t_k)
            sig_t = InputSignal(
                segments=tuple((t0 / speed, a * speed) for t0, a in base_input.segments)
            )
            opts_t = dynamics.SolverOptions(
                dt=opts.dt / speed, t_end=opts.t_end / speed,
                record_stride=opts.record_stride,
            )
            trace = dynamics.integrate(cfg_t, sig_t, opts_t)
            m = metrics_with_fallback(trace)
            name = f"trace_{t_k:.2f}K.csv"
            export_trace(trace, out / name)
            artifacts.append(name)
            points.append({"temperature_K": t_k, "speedup": speed, **metrics_dict(m)})
        summary["temperature_points"] = points
        summary["artifacts"] = artifacts

    elif s.kind == "inactivation-compare":
        results = {}
        opts = s.solver_options()
        for tag, enabled in (("on", True), ("off", False)):
            cfg = replace(s.bias, inactivation_enabled=enabled)
            trace = dynamics.integrate(cfg, s.input, opts)
            name = f"trace_inactivation_{tag}.csv"
            export_trace(trace, out / name)
            _, fall = dynamics.default_spike_thresholds(cfg)
            spans = event_spans(trace, fall)
            widths = [b - a for a, b in spans]
            results[tag] = {
                "n_spikes": int(len(trace.spikes)),
                "n_events": len(spans),
                "mean_event_width_s": float(np.mean(widths)) if widths else None,
                "first_event_width_s": widths[0] if widths else None,
                "metrics": metrics_dict(metrics_with_fallback(trace)),
            }
        summary["inactivation"] = results
        summary["artifacts"] = [
            "trace_inactivation_on.csv",
            "trace_inactivation_off.csv",
        ]

    elif s.kind == "curves":
        curves = analysis.steady_state_curves(
            s.bias, grid_min=s.grid_min, grid_max=s.grid_max, resolution=s.resolution
        )
        export_curves(curves, out / "curves.csv")
        rep = analysis.classify_regime(curves.fast, curves.slow, curves.ultraslow)
        summary["report"] = report_dict(rep)
        summary["artifacts"] = ["curves.csv"]

    elif s.kind == "classify":
        curves = analysis.steady_state_curves(
            s.bias, grid_min=s.grid_min, grid_max=s.grid_max, resolution=s.resolution
        )
        rep = analysis.classify_regime(curves.fast, curves.slow, curves.ultraslow)
        summary["report"] = report_dict(rep)
        summary["artifacts"] = []

    (out / "summary.json").write_text(_dumps(summary))
    return summary
