"""Local HTTP facade over the simulator and analysis for the workbench UI.

Strictly a single-user local tool: no auth, no persistence, no mutable
server state. Every endpoint goes through the same library calls as the
CLI, so numeric outputs are identical for identical parameters. Bodies
use ampere/second/kelvin units with fields named as the domain types.

Status codes: 400 for schema violations and exceeded limits, 422 for a
structurally valid but physically invalid bias configuration (validator
message included), 500 for integration divergence.
"""

from __future__ import annotations

import warnings
from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict

from . import analysis, dynamics, harness
from .model import BiasConfiguration, InputSignal, ParameterError, SigmoidParams
from .presets import PRESETS

__all__ = ["create_app"]

DEFAULT_T_END_CAP_S = 30.0
MAX_TRACE_POINTS = 20_000


class SigmoidParamsBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    i_thr: float
    i_lin: float
    i_gain0: float


class BiasBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    tau_f: float
    tau_s: float
    tau_u: float
    g_f: float
    g_s: float
    g_u: float
    sig_f: SigmoidParamsBody
    sig_s: SigmoidParamsBody
    inactivation_enabled: bool = True
    rectify_filter_inputs: bool = True


class InputBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    segments: list[tuple[float, float]]


class SolverBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    dt: Optional[float] = None
    t_end: Optional[float] = None
    record_stride: int = 1


class SimulateBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    bias: Optional[BiasBody] = None
    preset: Optional[str] = None
    input: Optional[InputBody] = None
    solver: Optional[SolverBody] = None
    decimation: int = MAX_TRACE_POINTS


class GridBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    grid_min: float = 0.0
    grid_max: Optional[float] = None
    resolution: int = 1024


class CurvesBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    bias: Optional[BiasBody] = None
    preset: Optional[str] = None
    grid: Optional[GridBody] = None


class HttpError(Exception):
    def __init__(self, status: int, detail: str):
        self.status = status
        self.detail = detail


def _resolve_bias(bias: Optional[BiasBody], preset: Optional[str]) -> BiasConfiguration:
    if (bias is None) == (preset is None):
        raise HttpError(400, "provide exactly one of 'bias' or 'preset'")
    if preset is not None:
        if preset not in PRESETS:
            raise HttpError(400, f"unknown preset {preset!r}")
        return PRESETS[preset]
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return BiasConfiguration(
                tau_f=bias.tau_f,
                tau_s=bias.tau_s,
                tau_u=bias.tau_u,
                g_f=bias.g_f,
                g_s=bias.g_s,
                g_u=bias.g_u,
                sig_f=SigmoidParams(**bias.sig_f.model_dump()),
                sig_s=SigmoidParams(**bias.sig_s.model_dump()),
                inactivation_enabled=bias.inactivation_enabled,
                rectify_filter_inputs=bias.rectify_filter_inputs,
            )
    except ParameterError as e:
        raise HttpError(422, str(e)) from e


def _minmax_indices(signal: np.ndarray, n_target: int) -> np.ndarray:
    """Bucketed min-max selection: spike peaks survive the decimation."""
    n = len(signal)
    if n <= n_target:
        return np.arange(n)
    buckets = max(n_target // 2, 2)
    edges = np.linspace(0, n, buckets + 1, dtype=int)
    keep = {0, n - 1}
    for b in range(buckets):
        lo, hi = edges[b], edges[b + 1]
        if hi <= lo:
            continue
        seg = signal[lo:hi]
        keep.add(lo + int(np.argmin(seg)))
        keep.add(lo + int(np.argmax(seg)))
    return np.array(sorted(keep), dtype=int)


def create_app(
    t_end_cap: float = DEFAULT_T_END_CAP_S, ui_dir: Optional[str] = None
) -> FastAPI:
    app = FastAPI(title="mfneuron workbench service")

    @app.exception_handler(RequestValidationError)
    async def _schema_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.exception_handler(HttpError)
    async def _http_error(request: Request, exc: HttpError):
        return JSONResponse(status_code=exc.status, content={"detail": exc.detail})

    @app.get("/api/presets")
    def presets():
        return {name: harness.bias_to_dict(cfg) for name, cfg in PRESETS.items()}

    @app.post("/api/simulate")
    def simulate(body: SimulateBody):
        cfg = _resolve_bias(body.bias, body.preset)
        if body.input is not None:
            try:
                sig = InputSignal(segments=tuple(body.input.segments))
            except ParameterError as e:
                raise HttpError(400, str(e)) from e
        else:
            sig = InputSignal.constant(analysis.confirmation_input(cfg))
        solver = body.solver or SolverBody()
        dt = solver.dt if solver.dt is not None else cfg.tau_f * harness.DEFAULT_DT_TAU_F_FRACTION
        t_end = (
            solver.t_end
            if solver.t_end is not None
            else cfg.tau_u * harness.DEFAULT_T_END_TAU_U_MULTIPLE
        )
        if t_end > t_end_cap:
            raise HttpError(
                400,
                f"t_end = {t_end:.3g} s exceeds the service cap of {t_end_cap:.3g} s "
                "simulated time; shorten the horizon or run the CLI harness",
            )
        try:
            opts = dynamics.SolverOptions(
                dt=dt, t_end=t_end, record_stride=solver.record_stride
            )
        except ParameterError as e:
            raise HttpError(400, str(e)) from e
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                trace = dynamics.integrate(cfg, sig, opts)
        except dynamics.IntegrationDivergedError as e:
            raise HttpError(500, str(e)) from e
        metrics = harness.metrics_with_fallback(trace)

        n_target = min(max(body.decimation, 2), MAX_TRACE_POINTS)
        idx = _minmax_indices(trace.i_f, n_target)
        return {
            "trace": {
                "t": trace.t[idx].tolist(),
                "i_f": trace.i_f[idx].tolist(),
                "i_s": trace.i_s[idx].tolist(),
                "i_u": trace.i_u[idx].tolist(),
                "i_app": trace.i_app[idx].tolist(),
            },
            "spikes": np.asarray(trace.spikes).tolist(),
            "bursts": [[b.start, b.end, b.spike_count] for b in trace.bursts],
            "metrics": harness.metrics_dict(metrics),
        }

    def _curves(body: CurvesBody):
        cfg = _resolve_bias(body.bias, body.preset)
        grid = body.grid or GridBody()
        try:
            curves = analysis.steady_state_curves(
                cfg,
                grid_min=grid.grid_min,
                grid_max=grid.grid_max,
                resolution=grid.resolution,
            )
        except ParameterError as e:
            raise HttpError(400, str(e)) from e
        report = analysis.classify_regime(curves.fast, curves.slow, curves.ultraslow)
        return curves, report

    @app.post("/api/curves")
    def curves(body: CurvesBody):
        curves, report = _curves(body)

        def curve_dict(c):
            return {
                "grid": c.grid.tolist(),
                "i_app": c.i_app.tolist(),
                "folds": [[x, y] for x, y in c.folds],
                "bistability_window": list(c.bistability_window)
                if c.bistability_window
                else None,
                "multi_fold": c.multi_fold,
            }

        return {
            "fast": curve_dict(curves.fast),
            "slow": curve_dict(curves.slow),
            "ultraslow": curve_dict(curves.ultraslow),
            "report": harness.report_dict(report),
        }

    @app.post("/api/classify")
    def classify(body: CurvesBody):
        _, report = _curves(body)
        return harness.report_dict(report)

    ui_path = Path(ui_dir) if ui_dir else Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if ui_path.is_dir() and (ui_path / "index.html").is_file():
        app.mount("/", StaticFiles(directory=str(ui_path), html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        def index():
            return (
                "<html><body><h1>mfneuron service</h1>"
                "<p>The workbench UI is not built. Build it with "
                "<code>cd frontend && npm install && npm run build</code>, "
                "then restart. The JSON API lives under <code>/api/</code>."
                "</p></body></html>"
            )

    return app
