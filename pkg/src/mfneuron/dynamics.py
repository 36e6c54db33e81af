"""Fixed-step time integration of the neuron ODEs and extraction of
spikes, bursts, and firing metrics from the resulting traces.

The integrator is classic 4th-order Runge-Kutta on a fixed grid; input
segment boundaries are snapped to the grid so event counts are
reproducible bit-for-bit. Spike detection is a hysteresis crossing
detector on the fast current; burst segmentation splits the inter-spike
interval distribution at its largest log-domain gap.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from numba import njit

from .model import (
    SIGMOID_STEEPNESS,
    BiasConfiguration,
    InputSignal,
    NeuronState,
    ParameterError,
)

__all__ = [
    "SolverOptions",
    "Trace",
    "Burst",
    "FiringMetrics",
    "IntegrationDivergedError",
    "WindowError",
    "integrate",
    "detect_spikes",
    "segment_bursts",
    "firing_metrics",
    "default_spike_thresholds",
]

# dt above tau_f/20 is inaccurate on the fast timescale: warn and shrink.
DT_MAX_FRACTION = 1.0 / 20.0
DT_AUTO_FRACTION = 1.0 / 50.0

# Spike detector hysteresis thresholds as fractions of the baseline fast
# sigmoid gain.
SPIKE_RISE_FRACTION = 0.30
SPIKE_FALL_FRACTION = 0.15

# Ratio between ISI cluster means above which the train is considered
# bursting rather than tonic with jitter.
BURST_SPLIT_FACTOR = 2.5

# Firing metrics exclude the initial transient of this many tau_u.
TRANSIENT_TAU_U_MULTIPLE = 3.0


class IntegrationDivergedError(RuntimeError):
    """State became non-finite during integration."""

    def __init__(self, time: float):
        super().__init__(f"integration diverged at t = {time:.6g} s")
        self.time = time


class WindowError(ValueError):
    """Requested analysis window does not fit inside the trace."""


class Burst(NamedTuple):
    start: float
    end: float
    spike_count: int


@dataclass(frozen=True)
class SolverOptions:
    """Fixed-step solver settings. dt is clamped to tau_f/50 (with a
    warning) whenever it exceeds tau_f/20."""

    dt: float
    t_end: float
    record_stride: int = 1
    initial_state: NeuronState = field(default_factory=NeuronState)

    def __post_init__(self):
        if not (self.dt > 0.0):
            raise ParameterError(f"dt must be > 0, got {self.dt}")
        if self.t_end < 0.0:
            raise ParameterError(f"t_end must be >= 0, got {self.t_end}")
        if self.record_stride < 1:
            raise ParameterError(f"record_stride must be >= 1, got {self.record_stride}")


@dataclass
class Trace:
    """Uniformly sampled state/input time series plus detected events.

    Spike times and bursts are detected on the full-resolution solution
    before any record decimation, so events are never aliased away.
    tau_u is carried along so metrics can default their transient window.
    """

    t: np.ndarray
    i_f: np.ndarray
    i_s: np.ndarray
    i_u: np.ndarray
    i_app: np.ndarray
    spikes: np.ndarray
    bursts: list[Burst]
    tau_u: Optional[float] = None


@dataclass(frozen=True)
class FiringMetrics:
    spike_rate: float
    burst_rate: Optional[float]
    spikes_per_burst: Optional[float]
    spikes_per_burst_each: tuple[int, ...]
    duty_cycle: float
    regime_label: str  # "quiescent" | "tonic-spiking" | "bursting"


@njit(inline="always", cache=True)
def _field(yf, ys, yu, amp, tau_f, tau_s, tau_u, g_f, g_s, g_u,
           thr_f, lin_f, gf0, thr_s, lin_s, gs0, inact, rect):
    # Mirrors model.vector_field; duplicated here so the hot loop stays
    # inside compiled code (cross-checked against the Python version in
    # the test suite).
    if inact:
        i_gf = gf0 - ys
        if i_gf < 0.0:
            i_gf = 0.0
        i_gs = gs0 - yu
        if i_gs < 0.0:
            i_gs = 0.0
    else:
        i_gf = gf0
        i_gs = gs0
    zf = SIGMOID_STEEPNESS * ((yf - thr_f) / lin_f - 0.5)
    if zf >= 0.0:
        sf = i_gf / (1.0 + math.exp(-zf))
    else:
        ef = math.exp(zf)
        sf = i_gf * ef / (1.0 + ef)
    zs = SIGMOID_STEEPNESS * ((ys - thr_s) / lin_s - 0.5)
    if zs >= 0.0:
        ss = i_gs / (1.0 + math.exp(-zs))
    else:
        es = math.exp(zs)
        ss = i_gs * es / (1.0 + es)
    u = sf + ss - ys - yu + amp
    if rect and u < 0.0:
        u = 0.0
    df = (-yf + g_f * u) / tau_f
    ds = (-ys + g_s * yf) / tau_s
    du = (-yu + g_u * yf) / tau_u
    return df, ds, du


@njit(cache=True)
def _rk4_loop(p, seg_idx, seg_amp, n_steps, dt, y0):
    """Integrate n_steps of the neuron field. p packs the configuration:
    [tau_f, tau_s, tau_u, g_f, g_s, g_u,
     thr_f, lin_f, gf0, thr_s, lin_s, gs0, inact, rect].
    Returns full-resolution state arrays, the applied current per sample,
    and the index of the first non-finite step (-1 if none)."""
    tau_f, tau_s, tau_u = p[0], p[1], p[2]
    g_f, g_s, g_u = p[3], p[4], p[5]
    thr_f, lin_f, gf0 = p[6], p[7], p[8]
    thr_s, lin_s, gs0 = p[9], p[10], p[11]
    inact = p[12] != 0.0
    rect = p[13] != 0.0

    i_f = np.empty(n_steps + 1)
    i_s = np.empty(n_steps + 1)
    i_u = np.empty(n_steps + 1)
    i_app_out = np.empty(n_steps + 1)

    yf, ys, yu = y0[0], y0[1], y0[2]
    i_f[0] = yf
    i_s[0] = ys
    i_u[0] = yu

    n_seg = seg_idx.shape[0]
    seg_ptr = 0
    amp = 0.0

    for step in range(n_steps):
        while seg_ptr < n_seg and seg_idx[seg_ptr] <= step:
            amp = seg_amp[seg_ptr]
            seg_ptr += 1
        # the sample at a boundary shows the amplitude taking effect there
        i_app_out[step] = amp

        # Classic RK4; the applied current is constant within the step.
        k1f, k1s, k1u = _field(yf, ys, yu, amp,
                               tau_f, tau_s, tau_u, g_f, g_s, g_u,
                               thr_f, lin_f, gf0, thr_s, lin_s, gs0, inact, rect)
        k2f, k2s, k2u = _field(yf + 0.5 * dt * k1f, ys + 0.5 * dt * k1s,
                               yu + 0.5 * dt * k1u, amp,
                               tau_f, tau_s, tau_u, g_f, g_s, g_u,
                               thr_f, lin_f, gf0, thr_s, lin_s, gs0, inact, rect)
        k3f, k3s, k3u = _field(yf + 0.5 * dt * k2f, ys + 0.5 * dt * k2s,
                               yu + 0.5 * dt * k2u, amp,
                               tau_f, tau_s, tau_u, g_f, g_s, g_u,
                               thr_f, lin_f, gf0, thr_s, lin_s, gs0, inact, rect)
        k4f, k4s, k4u = _field(yf + dt * k3f, ys + dt * k3s,
                               yu + dt * k3u, amp,
                               tau_f, tau_s, tau_u, g_f, g_s, g_u,
                               thr_f, lin_f, gf0, thr_s, lin_s, gs0, inact, rect)

        yf = yf + dt * (k1f + 2.0 * k2f + 2.0 * k3f + k4f) / 6.0
        ys = ys + dt * (k1s + 2.0 * k2s + 2.0 * k3s + k4s) / 6.0
        yu = yu + dt * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0

        if not (math.isfinite(yf) and math.isfinite(ys) and math.isfinite(yu)):
            return i_f, i_s, i_u, i_app_out, step + 1

        i_f[step + 1] = yf
        i_s[step + 1] = ys
        i_u[step + 1] = yu

    while seg_ptr < n_seg and seg_idx[seg_ptr] <= n_steps:
        amp = seg_amp[seg_ptr]
        seg_ptr += 1
    i_app_out[n_steps] = amp

    return i_f, i_s, i_u, i_app_out, -1


def _pack_params(cfg: BiasConfiguration) -> np.ndarray:
    return np.array(
        [
            cfg.tau_f,
            cfg.tau_s,
            cfg.tau_u,
            cfg.g_f,
            cfg.g_s,
            cfg.g_u,
            cfg.sig_f.i_thr,
            cfg.sig_f.i_lin,
            cfg.sig_f.i_gain0,
            cfg.sig_s.i_thr,
            cfg.sig_s.i_lin,
            cfg.sig_s.i_gain0,
            1.0 if cfg.inactivation_enabled else 0.0,
            1.0 if cfg.rectify_filter_inputs else 0.0,
        ],
        dtype=np.float64,
    )


def default_spike_thresholds(cfg: BiasConfiguration) -> tuple[float, float]:
    """(rise, fall) hysteresis thresholds derived from the fast gain."""
    gf0 = cfg.sig_f.i_gain0
    return (SPIKE_RISE_FRACTION * gf0, SPIKE_FALL_FRACTION * gf0)


def integrate(
    cfg: BiasConfiguration,
    input_signal: InputSignal,
    opts: SolverOptions,
    spike_thresholds: Optional[tuple[float, float]] = None,
) -> Trace:
    """Fixed-step RK4 trajectory of the neuron field.

    Deterministic: identical inputs give bit-identical traces. Spike and
    burst events are detected on the full-resolution solution; the stored
    samples honor opts.record_stride.
    """
    dt = opts.dt
    if dt > cfg.tau_f * DT_MAX_FRACTION:
        new_dt = cfg.tau_f * DT_AUTO_FRACTION
        warnings.warn(
            f"dt = {dt:.3g} s exceeds tau_f/20 = {cfg.tau_f * DT_MAX_FRACTION:.3g} s; "
            f"shrinking to tau_f/50 = {new_dt:.3g} s",
            stacklevel=2,
        )
        dt = new_dt

    n_steps = int(round(opts.t_end / dt))
    seg_idx = np.array(
        [min(max(int(round(t0 / dt)), 0), max(n_steps, 0)) for t0, _ in input_signal.segments],
        dtype=np.int64,
    )
    seg_amp = np.array([a for _, a in input_signal.segments], dtype=np.float64)
    y0 = np.array(opts.initial_state.as_tuple(), dtype=np.float64)

    i_f, i_s, i_u, i_app, fail = _rk4_loop(
        _pack_params(cfg), seg_idx, seg_amp, n_steps, dt, y0
    )
    if fail >= 0:
        raise IntegrationDivergedError(fail * dt)

    t_full = np.arange(n_steps + 1, dtype=np.float64) * dt
    if spike_thresholds is None:
        spike_thresholds = default_spike_thresholds(cfg)
    rise, fall = spike_thresholds
    if fall > 0.0:
        spikes = _detect_spikes_raw(t_full, i_f, rise, fall)
    else:
        # zero fast gain: the default thresholds are degenerate and the
        # neuron cannot spike; record no events
        spikes = np.empty(0, dtype=np.float64)
    bursts = segment_bursts(spikes)

    s = opts.record_stride
    return Trace(
        t=t_full[::s].copy(),
        i_f=i_f[::s].copy(),
        i_s=i_s[::s].copy(),
        i_u=i_u[::s].copy(),
        i_app=i_app[::s].copy(),
        spikes=spikes,
        bursts=bursts,
        tau_u=cfg.tau_u,
    )


def _detect_spikes_raw(
    t: np.ndarray, i_f: np.ndarray, rise: float, fall: float
) -> np.ndarray:
    if not (fall > 0.0) or not (rise > fall):
        raise ParameterError(
            f"spike thresholds must satisfy rise > fall > 0, got rise={rise}, fall={fall}"
        )
    if len(i_f) < 2:
        return np.empty(0, dtype=np.float64)
    up = np.flatnonzero((i_f[:-1] < rise) & (i_f[1:] >= rise)) + 1
    down = np.flatnonzero((i_f[:-1] >= fall) & (i_f[1:] < fall)) + 1
    events = sorted([(int(k), 0) for k in up] + [(int(k), 1) for k in down])
    armed = i_f[0] < rise
    spike_idx = []
    for k, kind in events:
        if kind == 0:
            if armed:
                spike_idx.append(k)
                armed = False
        else:
            armed = True
    return t[np.array(spike_idx, dtype=np.int64)] if spike_idx else np.empty(0)


def detect_spikes(trace: Trace, thresholds: tuple[float, float]) -> np.ndarray:
    """Spike times from upward crossings of i_f through `rise`, with the
    detector re-arming only after i_f falls below `fall`."""
    rise, fall = thresholds
    return _detect_spikes_raw(trace.t, trace.i_f, rise, fall)


def segment_bursts(
    spike_times: Sequence[float],
    split_factor: float = BURST_SPLIT_FACTOR,
    max_intra_isi: Optional[float] = None,
) -> list[Burst]:
    """Group spikes into bursts.

    The inter-spike intervals are split at the largest gap of their sorted
    log values; if the resulting cluster means differ by at least
    split_factor, the long-ISI cluster marks inter-burst separators.
    Otherwise the train is tonic and no bursts are returned. Passing
    max_intra_isi skips the clustering and uses a fixed separator
    threshold instead. Groups of a single spike are not bursts.
    """
    times = np.asarray(spike_times, dtype=np.float64)
    if times.size <= 2:
        return []
    isis = np.diff(times)

    if max_intra_isi is not None:
        separator = isis > max_intra_isi
    else:
        order = np.argsort(isis)
        log_sorted = np.log(isis[order])
        gaps = np.diff(log_sorted)
        if gaps.size == 0 or np.max(gaps) <= 0.0:
            return []
        split_at = int(np.argmax(gaps)) + 1
        short = isis[order[:split_at]]
        long = isis[order[split_at:]]
        if float(np.mean(long)) < split_factor * float(np.mean(short)):
            return []
        threshold = math.exp(0.5 * (log_sorted[split_at - 1] + log_sorted[split_at]))
        separator = isis > threshold

    bursts: list[Burst] = []
    start = 0
    boundaries = list(np.flatnonzero(separator) + 1) + [times.size]
    for stop in boundaries:
        if stop - start >= 2:
            bursts.append(
                Burst(float(times[start]), float(times[stop - 1]), int(stop - start))
            )
        start = stop
    return bursts


def firing_metrics(
    trace: Trace,
    window_start: Optional[float] = None,
    window_end: Optional[float] = None,
) -> FiringMetrics:
    """Rates and regime label over the analyzed window.

    The window defaults to [3 tau_u, end of trace] to exclude the slow
    settling transient. Bursts are re-segmented from the windowed spikes
    so a window boundary never splits an event group inconsistently.
    """
    if window_start is None:
        if trace.tau_u is None:
            raise ParameterError(
                "trace carries no tau_u; pass window_start explicitly"
            )
        window_start = TRANSIENT_TAU_U_MULTIPLE * trace.tau_u
    t_last = float(trace.t[-1]) if len(trace.t) else 0.0
    if window_end is None:
        window_end = t_last
    tol = 1e-9 * max(1.0, abs(t_last))
    if window_end > t_last + tol or window_start >= window_end:
        raise WindowError(
            f"analysis window [{window_start:.6g}, {window_end:.6g}] does not fit "
            f"inside trace ending at {t_last:.6g}"
        )
    window_end = min(window_end, t_last)

    duration = float(window_end - window_start)
    spikes = np.asarray(trace.spikes, dtype=np.float64)
    in_win = spikes[(spikes >= window_start) & (spikes <= window_end)]
    spike_rate = float(in_win.size / duration)

    bursts = segment_bursts(in_win)
    starts = np.array([b.start for b in bursts])
    if len(bursts) >= 2:
        burst_rate: Optional[float] = float(1.0 / np.mean(np.diff(starts)))
    else:
        burst_rate = None
    counts = tuple(int(b.spike_count) for b in bursts)
    spikes_per_burst = float(np.mean(counts)) if counts else None
    duty_cycle = float(sum(b.end - b.start for b in bursts) / duration)

    if in_win.size == 0:
        label = "quiescent"
    elif len(bursts) >= 2:
        label = "bursting"
    else:
        label = "tonic-spiking"
    return FiringMetrics(
        spike_rate=spike_rate,
        burst_rate=burst_rate,
        spikes_per_burst=spikes_per_burst,
        spikes_per_burst_each=counts,
        duty_cycle=duty_cycle,
        regime_label=label,
    )
