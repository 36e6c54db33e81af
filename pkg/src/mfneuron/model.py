"""Core neuron model: parameterization, sigmoid nonlinearity, gain
inactivation, and the three-timescale vector field.

All state variables are currents in amperes; time constants are in
seconds. The model is a superposition of linear negative feedback and
sigmoidal positive feedback acting through three first-order low-pass
filters (fast / slow / ultraslow). Everything here is pure and
deterministic; instances are immutable and safe to share across threads.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields, replace

__all__ = [
    "ParameterError",
    "TimescaleSeparationWarning",
    "SigmoidParams",
    "BiasConfiguration",
    "NeuronState",
    "InputSignal",
    "SIGMOID_STEEPNESS",
    "sigmoid_eval",
    "sigmoid_slope",
    "effective_gains",
    "vector_field",
    "set_param",
]

# Logistic steepness in normalized input units x = (i - i_thr) / i_lin.
# The saturating shape is sigma(x) = logistic(k * (x - 1/2)), so the output
# crosses half its gain exactly at i_thr + i_lin/2. k = 6 puts
# sigma(0) ~= 0.047 and sigma(1) ~= 0.953: i_thr marks the onset of output
# and i_lin the width of the rising range.
SIGMOID_STEEPNESS = 6.0

# Warn below this ratio between adjacent time constants; the analysis
# assumes strong separation.
TIMESCALE_RATIO_MIN = 10.0


class ParameterError(ValueError):
    """A model parameter violates its invariant."""


class TimescaleSeparationWarning(UserWarning):
    """Adjacent filter time constants are separated by less than 10x."""


def _logistic(z: float) -> float:
    # Overflow-safe logistic.
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


@dataclass(frozen=True)
class SigmoidParams:
    """DC bias triple of one current-mode sigmoid block.

    i_thr: input current at which the block starts producing output (A).
    i_lin: width of the monotonically increasing input range (A).
    i_gain0: baseline saturation output current (A).
    """

    i_thr: float
    i_lin: float
    i_gain0: float

    def __post_init__(self):
        if not (self.i_thr >= 0.0):
            raise ParameterError(f"sigmoid i_thr must be >= 0, got {self.i_thr}")
        if not (self.i_lin > 0.0):
            raise ParameterError(f"sigmoid i_lin must be > 0, got {self.i_lin}")
        if not (self.i_gain0 >= 0.0):
            raise ParameterError(f"sigmoid i_gain0 must be >= 0, got {self.i_gain0}")


@dataclass(frozen=True)
class BiasConfiguration:
    """All tunable model parameters, the model-level analog of the chip's
    DAC bias settings.

    tau_f < tau_s < tau_u are the filter time constants (s); g_f, g_s, g_u
    the dimensionless filter gains; sig_f and sig_s the fast and slow
    sigmoid bias triples. inactivation_enabled subtracts the slow and
    ultraslow currents from the sigmoid gains after spike onset;
    rectify_filter_inputs clamps the net current entering the fast filter
    at zero (a physical current cannot be negative). Turning rectification
    off gives the exact analytical equations for theory-matching tests.
    """

    tau_f: float
    tau_s: float
    tau_u: float
    g_f: float
    g_s: float
    g_u: float
    sig_f: SigmoidParams
    sig_s: SigmoidParams
    inactivation_enabled: bool = True
    rectify_filter_inputs: bool = True

    def __post_init__(self):
        if not (0.0 < self.tau_f < self.tau_s < self.tau_u):
            raise ParameterError(
                "time constants must satisfy 0 < tau_f < tau_s < tau_u, got "
                f"({self.tau_f}, {self.tau_s}, {self.tau_u})"
            )
        for name in ("g_f", "g_s", "g_u"):
            if not (getattr(self, name) > 0.0):
                raise ParameterError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.tau_s / self.tau_f < TIMESCALE_RATIO_MIN:
            warnings.warn(
                f"tau_s/tau_f = {self.tau_s / self.tau_f:.2f} < {TIMESCALE_RATIO_MIN}; "
                "curve analysis assumes strong timescale separation",
                TimescaleSeparationWarning,
                stacklevel=2,
            )
        if self.tau_u / self.tau_s < TIMESCALE_RATIO_MIN:
            warnings.warn(
                f"tau_u/tau_s = {self.tau_u / self.tau_s:.2f} < {TIMESCALE_RATIO_MIN}; "
                "curve analysis assumes strong timescale separation",
                TimescaleSeparationWarning,
                stacklevel=2,
            )


@dataclass(frozen=True)
class NeuronState:
    """Current-mode state triple (A): i_f plays the role of the membrane
    potential; i_s and i_u are the slow and ultraslow feedback currents."""

    i_f: float = 0.0
    i_s: float = 0.0
    i_u: float = 0.0

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.i_f, self.i_s, self.i_u)


@dataclass(frozen=True)
class InputSignal:
    """Piecewise-constant applied current: ordered (start_time, amplitude)
    segments. The amplitude before the first segment is zero."""

    segments: tuple[tuple[float, float], ...]

    def __post_init__(self):
        prev = -math.inf
        for t0, amp in self.segments:
            if t0 < 0.0:
                raise ParameterError(f"segment start times must be >= 0, got {t0}")
            if t0 <= prev:
                raise ParameterError("segment start times must be strictly increasing")
            if amp < 0.0:
                raise ParameterError(f"segment amplitudes must be >= 0, got {amp}")
            prev = t0

    @classmethod
    def constant(cls, amplitude: float) -> "InputSignal":
        return cls(segments=((0.0, amplitude),))

    @classmethod
    def staircase(cls, amplitudes, level_duration: float) -> "InputSignal":
        if level_duration <= 0.0:
            raise ParameterError("level_duration must be > 0")
        segs = tuple((k * level_duration, float(a)) for k, a in enumerate(amplitudes))
        return cls(segments=segs)

    def amplitude_at(self, t: float) -> float:
        amp = 0.0
        for t0, a in self.segments:
            if t0 <= t:
                amp = a
            else:
                break
        return amp

    @property
    def max_amplitude(self) -> float:
        return max((a for _, a in self.segments), default=0.0)


def sigmoid_eval(i_in: float, p: SigmoidParams, i_gain_effective: float) -> float:
    """Saturating output current of a sigmoid block.

    S(i) = i_gain_effective * sigma((i - i_thr)/i_lin), where sigma is a
    logistic in normalized units crossing 1/2 at x = 1/2. Monotone
    non-decreasing in i_in, bounded by [0, i_gain_effective], and
    scale-equivariant: scaling i_in, all bias currents, and the gain by
    lambda scales the output by lambda.
    """
    if i_gain_effective < 0.0:
        raise ParameterError(f"effective gain must be >= 0, got {i_gain_effective}")
    x = (i_in - p.i_thr) / p.i_lin
    return i_gain_effective * _logistic(SIGMOID_STEEPNESS * (x - 0.5))


def sigmoid_slope(i_in: float, p: SigmoidParams, i_gain_effective: float) -> float:
    """dS/di_in of :func:`sigmoid_eval` at i_in (dimensionless)."""
    x = (i_in - p.i_thr) / p.i_lin
    s = _logistic(SIGMOID_STEEPNESS * (x - 0.5))
    return i_gain_effective * SIGMOID_STEEPNESS * s * (1.0 - s) / p.i_lin


def effective_gains(state: NeuronState, cfg: BiasConfiguration) -> tuple[float, float]:
    """Instantaneous sigmoid gains after positive-feedback inactivation.

    The slow current is subtracted from the fast gain and the ultraslow
    current from the slow gain; the mirror subtraction floors at zero.
    """
    if not cfg.inactivation_enabled:
        return (cfg.sig_f.i_gain0, cfg.sig_s.i_gain0)
    return (
        max(0.0, cfg.sig_f.i_gain0 - state.i_s),
        max(0.0, cfg.sig_s.i_gain0 - state.i_u),
    )


def vector_field(
    state: NeuronState, i_app: float, cfg: BiasConfiguration
) -> tuple[float, float, float]:
    """Time derivatives (di_f/dt, di_s/dt, di_u/dt) in A/s.

    The fast filter integrates the sum of both sigmoid outputs, the two
    linear negative feedback currents, and the applied current; the slow
    and ultraslow filters low-pass the fast current.
    """
    i_gf, i_gs = effective_gains(state, cfg)
    u = (
        sigmoid_eval(state.i_f, cfg.sig_f, i_gf)
        + sigmoid_eval(state.i_s, cfg.sig_s, i_gs)
        - state.i_s
        - state.i_u
        + i_app
    )
    if cfg.rectify_filter_inputs and u < 0.0:
        u = 0.0
    df = (-state.i_f + cfg.g_f * u) / cfg.tau_f
    ds = (-state.i_s + cfg.g_s * state.i_f) / cfg.tau_s
    du = (-state.i_u + cfg.g_u * state.i_f) / cfg.tau_u
    return (df, ds, du)


def set_param(cfg: BiasConfiguration, path: str, value: float) -> BiasConfiguration:
    """Return a copy of cfg with the dotted field `path` replaced, e.g.
    set_param(cfg, "sig_s.i_gain0", 2e-9)."""
    parts = path.split(".")
    if len(parts) == 1:
        if parts[0] not in {f.name for f in fields(BiasConfiguration)}:
            raise ParameterError(f"unknown parameter {path!r}")
        return replace(cfg, **{parts[0]: value})
    if len(parts) == 2 and parts[0] in ("sig_f", "sig_s"):
        sig = getattr(cfg, parts[0])
        if parts[1] not in ("i_thr", "i_lin", "i_gain0"):
            raise ParameterError(f"unknown parameter {path!r}")
        return replace(cfg, **{parts[0]: replace(sig, **{parts[1]: value})})
    raise ParameterError(f"unknown parameter {path!r}")
