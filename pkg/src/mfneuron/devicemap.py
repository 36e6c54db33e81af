"""Translation between device-level quantities (bias voltages,
capacitors, temperature) and model parameters, plus the uniform scaling
transforms that make the model invariant across current ranges and
temperatures.

Subthreshold bias transistors follow i = i0 * exp(kappa * v / U_T) with
U_T = kT/q. A current-mode first-order filter built from a capacitor C,
a leak current i_tau, and a threshold current i_th has gain i_th/i_tau
and time constant C*U_T/(kappa*i_tau). Temperature is modeled as one
uniform exponential current speedup calibrated against the measured
50x frequency span over a 40 K range; it deliberately does not attempt
per-branch device physics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .model import BiasConfiguration, ParameterError

__all__ = [
    "BOLTZMANN_J_PER_K",
    "ELEMENTARY_CHARGE_C",
    "DEFAULT_FILTER_CAPACITORS_F",
    "DeviceParams",
    "DpiSpec",
    "TemperatureModel",
    "DEFAULT_TEMPERATURE_MODEL",
    "thermal_voltage",
    "bias_voltage_to_current",
    "current_to_bias_voltage",
    "dpi_params",
    "uniform_scale",
    "speedup_factor",
    "temperature_transform",
]

BOLTZMANN_J_PER_K = 1.380649e-23
ELEMENTARY_CHARGE_C = 1.602176634e-19

TEMPERATURE_RANGE_K = (250.0, 400.0)

# Default capacitor sizes of the fast/slow/ultraslow filters; the
# capacitor ratio is what separates the timescales on the device.
DEFAULT_FILTER_CAPACITORS_F = {"fast": 0.5e-12, "slow": 2e-12, "ultraslow": 8e-12}

# One-parameter exponential speedup: 40 K of warming multiplies all
# subthreshold currents (hence all rates) by 50.
DEFAULT_TEMP_ALPHA_PER_K = math.log(50.0) / 40.0


@dataclass(frozen=True)
class DeviceParams:
    """Transistor-level constants: leakage prefactor i0 (A) at the
    reference temperature, subthreshold slope factor kappa, and the
    reference temperature (K)."""

    i0: float = 1e-18
    kappa: float = 0.7
    t_ref: float = 300.0

    def __post_init__(self):
        if not (0.0 < self.kappa <= 1.0):
            raise ParameterError(f"kappa must be in (0, 1], got {self.kappa}")
        if not (self.i0 > 0.0):
            raise ParameterError(f"i0 must be > 0, got {self.i0}")


@dataclass(frozen=True)
class DpiSpec:
    """One current-mode filter: capacitor (F), leak current i_tau (A),
    threshold current i_th (A)."""

    c: float
    i_tau: float
    i_th: float

    def __post_init__(self):
        for name in ("c", "i_tau", "i_th"):
            if not (getattr(self, name) > 0.0):
                raise ParameterError(f"{name} must be > 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class TemperatureModel:
    """Uniform current speedup exp(alpha * dT) per kelvin of warming."""

    alpha_per_kelvin: float = DEFAULT_TEMP_ALPHA_PER_K


DEFAULT_TEMPERATURE_MODEL = TemperatureModel()


def _check_temperature(t: float) -> None:
    lo, hi = TEMPERATURE_RANGE_K
    if not (lo <= t <= hi):
        raise ParameterError(f"temperature must be within [{lo}, {hi}] K, got {t}")


def thermal_voltage(temperature: float) -> float:
    """U_T = kT/q in volts."""
    _check_temperature(temperature)
    return BOLTZMANN_J_PER_K * temperature / ELEMENTARY_CHARGE_C


def _leakage_at(dev: DeviceParams, temperature: float, model: TemperatureModel) -> float:
    return dev.i0 * math.exp(model.alpha_per_kelvin * (temperature - dev.t_ref))


def bias_voltage_to_current(
    v: float,
    dev: DeviceParams = DeviceParams(),
    temperature: float = 300.0,
    model: TemperatureModel = DEFAULT_TEMPERATURE_MODEL,
) -> float:
    """Subthreshold bias current i0(T) * exp(kappa * v / U_T(T))."""
    if v < 0.0:
        raise ParameterError(f"bias voltage must be >= 0, got {v}")
    _check_temperature(temperature)
    u_t = thermal_voltage(temperature)
    return _leakage_at(dev, temperature, model) * math.exp(dev.kappa * v / u_t)


def current_to_bias_voltage(
    i: float,
    dev: DeviceParams = DeviceParams(),
    temperature: float = 300.0,
    model: TemperatureModel = DEFAULT_TEMPERATURE_MODEL,
) -> float:
    """Exact inverse of :func:`bias_voltage_to_current`."""
    if not (i > 0.0):
        raise ParameterError(f"current must be > 0, got {i}")
    _check_temperature(temperature)
    u_t = thermal_voltage(temperature)
    return (u_t / dev.kappa) * math.log(i / _leakage_at(dev, temperature, model))


def dpi_params(
    spec: DpiSpec, dev: DeviceParams = DeviceParams(), temperature: float = 300.0
) -> tuple[float, float]:
    """(gain, tau) of the first-order filter realized by a DPI:
    gain = i_th/i_tau and tau = C*U_T/(kappa*i_tau)."""
    u_t = thermal_voltage(temperature)
    gain = spec.i_th / spec.i_tau
    tau = spec.c * u_t / (dev.kappa * spec.i_tau)
    return gain, tau


def uniform_scale(cfg: BiasConfiguration, lam: float) -> BiasConfiguration:
    """Scale every current-valued bias by lam and every time constant by
    1/lam; dimensionless gains are current ratios and stay fixed. Maps a
    solution I(t) to lam * I(lam * t)."""
    if not (lam > 0.0):
        raise ParameterError(f"scale factor must be > 0, got {lam}")
    return replace(
        cfg,
        tau_f=cfg.tau_f / lam,
        tau_s=cfg.tau_s / lam,
        tau_u=cfg.tau_u / lam,
        sig_f=replace(
            cfg.sig_f,
            i_thr=cfg.sig_f.i_thr * lam,
            i_lin=cfg.sig_f.i_lin * lam,
            i_gain0=cfg.sig_f.i_gain0 * lam,
        ),
        sig_s=replace(
            cfg.sig_s,
            i_thr=cfg.sig_s.i_thr * lam,
            i_lin=cfg.sig_s.i_lin * lam,
            i_gain0=cfg.sig_s.i_gain0 * lam,
        ),
    )


def speedup_factor(
    t_from: float, t_to: float, model: TemperatureModel = DEFAULT_TEMPERATURE_MODEL
) -> float:
    """Current multiplication factor when moving from t_from to t_to."""
    _check_temperature(t_from)
    _check_temperature(t_to)
    return math.exp(model.alpha_per_kelvin * (t_to - t_from))


def temperature_transform(
    cfg: BiasConfiguration,
    t_from: float,
    t_to: float,
    model: TemperatureModel = DEFAULT_TEMPERATURE_MODEL,
) -> BiasConfiguration:
    """Configuration as seen at t_to given biases set at t_from: a pure
    uniform scaling, so warming compresses trajectories in time without
    changing the firing regime. The measured shortening of bursts at high
    temperature is a known divergence this model intentionally omits."""
    return uniform_scale(cfg, speedup_factor(t_from, t_to, model))
