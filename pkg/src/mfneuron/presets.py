"""Shipped bias presets.

All three share one family: fast sigmoid threshold well below its linear
range (so spike troughs re-arm the default detector), slow sigmoid a
narrow bump near the fast curve's lower fold, gains 1, millisecond to
hundreds-of-milliseconds time constants, inactivation on. The values
were found by sweeping the slow sigmoid gain and the input grid over
this family and keeping the points whose curve-geometry classification
and long simulations agree:

  * "tonic-spiker" (slow gain 0.30 nA): the slow curve's unstable
    stretch sits inside the fast fold interval; fires tonically from
    ~0.97 nA input, rate rising with input.
  * "burster" (slow gain 0.85 nA): the unstable stretch escapes below
    the fast fold; bursts just above ~0.82 nA input with burst rate
    rising with input, merging into fast tonic spiking near 1.0 nA.
    Sweeping its slow gain from half to double crosses exactly one
    spiking-to-bursting transition with growing spikes per burst.
  * "resting" (fast gain 0.55 nA): fast positive feedback too weak for
    a fold pair; no input on the ladder elicits sustained firing.

The acceptance suite re-verifies all of this on every run.
"""

from __future__ import annotations

from .model import BiasConfiguration, SigmoidParams

__all__ = ["PRESETS", "get_preset"]

_NA = 1e-9


def _family(i_gain0_fast: float, i_gain0_slow: float) -> BiasConfiguration:
    return BiasConfiguration(
        tau_f=1e-3,
        tau_s=20e-3,
        tau_u=800e-3,
        g_f=1.0,
        g_s=1.0,
        g_u=1.0,
        sig_f=SigmoidParams(i_thr=0.20 * _NA, i_lin=1.00 * _NA, i_gain0=i_gain0_fast * _NA),
        sig_s=SigmoidParams(i_thr=0.32 * _NA, i_lin=0.20 * _NA, i_gain0=i_gain0_slow * _NA),
        inactivation_enabled=True,
        rectify_filter_inputs=True,
    )


PRESETS: dict[str, BiasConfiguration] = {
    "resting": _family(0.55, 0.30),
    "tonic-spiker": _family(1.90, 0.30),
    "burster": _family(1.90, 0.85),
}


def get_preset(name: str) -> BiasConfiguration:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None
