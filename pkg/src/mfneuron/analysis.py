"""Steady-state curve geometry and excitability classification.

The three steady-state curves express the applied current as a function
of the equilibrium fast current, obtained by equilibrating the filters
fastest-first with slower variables at their own equilibrium values and
positive-feedback inactivation ignored. Negative-slope segments mark
bistability; the relative position of the fast and slow bistability
windows decides whether the neuron can only spike tonically or is
capable of bursting.

All curves are parameterized by the equilibrium fast current i_eq; at a
full equilibrium the slow and ultraslow currents are g_s*i_eq and
g_u*i_eq.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import dynamics
from .model import (
    BiasConfiguration,
    InputSignal,
    NeuronState,
    ParameterError,
    set_param,
    sigmoid_eval,
    sigmoid_slope,
)

__all__ = [
    "SteadyStateCurve",
    "CurveSet",
    "RegimeReport",
    "Equilibrium",
    "NeuromodSweepReport",
    "steady_state_curves",
    "default_grid",
    "find_folds",
    "classify_regime",
    "equilibria",
    "firing_onset",
    "confirmation_input",
    "confirmation_metrics",
    "neuromod_sweep",
]

MIN_RESOLUTION = 256

# Fold position is refined to this fraction of the sampling step.
FOLD_REFINE_FRACTION = 1e-2

# Defaults for classifier confirmation simulations; the window must hold
# enough burst periods for stable event statistics.
CONFIRM_DT_TAU_F_FRACTION = 1.0 / 40.0
CONFIRM_T_END_TAU_U_MULTIPLE = 17.5


@dataclass
class SteadyStateCurve:
    """One sampled steady-state curve with its fold geometry.

    grid holds ascending equilibrium fast currents, i_app the applied
    current balancing each of them. folds are (i_eq, i_app) pairs where
    the slope changes sign; the bistability window is the i_app interval
    spanned by the outermost fold pair. expression/derivative are the
    analytic forms used to refine folds beyond grid resolution.
    """

    grid: np.ndarray
    i_app: np.ndarray
    folds: list[tuple[float, float]] = field(default_factory=list)
    bistability_window: Optional[tuple[float, float]] = None
    multi_fold: bool = False
    expression: Optional[Callable[[float], float]] = field(
        default=None, repr=False, compare=False
    )
    derivative: Optional[Callable[[float], float]] = field(
        default=None, repr=False, compare=False
    )


@dataclass
class CurveSet:
    fast: SteadyStateCurve
    slow: SteadyStateCurve
    ultraslow: SteadyStateCurve


@dataclass(frozen=True)
class RegimeReport:
    """Excitability classification with its supporting geometry."""

    label: str  # "resting" | "spiking-only" | "bursting-capable"
    fast_window: Optional[tuple[float, float]]
    slow_window: Optional[tuple[float, float]]
    ultraslow_monotone: bool
    rest_return_guaranteed: bool


@dataclass(frozen=True)
class Equilibrium:
    state: NeuronState
    stable: bool


def _curve_functions(cfg: BiasConfiguration):
    """Analytic expressions and derivatives of the three curves."""
    sig_f, sig_s = cfg.sig_f, cfg.sig_s
    gf0, gs0 = sig_f.i_gain0, sig_s.i_gain0
    inv_gf = 1.0 / cfg.g_f
    g_s, g_u = cfg.g_s, cfg.g_u

    # coefficient sums are formed first so the unit-gain case reduces to
    # the closed formulas (i_app = Ī − S_f, 2Ī − S_f − S_s, 3Ī − S_f − S_s)
    # with bit-identical arithmetic
    c_slow = inv_gf + g_s
    c_ultra = inv_gf + g_s + g_u

    def fast(i):
        return inv_gf * i - sigmoid_eval(i, sig_f, gf0)

    def fast_d(i):
        return inv_gf - sigmoid_slope(i, sig_f, gf0)

    def slow(i):
        return c_slow * i - sigmoid_eval(i, sig_f, gf0) - sigmoid_eval(g_s * i, sig_s, gs0)

    def slow_d(i):
        return c_slow - sigmoid_slope(i, sig_f, gf0) - g_s * sigmoid_slope(
            g_s * i, sig_s, gs0
        )

    def ultraslow(i):
        return c_ultra * i - sigmoid_eval(i, sig_f, gf0) - sigmoid_eval(g_s * i, sig_s, gs0)

    def ultraslow_d(i):
        return slow_d(i) + g_u

    return (fast, fast_d), (slow, slow_d), (ultraslow, ultraslow_d)


def default_grid(cfg: BiasConfiguration, resolution: int = 1024) -> tuple[float, float, int]:
    """A grid generous enough to contain all folds and the equilibria of
    inputs up to the saturated drive."""
    reach = max(
        cfg.sig_f.i_thr + 4.0 * cfg.sig_f.i_lin,
        (cfg.sig_s.i_thr + 4.0 * cfg.sig_s.i_lin) / cfg.g_s,
        cfg.g_f * (cfg.sig_f.i_gain0 + cfg.sig_s.i_gain0),
    )
    return (0.0, 2.0 * reach, resolution)


def steady_state_curves(
    cfg: BiasConfiguration,
    grid_min: float = 0.0,
    grid_max: Optional[float] = None,
    resolution: int = 1024,
) -> CurveSet:
    """Sample the fast/slow/ultraslow curves and locate their folds."""
    if grid_max is None:
        grid_min, grid_max, _ = default_grid(cfg)
    if grid_min < 0.0 or grid_max <= grid_min:
        raise ParameterError(f"grid must be positive, got [{grid_min}, {grid_max}]")
    if resolution < MIN_RESOLUTION:
        raise ParameterError(f"resolution must be >= {MIN_RESOLUTION}, got {resolution}")

    grid = np.linspace(grid_min, grid_max, resolution)
    curves = []
    for expr, deriv in _curve_functions(cfg):
        vals = np.array([expr(x) for x in grid])
        curve = SteadyStateCurve(
            grid=grid, i_app=vals, expression=expr, derivative=deriv
        )
        folds, window, multi = find_folds(curve)
        curve.folds = folds
        curve.bistability_window = window
        curve.multi_fold = multi
        curves.append(curve)
    return CurveSet(fast=curves[0], slow=curves[1], ultraslow=curves[2])


def find_folds(
    curve: SteadyStateCurve,
) -> tuple[list[tuple[float, float]], Optional[tuple[float, float]], bool]:
    """Folds (slope sign changes) and the bistability window they bound.

    Sign changes of the central-difference slope give brackets that are
    refined by bisection on the analytic derivative to 1/100 of the grid
    step. More than two folds is unusual but reported; the window then
    spans the outermost fold pair.
    """
    grid, i_app = curve.grid, curve.i_app
    if len(grid) < 3:
        return [], None, False
    step = grid[1] - grid[0]

    d = np.empty(len(grid) - 2)
    d[:] = (i_app[2:] - i_app[:-2]) / (grid[2:] - grid[:-2])
    signs = np.sign(d)
    # Treat exactly-zero samples as keeping the previous slope direction.
    for k in range(1, len(signs)):
        if signs[k] == 0.0:
            signs[k] = signs[k - 1]

    brackets = []
    for k in range(len(signs) - 1):
        if signs[k] != 0.0 and signs[k + 1] != 0.0 and signs[k] != signs[k + 1]:
            brackets.append((grid[k + 1], grid[k + 2]))

    deriv = curve.derivative
    if deriv is None and curve.expression is not None:
        expr = curve.expression
        h = step * 1e-3

        def deriv(x, _expr=expr, _h=h):
            return (_expr(x + _h) - _expr(x - _h)) / (2.0 * _h)

    folds: list[tuple[float, float]] = []
    for lo, hi in brackets:
        if deriv is not None:
            lo, hi = _bisect_sign_change(deriv, lo, hi, step * FOLD_REFINE_FRACTION)
        x = 0.5 * (lo + hi)
        y = curve.expression(x) if curve.expression is not None else float(
            np.interp(x, grid, i_app)
        )
        folds.append((float(x), float(y)))

    window = None
    if len(folds) >= 2:
        ys = [y for _, y in folds]
        window = (min(ys), max(ys))
    return folds, window, len(folds) > 2


def _bisect_sign_change(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo, lo
    if fhi == 0.0:
        return hi, hi
    if (flo > 0) == (fhi > 0):
        return lo, hi  # no strict sign change; keep the bracket as-is
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid, mid
        if (fm > 0) == (flo > 0):
            lo = mid
            flo = fm
        else:
            hi = mid
    return lo, hi


def classify_regime(
    fast: SteadyStateCurve, slow: SteadyStateCurve, ultraslow: SteadyStateCurve
) -> RegimeReport:
    """Excitability from the relative position of the bistability windows.

    No fast window means no spike upstroke: resting. Bursting requires the
    slow curve's unstable stretch to begin before the fast one, creating
    hysteresis between firing and silence that the ultraslow feedback
    sweeps across. The input thresholds of both windows are compared after
    mapping through the ultraslow curve, which translates each fold into
    the applied current that actually parks the full system there (reading
    inputs off the ultraslow curve's value axis); with a monotone
    ultraslow curve this is the same ordering as the folds' equilibrium
    currents.
    """
    if not (
        np.array_equal(fast.grid, slow.grid) and np.array_equal(fast.grid, ultraslow.grid)
    ):
        raise ParameterError("curves were sampled on mismatched grids")

    ultraslow_monotone = len(ultraslow.folds) == 0
    fast_w = fast.bistability_window
    slow_w = slow.bistability_window
    if fast_w is None or len(fast.folds) < 2:
        label = "resting"
    elif (
        slow_w is not None
        and len(slow.folds) >= 2
        and min(x for x, _ in slow.folds) < min(x for x, _ in fast.folds)
    ):
        label = "bursting-capable"
    else:
        label = "spiking-only"
    return RegimeReport(
        label=label,
        fast_window=fast_w,
        slow_window=slow_w,
        ultraslow_monotone=ultraslow_monotone,
        rest_return_guaranteed=ultraslow_monotone,
    )


def equilibria(
    cfg: BiasConfiguration,
    i_app: float,
    grid_max: Optional[float] = None,
    resolution: int = 4096,
) -> list[Equilibrium]:
    """All equilibria of the full (unrectified, no-inactivation) system.

    At equilibrium the slow and ultraslow currents are slaved to the fast
    one, so the roots of the ultraslow curve against i_app enumerate the
    full-system equilibria. Dense scan plus bisection; stability follows
    the sign of the ultraslow-curve slope at the root. If the scan range
    misses every root it is widened once before giving up.
    """
    (_, _), (_, _), (ultra, ultra_d) = _curve_functions(cfg)
    if grid_max is None:
        _, grid_max, _ = default_grid(cfg)
        grid_max = max(grid_max, 2.0 * cfg.g_f * abs(i_app))

    for attempt in range(2):
        roots = _scan_roots(lambda x: ultra(x) - i_app, 0.0, grid_max, resolution)
        if roots:
            break
        grid_max *= 10.0
    out = []
    for r in roots:
        state = NeuronState(i_f=r, i_s=cfg.g_s * r, i_u=cfg.g_u * r)
        out.append(Equilibrium(state=state, stable=ultra_d(r) > 0.0))
    return out


def _scan_roots(f, lo: float, hi: float, resolution: int) -> list[float]:
    xs = np.linspace(lo, hi, resolution)
    vals = np.array([f(x) for x in xs])
    roots = []
    for k in range(len(xs) - 1):
        a, b = vals[k], vals[k + 1]
        if a == 0.0:
            roots.append(float(xs[k]))
        elif (a < 0) != (b < 0):
            x0, x1 = xs[k], xs[k + 1]
            f0 = a
            for _ in range(200):
                xm = 0.5 * (x0 + x1)
                if xm == x0 or xm == x1:  # converged to ulp
                    break
                fm = f(xm)
                if fm == 0.0:
                    x0 = x1 = xm
                    break
                if (fm < 0) == (f0 < 0):
                    x0, f0 = xm, fm
                else:
                    x1 = xm
            roots.append(0.5 * (x0 + x1))
    if vals[-1] == 0.0:
        roots.append(float(xs[-1]))
    return roots


# Confirmation simulations run this far above the firing onset: close
# enough to the threshold that silence/firing hysteresis (bursting) shows
# itself, far enough to be robustly recruited.
CONFIRM_ONSET_MARGIN = 1.10

# Onset search: ladder rungs relative to the summed bias currents, then
# bisection between the last quiet and first firing rung.
ONSET_LADDER_STEPS = 40
ONSET_LADDER_SPAN = 2.5
ONSET_BISECTIONS = 14
ONSET_PROBE_T_END_TAU_U = 8.0


def firing_onset(cfg: BiasConfiguration) -> Optional[float]:
    """Smallest constant input that elicits sustained firing.

    Found on the dynamics themselves: a ladder scan locates the first
    firing rung (firing occupies a band, so a plain high bracket can land
    in depolarized silence), then bisection against the quiet rung below
    it. Deterministic; returns None if nothing on the ladder fires.
    """
    scale = cfg.sig_f.i_gain0 + cfg.sig_s.i_gain0 + cfg.sig_f.i_thr
    rungs = np.linspace(0.0, ONSET_LADDER_SPAN * scale, ONSET_LADDER_STEPS)
    hit = next((k for k in range(1, len(rungs)) if _fires(cfg, rungs[k])), None)
    if hit is None:
        return None
    lo, hi = rungs[hit - 1], rungs[hit]
    for _ in range(ONSET_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if _fires(cfg, mid):
            hi = mid
        else:
            lo = mid
    return hi


def _fires(cfg: BiasConfiguration, i_app: float) -> bool:
    opts = dynamics.SolverOptions(
        dt=cfg.tau_f * CONFIRM_DT_TAU_F_FRACTION,
        t_end=ONSET_PROBE_T_END_TAU_U * cfg.tau_u,
    )
    trace = dynamics.integrate(cfg, InputSignal.constant(i_app), opts)
    # the step-onset transient spike does not count as sustained firing
    settle = dynamics.TRANSIENT_TAU_U_MULTIPLE * cfg.tau_u
    return bool(np.any(np.asarray(trace.spikes) >= settle))


def confirmation_input(cfg: BiasConfiguration) -> float:
    """Constant input used to confirm a classification by simulation:
    just above the firing onset, where a bursting-capable neuron bursts
    (the silence branch is still reachable) and a spiking-only neuron
    spikes tonically. Zero when the neuron never fires."""
    onset = firing_onset(cfg)
    if onset is None:
        return 0.0
    return CONFIRM_ONSET_MARGIN * onset


@dataclass
class NeuromodSweepReport:
    """Outcome of sweeping one bias parameter across a range."""

    param: str
    values: list[float]
    labels: list[str]
    classifier_transition_index: Optional[int]
    sim_labels: list[str]
    sim_spikes_per_burst: list[Optional[float]]
    sim_burst_rates: list[Optional[float]]
    sim_transition_index: Optional[int]
    i_app_confirm: Optional[float]


def neuromod_sweep(
    cfg: BiasConfiguration,
    start: float,
    stop: float,
    steps: int,
    param: str = "sig_s.i_gain0",
    confirm: bool = True,
    i_app_confirm: Optional[float] = None,
    grid_max: Optional[float] = None,
    resolution: int = 1024,
) -> NeuromodSweepReport:
    """Classify (and optionally simulate) the neuron across a parameter
    range, reporting the smallest value that becomes bursting-capable.

    Each confirmation simulation drives its step's configuration just
    above that configuration's own firing onset (or at i_app_confirm if
    given), so the geometric classification and the simulated behavior
    are compared at equivalent operating points.
    """
    if steps < 8:
        raise ParameterError(f"sweep needs at least 8 steps, got {steps}")
    values = [float(v) for v in np.linspace(start, stop, steps)]

    labels = []
    sim_labels: list[str] = []
    sim_spb: list[Optional[float]] = []
    sim_br: list[Optional[float]] = []
    for v in values:
        cfg_v = set_param(cfg, param, v)
        curves = steady_state_curves(cfg_v, grid_max=grid_max, resolution=resolution)
        labels.append(classify_regime(curves.fast, curves.slow, curves.ultraslow).label)
        if confirm:
            i_app = confirmation_input(cfg_v) if i_app_confirm is None else i_app_confirm
            metrics = confirmation_metrics(cfg_v, i_app)
            sim_labels.append(metrics.regime_label)
            sim_spb.append(metrics.spikes_per_burst)
            sim_br.append(metrics.burst_rate)

    cls_idx = next((k for k, l in enumerate(labels) if l == "bursting-capable"), None)
    sim_idx = next((k for k, l in enumerate(sim_labels) if l == "bursting"), None)
    return NeuromodSweepReport(
        param=param,
        values=values,
        labels=labels,
        classifier_transition_index=cls_idx,
        sim_labels=sim_labels,
        sim_spikes_per_burst=sim_spb,
        sim_burst_rates=sim_br,
        sim_transition_index=sim_idx,
        i_app_confirm=i_app_confirm,
    )


def confirmation_metrics(cfg: BiasConfiguration, i_app: float) -> dynamics.FiringMetrics:
    """Firing metrics of a confirmation run at constant input."""
    opts = dynamics.SolverOptions(
        dt=cfg.tau_f * CONFIRM_DT_TAU_F_FRACTION,
        t_end=CONFIRM_T_END_TAU_U_MULTIPLE * cfg.tau_u,
    )
    trace = dynamics.integrate(cfg, InputSignal.constant(i_app), opts)
    return dynamics.firing_metrics(trace)
