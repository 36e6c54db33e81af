"""Acceptance suite: every primary criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS line per
criterion. Tolerances are pinned here, not configurable.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from mfneuron.analysis import (
    classify_regime,
    confirmation_input,
    confirmation_metrics,
    equilibria,
    neuromod_sweep,
    steady_state_curves,
)
from mfneuron.devicemap import (
    DEFAULT_FILTER_CAPACITORS_F,
    DeviceParams,
    DpiSpec,
    bias_voltage_to_current,
    current_to_bias_voltage,
    dpi_params,
    speedup_factor,
    temperature_transform,
    uniform_scale,
)
from mfneuron.dynamics import (
    SolverOptions,
    default_spike_thresholds,
    firing_metrics,
    integrate,
)
from mfneuron.harness import event_spans
from mfneuron.model import InputSignal, sigmoid_eval, vector_field
from mfneuron.presets import get_preset

NA = 1e-9

# Frozen confirmation inputs for the presets (1.10 x measured onset).
BURSTER_INPUT = 0.91 * NA
TONIC_INPUT = 1.1 * NA

# Staircase levels committed with the presets.
TONIC_STAIRCASE = [0.95 * NA, 1.05 * NA, 1.15 * NA, 1.25 * NA, 1.40 * NA, 1.60 * NA]
BURSTER_STAIRCASE = [0.84 * NA, 0.88 * NA, 0.91 * NA, 0.94 * NA, 0.97 * NA, 1.35 * NA]
STAIRCASE_LEVEL_S = {"tonic": 8.0, "burster": 10.0}


def _passed(name):
    print(f"\nACCEPTANCE {name}: PASS")


def test_scale_equivariance_law(tonic_spiker, burster):
    """lambda in {0.1, 10}: I_lambda(t) = lambda*I(lambda*t) to 1e-6
    relative under matched stepping; spike counts identical; < 10 s."""
    t0 = time.perf_counter()
    dt = tonic_spiker.tau_f / 40
    n = 40000
    base = integrate(
        tonic_spiker, InputSignal.constant(TONIC_INPUT), SolverOptions(dt=dt, t_end=n * dt)
    )
    for lam in (0.1, 10.0):
        scaled_cfg = uniform_scale(tonic_spiker, lam)
        scaled = integrate(
            scaled_cfg,
            InputSignal.constant(lam * TONIC_INPUT),
            SolverOptions(dt=dt / lam, t_end=n * dt / lam),
        )
        scale = np.max(np.abs(lam * base.i_f))
        rel = np.max(np.abs(scaled.i_f - lam * base.i_f)) / scale
        assert rel < 1e-6, f"lambda={lam}: relative error {rel:.2e}"
        assert len(scaled.spikes) == len(base.spikes)

    # burst-onset timing grazes the rest ghost below float resolution, so
    # the burster is held to the event-count part of the law
    nb = 240000
    base_b = integrate(
        burster, InputSignal.constant(BURSTER_INPUT), SolverOptions(dt=dt, t_end=nb * dt)
    )
    for lam in (0.1, 10.0):
        scaled = integrate(
            uniform_scale(burster, lam),
            InputSignal.constant(lam * BURSTER_INPUT),
            SolverOptions(dt=dt / lam, t_end=nb * dt / lam),
        )
        assert len(scaled.spikes) == len(base_b.spikes)
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0, f"runtime {elapsed:.1f} s exceeds 10 s"
    _passed(f"scale-equivariance (runtime {elapsed:.1f} s)")


def test_steady_state_oracle_equivalence(tonic_spiker, burster):
    """Equilibria zero the unrectified field to 1e-9 x state scale; fold
    windows match a 1e5-point brute scan within 0.1% of window width."""
    for cfg in (tonic_spiker, burster):
        raw = replace(cfg, rectify_filter_inputs=False, inactivation_enabled=False)
        for amp in (0.2 * NA, 0.6 * NA, 0.91 * NA, 1.4 * NA):
            eqs = equilibria(cfg, amp)
            assert eqs, f"no equilibrium found at {amp}"
            for eq in eqs:
                d = vector_field(eq.state, amp, raw)
                residuals = (
                    abs(d[0]) * cfg.tau_f,
                    abs(d[1]) * cfg.tau_s,
                    abs(d[2]) * cfg.tau_u,
                )
                scale = max(abs(eq.state.i_f), abs(eq.state.i_s), abs(eq.state.i_u), amp)
                assert max(residuals) < 1e-9 * scale

        cs = steady_state_curves(cfg)
        grid = np.linspace(0.0, float(cs.fast.grid[-1]), 100001)

        def brute_window(values):
            d = np.sign(np.diff(values))
            idx = np.flatnonzero(d[:-1] != d[1:]) + 1
            if idx.size < 2:
                return None
            return float(values[idx].min()), float(values[idx].max())

        s_f = np.array([sigmoid_eval(x, cfg.sig_f, cfg.sig_f.i_gain0) for x in grid])
        s_s = np.array([sigmoid_eval(x, cfg.sig_s, cfg.sig_s.i_gain0) for x in grid])
        for curve, values in ((cs.fast, grid - s_f), (cs.slow, 2 * grid - s_f - s_s)):
            brute = brute_window(values)
            assert (brute is None) == (curve.bistability_window is None)
            if brute is None:
                continue
            lo, hi = curve.bistability_window
            width = hi - lo
            assert abs(lo - brute[0]) < 1e-3 * width
            assert abs(hi - brute[1]) < 1e-3 * width
    _passed("steady-state-oracle")


def test_two_regime_geometry_reproduction(tonic_spiker, burster):
    """Slow stretch inside the fast fold interval => spiking-only and the
    simulation spikes tonically; slow stretch escaping below => capable of
    bursting and the simulation produces >= 2 bursts."""
    cs_t = steady_state_curves(tonic_spiker)
    rep_t = classify_regime(cs_t.fast, cs_t.slow, cs_t.ultraslow)
    assert rep_t.label == "spiking-only"
    xs_f = [x for x, _ in cs_t.fast.folds]
    xs_s = [x for x, _ in cs_t.slow.folds]
    assert min(xs_f) <= min(xs_s) and max(xs_s) <= max(xs_f), "slow stretch not inside fast"
    m_t = confirmation_metrics(tonic_spiker, TONIC_INPUT)
    assert m_t.regime_label == "tonic-spiking"
    assert len(m_t.spikes_per_burst_each) <= 1  # no repeated bursting

    cs_b = steady_state_curves(burster)
    rep_b = classify_regime(cs_b.fast, cs_b.slow, cs_b.ultraslow)
    assert rep_b.label == "bursting-capable"
    assert min(x for x, _ in cs_b.slow.folds) < min(x for x, _ in cs_b.fast.folds)
    m_b = confirmation_metrics(burster, BURSTER_INPUT)
    assert m_b.regime_label == "bursting"
    assert len(m_b.spikes_per_burst_each) >= 2
    _passed("regime-geometry")


def test_neuromodulation_monotonicity(burster):
    """Slow gain halved to doubled over 16 steps: exactly one
    spiking-to-bursting transition, non-decreasing spikes per burst across
    the bursting block, classifier and simulation indices within 1 step."""
    gs0 = burster.sig_s.i_gain0
    report = neuromod_sweep(burster, 0.5 * gs0, 2.0 * gs0, steps=16)

    transitions = sum(
        1
        for a, b in zip(report.sim_labels, report.sim_labels[1:])
        if a == "tonic-spiking" and b == "bursting"
    )
    assert transitions == 1, f"sim labels {report.sim_labels}"
    assert report.sim_transition_index is not None
    assert report.classifier_transition_index is not None
    assert abs(report.sim_transition_index - report.classifier_transition_index) <= 1

    # spikes per burst across the contiguous bursting block
    block = [
        spb
        for label, spb in zip(report.sim_labels, report.sim_spikes_per_burst)
        if label == "bursting"
    ]
    assert len(block) >= 2
    assert all(b >= a - 1e-9 for a, b in zip(block, block[1:])), f"spb {block}"
    # past the block the merged regime is fast tonic spiking, never quiet
    tail = report.sim_labels[report.sim_transition_index + len(block):]
    assert all(l == "tonic-spiking" for l in tail)
    _passed(
        f"neuromod-monotonicity (cls idx {report.classifier_transition_index}, "
        f"sim idx {report.sim_transition_index}, spb {['%.1f' % b for b in block]})"
    )


def _staircase_metrics(cfg, amplitudes, level):
    sig = InputSignal.staircase(amplitudes, level)
    opts = SolverOptions(dt=cfg.tau_f / 40, t_end=level * len(amplitudes))
    trace = integrate(cfg, sig, opts)
    settle = 3.0 * cfg.tau_u
    return [
        firing_metrics(trace, window_start=k * level + settle, window_end=(k + 1) * level)
        for k in range(len(amplitudes))
    ]


def test_input_staircase(tonic_spiker, burster):
    """Six-level staircases: spike rate (spiking preset) and burst rate
    (bursting preset) non-decreasing; the top level flips the burster to
    fast tonic spiking."""
    tonic_levels = _staircase_metrics(tonic_spiker, TONIC_STAIRCASE, STAIRCASE_LEVEL_S["tonic"])
    rates = [m.spike_rate for m in tonic_levels]
    assert all(b >= a for a, b in zip(rates, rates[1:])), f"rates {rates}"

    burst_levels = _staircase_metrics(
        burster, BURSTER_STAIRCASE, STAIRCASE_LEVEL_S["burster"]
    )
    labels = [m.regime_label for m in burst_levels]
    assert labels[-1] == "tonic-spiking", f"labels {labels}"
    bursting = [m for m in burst_levels if m.regime_label == "bursting"]
    assert len(bursting) >= 2
    brates = [m.burst_rate for m in bursting]
    assert all(b >= a for a, b in zip(brates, brates[1:])), f"burst rates {brates}"
    _passed(
        f"input-staircase (rates {['%.1f' % r for r in rates]}, "
        f"burst rates {['%.2f' % r for r in brates]}, top {labels[-1]})"
    )


def test_temperature_behavior(burster, tonic_spiker):
    """45C / 5C frequency ratio = 50 +- 5%; traces at different
    temperatures are exact time-compressed images; labels invariant."""
    t_cold, t_ref, t_hot = 278.15, 298.15, 318.15
    ratio_exact = speedup_factor(t_cold, t_hot)
    assert ratio_exact == pytest.approx(50.0, rel=1e-9)

    # measured burst frequency ratio between the two extremes
    rates = {}
    for t_k in (t_cold, t_hot):
        s = speedup_factor(t_ref, t_k)
        cfg = temperature_transform(burster, t_ref, t_k)
        opts = SolverOptions(dt=cfg.tau_f / 40, t_end=14.0 / s)
        trace = integrate(cfg, InputSignal.constant(s * BURSTER_INPUT), opts)
        m = firing_metrics(trace)
        assert m.regime_label == "bursting"  # regime invariant
        rates[t_k] = m.burst_rate
    measured = rates[t_hot] / rates[t_cold]
    assert abs(measured - 50.0) <= 2.5, f"measured ratio {measured}"

    # exact time compression at matched stepping (same tolerance as the
    # scale law), checked on the tonic preset's well-posed trajectory
    n = 40000
    dt = tonic_spiker.tau_f / 40
    cold_cfg = temperature_transform(tonic_spiker, t_ref, t_cold)
    s_cold = speedup_factor(t_ref, t_cold)
    cold = integrate(
        cold_cfg,
        InputSignal.constant(s_cold * TONIC_INPUT),
        SolverOptions(dt=dt / s_cold, t_end=n * dt / s_cold),
    )
    hot_cfg = temperature_transform(tonic_spiker, t_ref, t_hot)
    s_hot = speedup_factor(t_ref, t_hot)
    hot = integrate(
        hot_cfg,
        InputSignal.constant(s_hot * TONIC_INPUT),
        SolverOptions(dt=dt / s_hot, t_end=n * dt / s_hot),
    )
    factor = s_hot / s_cold
    scale = np.max(np.abs(factor * cold.i_f))
    rel = np.max(np.abs(hot.i_f - factor * cold.i_f)) / scale
    assert rel < 1e-6, f"time-compression error {rel:.2e}"
    assert len(hot.spikes) == len(cold.spikes)

    # classifier labels invariant under the transform
    for cfg in (burster, tonic_spiker):
        labels = set()
        for t_k in (t_cold, t_ref, t_hot):
            c = temperature_transform(cfg, t_ref, t_k)
            cs = steady_state_curves(c)
            labels.add(classify_regime(cs.fast, cs.slow, cs.ultraslow).label)
        assert len(labels) == 1
    _passed(f"temperature (measured ratio {measured:.2f})")


def test_inactivation_effect(tonic_spiker, burster):
    """Identical biases: enabling inactivation strictly reduces per-spike
    width and per-burst duration (time above the fall-threshold envelope)
    on both presets."""
    for cfg, amp in ((tonic_spiker, TONIC_INPUT), (burster, BURSTER_INPUT)):
        widths = {}
        for enabled in (True, False):
            variant = replace(cfg, inactivation_enabled=enabled)
            opts = SolverOptions(dt=cfg.tau_f / 40, t_end=6.0)
            trace = integrate(variant, InputSignal.constant(amp), opts)
            _, fall = default_spike_thresholds(variant)
            spans = event_spans(trace, fall)
            assert spans, f"no events with inactivation={enabled}"
            widths[enabled] = {
                "mean": float(np.mean([b - a for a, b in spans])),
                "first": spans[0][1] - spans[0][0],
            }
        assert widths[True]["mean"] < widths[False]["mean"]
        assert widths[True]["first"] < widths[False]["first"]
    _passed("inactivation-effect")


def test_integrator_convergence(tonic_spiker, burster):
    """Halving dt changes spike counts by <= 1 and reduces smooth-segment
    error by >= 8x against a dt/8 reference."""
    for cfg, amp in ((tonic_spiker, TONIC_INPUT), (burster, BURSTER_INPUT)):
        c1 = integrate(cfg, InputSignal.constant(amp),
                       SolverOptions(dt=cfg.tau_f / 40, t_end=8.0))
        c2 = integrate(cfg, InputSignal.constant(amp),
                       SolverOptions(dt=cfg.tau_f / 80, t_end=8.0))
        assert abs(len(c1.spikes) - len(c2.spikes)) <= 1

    # smooth segment: subthreshold relaxation in the exact-equations mode
    # (no rectification kink, no gain clamp), where the field is C-infinity
    cfg = replace(tonic_spiker, rectify_filter_inputs=False, inactivation_enabled=False)
    amp = 0.18 * NA
    dt = cfg.tau_f / 20
    t_end = 0.2
    runs = {}
    for div in (1, 2, 8):
        runs[div] = integrate(
            cfg, InputSignal.constant(amp), SolverOptions(dt=dt / div, t_end=t_end)
        )
        assert len(runs[div].spikes) == 0  # genuinely smooth
    ref = runs[8]
    e1 = np.max(np.abs(runs[1].i_f - ref.i_f[::8]))
    e2 = np.max(np.abs(runs[2].i_f - ref.i_f[::4]))
    assert e2 > 0
    ratio = e1 / e2
    assert ratio >= 8.0, f"observed convergence ratio {ratio:.2f}"
    _passed(f"integrator-convergence (ratio {ratio:.1f})")


def test_device_map_arithmetic():
    """DPI tau for 0.5 pF vs 8 pF differs by exactly 16x; voltage/current
    maps invert to 1e-12 V over eight decades."""
    dev = DeviceParams()
    small = DpiSpec(c=DEFAULT_FILTER_CAPACITORS_F["fast"], i_tau=80e-12, i_th=120e-12)
    big = DpiSpec(c=DEFAULT_FILTER_CAPACITORS_F["ultraslow"], i_tau=80e-12, i_th=120e-12)
    _, tau_small = dpi_params(small, dev, 300.0)
    _, tau_big = dpi_params(big, dev, 300.0)
    assert tau_big == 16.0 * tau_small

    for temperature in (278.15, 300.0, 318.15):
        i0 = bias_voltage_to_current(0.0, dev, temperature)
        lo = math.log10(i0) + 0.5
        for i in np.logspace(lo, lo + 8.0, 25):
            v = current_to_bias_voltage(i, dev, temperature)
            v2 = current_to_bias_voltage(
                bias_voltage_to_current(v, dev, temperature), dev, temperature
            )
            assert abs(v2 - v) < 1e-12
    _passed("device-map-arithmetic")
