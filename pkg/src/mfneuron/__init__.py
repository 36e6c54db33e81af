"""Behavioral simulator and tuning workbench for a current-mode
mixed-feedback silicon neuron.

The package integrates the three-timescale feedback ODEs with
positive-feedback inactivation, computes the steady-state curve geometry
that predicts spiking vs. bursting, maps device-level bias voltages and
capacitors to model parameters, and ships a CLI harness plus a local
HTTP service for the interactive workbench UI.
"""

from .model import (
    BiasConfiguration,
    InputSignal,
    NeuronState,
    ParameterError,
    SigmoidParams,
    effective_gains,
    sigmoid_eval,
    vector_field,
)
from .dynamics import (
    FiringMetrics,
    IntegrationDivergedError,
    SolverOptions,
    Trace,
    detect_spikes,
    firing_metrics,
    integrate,
    segment_bursts,
)
from .analysis import (
    RegimeReport,
    SteadyStateCurve,
    classify_regime,
    equilibria,
    neuromod_sweep,
    steady_state_curves,
)
from .devicemap import (
    DeviceParams,
    DpiSpec,
    bias_voltage_to_current,
    current_to_bias_voltage,
    dpi_params,
    temperature_transform,
    uniform_scale,
)
from .presets import PRESETS, get_preset

__version__ = "0.1.0"
