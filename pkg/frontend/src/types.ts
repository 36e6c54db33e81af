// Mirrors of the service API types. Units: amperes, seconds, kelvin.

export interface SigmoidParams {
  i_thr: number;
  i_lin: number;
  i_gain0: number;
}

export interface BiasConfiguration {
  tau_f: number;
  tau_s: number;
  tau_u: number;
  g_f: number;
  g_s: number;
  g_u: number;
  sig_f: SigmoidParams;
  sig_s: SigmoidParams;
  inactivation_enabled: boolean;
  rectify_filter_inputs: boolean;
}

export interface FiringMetrics {
  spike_rate_hz: number;
  burst_rate_hz: number | null;
  spikes_per_burst: number | null;
  spikes_per_burst_each: number[];
  duty_cycle: number;
  regime_label: "quiescent" | "tonic-spiking" | "bursting";
}

export interface SimulateResponse {
  trace: {
    t: number[];
    i_f: number[];
    i_s: number[];
    i_u: number[];
    i_app: number[];
  };
  spikes: number[];
  bursts: [number, number, number][];
  metrics: FiringMetrics;
}

export interface CurveData {
  grid: number[];
  i_app: number[];
  folds: [number, number][];
  bistability_window: [number, number] | null;
  multi_fold: boolean;
}

export interface RegimeReport {
  label: "resting" | "spiking-only" | "bursting-capable";
  fast_window_A: [number, number] | null;
  slow_window_A: [number, number] | null;
  ultraslow_monotone: boolean;
  rest_return_guaranteed: boolean;
}

export interface CurvesResponse {
  fast: CurveData;
  slow: CurveData;
  ultraslow: CurveData;
  report: RegimeReport;
}

export type PresetMap = Record<string, BiasConfiguration>;
