// Workbench wiring: bias panel -> debounced service calls -> views.
// The software analog of the bench: adjust a bias, observe the regime,
// adjust again. All numbers displayed come from API responses.

import { ApiClient, ApiError } from "./api.js";
import {
  CURRENT_SLIDER_MAX_A,
  CURRENT_SLIDER_MIN_A,
  RequestSequencer,
  TAU_SLIDER_MAX_S,
  TAU_SLIDER_MIN_S,
  debounce,
  formatCurrent,
  formatSeconds,
  positionToValue,
  validateField,
  valueToPosition,
} from "./scales.js";
import { drawPlot } from "./plot.js";
import type { BiasConfiguration, CurvesResponse, SimulateResponse } from "./types.js";

const NA = 1e-9;
const DEBOUNCE_MS = 150;
const SIM_T_END_S = 10.0;

// Bench-note stimulus defaults per preset (just above each firing onset);
// adjustable with the stimulus slider.
const PRESET_STIMULUS_A: Record<string, number> = {
  burster: 0.91 * NA,
  "tonic-spiker": 1.1 * NA,
  resting: 0.6 * NA,
};

interface FieldSpec {
  path: string;
  label: string;
  kind: "current" | "tau" | "gain";
}

const FIELDS: FieldSpec[] = [
  { path: "sig_f.i_gain0", label: "fast sigmoid gain I_Gf0", kind: "current" },
  { path: "sig_f.i_thr", label: "fast sigmoid threshold I_thr_f", kind: "current" },
  { path: "sig_f.i_lin", label: "fast sigmoid width I_lin_f", kind: "current" },
  { path: "sig_s.i_gain0", label: "slow sigmoid gain I_Gs0", kind: "current" },
  { path: "sig_s.i_thr", label: "slow sigmoid threshold I_thr_s", kind: "current" },
  { path: "sig_s.i_lin", label: "slow sigmoid width I_lin_s", kind: "current" },
  { path: "tau_f", label: "fast time constant τ_f", kind: "tau" },
  { path: "tau_s", label: "slow time constant τ_s", kind: "tau" },
  { path: "tau_u", label: "ultraslow time constant τ_u", kind: "tau" },
  { path: "g_f", label: "fast filter gain G_f", kind: "gain" },
  { path: "g_s", label: "slow filter gain G_s", kind: "gain" },
  { path: "g_u", label: "ultraslow filter gain G_u", kind: "gain" },
];

function getPath(bias: BiasConfiguration, path: string): number {
  const parts = path.split(".");
  let node: unknown = bias;
  for (const p of parts) node = (node as Record<string, unknown>)[p];
  return node as number;
}

function setPath(bias: BiasConfiguration, path: string, value: number): void {
  const parts = path.split(".");
  let node: Record<string, unknown> = bias as unknown as Record<string, unknown>;
  for (const p of parts.slice(0, -1)) node = node[p] as Record<string, unknown>;
  node[parts[parts.length - 1]] = value;
}

const api = new ApiClient("");
const simSeq = new RequestSequencer();
const classifySeq = new RequestSequencer();

const state = {
  bias: null as BiasConfiguration | null,
  stimulus: 1.0 * NA,
  showSlow: false,
  showUltra: false,
  lastSim: null as SimulateResponse | null,
  lastCurves: null as CurvesResponse | null,
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setError(message: string | null, fieldPath: string | null = null): void {
  const box = el<HTMLDivElement>("error-box");
  box.textContent = message ?? "";
  box.style.display = message ? "block" : "none";
  document.querySelectorAll(".field-row").forEach((row) => row.classList.remove("invalid"));
  if (fieldPath) {
    const row = document.querySelector(`[data-path="${fieldPath}"]`);
    row?.classList.add("invalid");
  }
}

function fieldRange(kind: FieldSpec["kind"]): [number, number] {
  if (kind === "current") return [CURRENT_SLIDER_MIN_A, CURRENT_SLIDER_MAX_A];
  if (kind === "tau") return [TAU_SLIDER_MIN_S, TAU_SLIDER_MAX_S];
  return [0.05, 3.0];
}

function fieldFormat(kind: FieldSpec["kind"], v: number): string {
  if (kind === "current") return formatCurrent(v);
  if (kind === "tau") return formatSeconds(v);
  return v.toPrecision(3);
}

function buildPanel(): void {
  const panel = el<HTMLDivElement>("bias-panel");
  for (const spec of FIELDS) {
    const row = document.createElement("div");
    row.className = "field-row";
    row.dataset.path = spec.path;
    const label = document.createElement("label");
    label.textContent = spec.label;
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = "0";
    slider.max = "1000";
    slider.dataset.path = spec.path;
    const entry = document.createElement("input");
    entry.type = "number";
    entry.step = "any";
    entry.className = "entry";
    const unit = document.createElement("span");
    unit.className = "unit";

    const [lo, hi] = fieldRange(spec.kind);
    const apply = (value: number, fromSlider: boolean) => {
      const err = validateField(spec.path, value);
      if (err) {
        setError(err, spec.path);
        return; // invalid entry: no request is sent
      }
      setError(null);
      if (!state.bias) return;
      setPath(state.bias, spec.path, value);
      if (!fromSlider) {
        slider.value = String(Math.round(valueToPosition(value, lo, hi) * 1000));
      }
      entry.value = value.toExponential(4);
      unit.textContent = fieldFormat(spec.kind, value);
      el<HTMLSelectElement>("preset-select").value = "";
      scheduleRefresh();
    };
    slider.addEventListener("input", () => {
      const pos = Number(slider.value) / 1000;
      const value =
        spec.kind === "gain" ? lo + pos * (hi - lo) : positionToValue(pos, lo, hi);
      apply(value, true);
    });
    entry.addEventListener("change", () => apply(Number(entry.value), false));

    row.append(label, slider, entry, unit);
    panel.append(row);
  }

  const stim = el<HTMLInputElement>("stimulus-slider");
  stim.addEventListener("input", () => {
    state.stimulus = positionToValue(Number(stim.value) / 1000, CURRENT_SLIDER_MIN_A, CURRENT_SLIDER_MAX_A);
    el<HTMLSpanElement>("stimulus-value").textContent = formatCurrent(state.stimulus);
    scheduleRefresh();
  });
  el<HTMLInputElement>("toggle-slow").addEventListener("change", (e) => {
    state.showSlow = (e.target as HTMLInputElement).checked;
    renderTrace();
  });
  el<HTMLInputElement>("toggle-ultra").addEventListener("change", (e) => {
    state.showUltra = (e.target as HTMLInputElement).checked;
    renderTrace();
  });
  for (const flag of ["inactivation_enabled", "rectify_filter_inputs"] as const) {
    el<HTMLInputElement>(`flag-${flag}`).addEventListener("change", (e) => {
      if (!state.bias) return;
      state.bias[flag] = (e.target as HTMLInputElement).checked;
      scheduleRefresh();
    });
  }
}

function syncPanel(): void {
  if (!state.bias) return;
  for (const spec of FIELDS) {
    const row = document.querySelector(`[data-path="${spec.path}"]`);
    if (!row) continue;
    const [lo, hi] = fieldRange(spec.kind);
    const value = getPath(state.bias, spec.path);
    const slider = row.querySelector("input[type=range]") as HTMLInputElement;
    const entry = row.querySelector(".entry") as HTMLInputElement;
    const unit = row.querySelector(".unit") as HTMLSpanElement;
    slider.value =
      spec.kind === "gain"
        ? String(Math.round(((value - lo) / (hi - lo)) * 1000))
        : String(Math.round(valueToPosition(value, lo, hi) * 1000));
    entry.value = value.toExponential(4);
    unit.textContent = fieldFormat(spec.kind, value);
  }
  el<HTMLInputElement>("flag-inactivation_enabled").checked = state.bias.inactivation_enabled;
  el<HTMLInputElement>("flag-rectify_filter_inputs").checked = state.bias.rectify_filter_inputs;
  const stim = el<HTMLInputElement>("stimulus-slider");
  stim.value = String(
    Math.round(valueToPosition(state.stimulus, CURRENT_SLIDER_MIN_A, CURRENT_SLIDER_MAX_A) * 1000),
  );
  el<HTMLSpanElement>("stimulus-value").textContent = formatCurrent(state.stimulus);
}

function setBadge(label: string): void {
  const badge = el<HTMLSpanElement>("regime-badge");
  badge.textContent = label;
  badge.className = `badge badge-${label}`;
}

function renderTrace(): void {
  const canvas = el<HTMLCanvasElement>("trace-canvas");
  const sim = state.lastSim;
  if (!sim) {
    drawPlot(canvas, { series: [] });
    return;
  }
  const series = [{ xs: sim.trace.t, ys: sim.trace.i_f, color: "#5ad27d", width: 1.4 }];
  if (state.showSlow) series.push({ xs: sim.trace.t, ys: sim.trace.i_s, color: "#e4b43c", width: 1.0 });
  if (state.showUltra) series.push({ xs: sim.trace.t, ys: sim.trace.i_u, color: "#c65ccf", width: 1.0 });
  drawPlot(canvas, {
    series,
    markers: sim.spikes.map((t) => ({ x: t, color: "#f2f5f8" })),
    spans: sim.bursts.map(([a, b]) => ({ x0: a, x1: b, color: "#5a8dd2" })),
    xLabel: "t (s)",
    yLabel: "I (A)",
  });
  const m = sim.metrics;
  el<HTMLDivElement>("metrics").textContent =
    `${m.regime_label} · ${m.spike_rate_hz.toFixed(2)} Hz` +
    (m.burst_rate_hz ? ` · ${m.burst_rate_hz.toFixed(2)} bursts/s` : "") +
    (m.spikes_per_burst ? ` · ${m.spikes_per_burst.toFixed(1)} spikes/burst` : "");
}

function renderCurves(): void {
  const canvas = el<HTMLCanvasElement>("curve-canvas");
  const curves = state.lastCurves;
  if (!curves) {
    drawPlot(canvas, { series: [] });
    return;
  }
  const ybands = [];
  if (curves.fast.bistability_window) {
    ybands.push({
      lo: curves.fast.bistability_window[0],
      hi: curves.fast.bistability_window[1],
      color: "rgba(226, 88, 88, 0.18)",
    });
  }
  if (curves.slow.bistability_window) {
    ybands.push({
      lo: curves.slow.bistability_window[0],
      hi: curves.slow.bistability_window[1],
      color: "rgba(88, 196, 226, 0.18)",
    });
  }
  drawPlot(canvas, {
    series: [
      { xs: curves.fast.grid, ys: curves.fast.i_app, color: "#e25858" },
      { xs: curves.slow.grid, ys: curves.slow.i_app, color: "#58c4e2" },
      { xs: curves.ultraslow.grid, ys: curves.ultraslow.i_app, color: "#9aa7b8" },
    ],
    ybands,
    xLabel: "equilibrium current (A)",
    yLabel: "applied current (A)",
  });
}

async function refresh(): Promise<void> {
  if (!state.bias) return;
  const bias = JSON.parse(JSON.stringify(state.bias)) as BiasConfiguration;
  const stimulus = state.stimulus;

  const simTicket = simSeq.issue();
  api
    .simulate({ ...bias }, stimulus, { t_end: SIM_T_END_S })
    .then((res) => {
      if (!simSeq.accept(simTicket)) return; // stale response discarded
      state.lastSim = res;
      setError(null);
      renderTrace();
    })
    .catch((err) => showApiError(err));

  const classifyTicket = classifySeq.issue();
  Promise.all([api.classify(bias), api.curves(bias)])
    .then(([report, curves]) => {
      if (!classifySeq.accept(classifyTicket)) return;
      setBadge(report.label);
      state.lastCurves = curves;
      renderCurves();
    })
    .catch((err) => showApiError(err));
}

function showApiError(err: unknown): void {
  if (err instanceof ApiError) {
    // validator messages name the offending field; highlight it
    const field = FIELDS.find((f) => err.detail.includes(f.path.split(".").pop() ?? ""));
    setError(err.detail, field?.path ?? null);
  } else {
    setError(String(err));
  }
}

const scheduleRefresh = debounce(() => void refresh(), DEBOUNCE_MS);

async function init(): Promise<void> {
  buildPanel();
  const presets = await api.presets();
  const select = el<HTMLSelectElement>("preset-select");
  for (const name of Object.keys(presets).sort()) {
    const opt = document.createElement("option");
    opt.value = name;
    opt.textContent = name;
    select.append(opt);
  }
  select.addEventListener("change", () => {
    const name = select.value;
    if (!name || !(name in presets)) return;
    state.bias = JSON.parse(JSON.stringify(presets[name])) as BiasConfiguration;
    state.stimulus = PRESET_STIMULUS_A[name] ?? 1.0 * NA;
    syncPanel();
    void refresh();
    select.value = name;
  });
  select.value = "burster";
  select.dispatchEvent(new Event("change"));
}

if (typeof document !== "undefined" && document.getElementById("bias-panel")) {
  void init();
}
