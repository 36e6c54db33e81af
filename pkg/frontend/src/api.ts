// Thin fetch client for the workbench service. The UI computes no model
// math; every displayed number originates from these responses.

import type {
  BiasConfiguration,
  CurvesResponse,
  PresetMap,
  RegimeReport,
  SimulateResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function post<T>(base: string, path: string, body: unknown): Promise<T> {
  const res = await fetch(base + path, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!res.ok) {
    let detail = res.statusText;
    try {
      const data = await res.json();
      detail = typeof data.detail === "string" ? data.detail : JSON.stringify(data.detail);
    } catch {
      // keep statusText
    }
    throw new ApiError(res.status, detail);
  }
  return (await res.json()) as T;
}

export class ApiClient {
  constructor(private base: string = "") {}

  async presets(): Promise<PresetMap> {
    const res = await fetch(this.base + "/api/presets");
    if (!res.ok) throw new ApiError(res.status, res.statusText);
    return (await res.json()) as PresetMap;
  }

  simulate(
    bias: BiasConfiguration,
    stimulus_A: number,
    opts: { t_end?: number; decimation?: number } = {},
  ): Promise<SimulateResponse> {
    return post<SimulateResponse>(this.base, "/api/simulate", {
      bias,
      input: { segments: [[0.0, stimulus_A]] },
      solver: { t_end: opts.t_end ?? 10.0 },
      decimation: opts.decimation ?? 6000,
    });
  }

  classify(bias: BiasConfiguration): Promise<RegimeReport> {
    return post<RegimeReport>(this.base, "/api/classify", { bias });
  }

  curves(bias: BiasConfiguration): Promise<CurvesResponse> {
    return post<CurvesResponse>(this.base, "/api/curves", { bias });
  }
}
