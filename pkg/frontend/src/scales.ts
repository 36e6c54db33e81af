// Pure UI logic: log slider mappings, field validation, debouncing, and
// the request sequencer that discards stale in-flight responses.

export const CURRENT_SLIDER_MIN_A = 1e-12; // 1 pA
export const CURRENT_SLIDER_MAX_A = 1e-7; // 100 nA
export const TAU_SLIDER_MIN_S = 1e-5;
export const TAU_SLIDER_MAX_S = 10.0;

/** Map a slider position in [0, 1] onto a log-spaced range. */
export function positionToValue(pos: number, min: number, max: number): number {
  const clamped = Math.min(1, Math.max(0, pos));
  return min * Math.pow(max / min, clamped);
}

/** Inverse of positionToValue, clamped to [0, 1]. */
export function valueToPosition(value: number, min: number, max: number): number {
  if (!(value > 0)) return 0;
  const pos = Math.log(value / min) / Math.log(max / min);
  return Math.min(1, Math.max(0, pos));
}

/** Engineering display of a current: "2.30 nA", "150 pA". */
export function formatCurrent(amps: number): string {
  if (amps === 0) return "0 A";
  const abs = Math.abs(amps);
  if (abs >= 1e-6) return `${(amps * 1e6).toPrecision(3)} µA`;
  if (abs >= 1e-9) return `${(amps * 1e9).toPrecision(3)} nA`;
  return `${(amps * 1e12).toPrecision(3)} pA`;
}

export function formatSeconds(s: number): string {
  if (s >= 1) return `${s.toPrecision(3)} s`;
  if (s >= 1e-3) return `${(s * 1e3).toPrecision(3)} ms`;
  return `${(s * 1e6).toPrecision(3)} µs`;
}

/**
 * Validate one numeric field edit before any request is sent.
 * Returns an error message, or null if the value is acceptable.
 */
export function validateField(name: string, value: number): string | null {
  if (!Number.isFinite(value)) return `${name} must be a number`;
  if (name.includes("i_lin") || name.startsWith("tau") || name.startsWith("g_")) {
    if (value <= 0) return `${name} must be > 0`;
  } else if (value < 0) {
    return `${name} must be ≥ 0 (currents are physical)`;
  }
  return null;
}

/** Trailing-edge debounce; slider drags produce bounded request rates. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  ms: number,
  timers: { set: typeof setTimeout; clear: typeof clearTimeout } = {
    set: setTimeout,
    clear: clearTimeout,
  },
): (...args: A) => void {
  let handle: ReturnType<typeof setTimeout> | null = null;
  return (...args: A) => {
    if (handle !== null) timers.clear(handle);
    handle = timers.set(() => {
      handle = null;
      fn(...args);
    }, ms);
  };
}

/**
 * Monotone sequence numbers for in-flight requests; a response is
 * accepted only if no newer request of the same kind has been issued
 * since (last-write-wins display).
 */
export class RequestSequencer {
  private issued = 0;
  private displayed = 0;

  issue(): number {
    this.issued += 1;
    return this.issued;
  }

  /** True if this response is fresher than everything shown so far. */
  accept(seq: number): boolean {
    if (seq < this.issued) return false; // a newer request is in flight
    if (seq <= this.displayed) return false;
    this.displayed = seq;
    return true;
  }
}
