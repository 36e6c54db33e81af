import { describe, expect, it, vi } from "vitest";

import {
  CURRENT_SLIDER_MAX_A,
  CURRENT_SLIDER_MIN_A,
  RequestSequencer,
  debounce,
  formatCurrent,
  positionToValue,
  validateField,
  valueToPosition,
} from "../src/scales.js";

describe("log slider mapping", () => {
  it("spans 1 pA to 100 nA over [0, 1]", () => {
    expect(positionToValue(0, CURRENT_SLIDER_MIN_A, CURRENT_SLIDER_MAX_A)).toBeCloseTo(1e-12, 20);
    expect(positionToValue(1, CURRENT_SLIDER_MIN_A, CURRENT_SLIDER_MAX_A)).toBeCloseTo(1e-7, 15);
  });

  it("round-trips positions and values", () => {
    for (const pos of [0, 0.1, 0.33, 0.5, 0.77, 1]) {
      const v = positionToValue(pos, CURRENT_SLIDER_MIN_A, CURRENT_SLIDER_MAX_A);
      expect(valueToPosition(v, CURRENT_SLIDER_MIN_A, CURRENT_SLIDER_MAX_A)).toBeCloseTo(pos, 9);
    }
  });

  it("is monotone (a right drag always raises the current)", () => {
    let prev = -1;
    for (let k = 0; k <= 100; k++) {
      const v = positionToValue(k / 100, CURRENT_SLIDER_MIN_A, CURRENT_SLIDER_MAX_A);
      expect(v).toBeGreaterThan(prev);
      prev = v;
    }
  });

  it("clamps out-of-range inputs", () => {
    expect(positionToValue(-0.5, 1e-12, 1e-7)).toBeCloseTo(1e-12, 20);
    expect(valueToPosition(1, 1e-12, 1e-7)).toBe(1);
    expect(valueToPosition(-5, 1e-12, 1e-7)).toBe(0);
  });
});

describe("formatCurrent", () => {
  it("uses engineering units", () => {
    expect(formatCurrent(2.3e-9)).toBe("2.30 nA");
    expect(formatCurrent(1.5e-10)).toBe("150 pA");
    expect(formatCurrent(2e-6)).toBe("2.00 µA");
    expect(formatCurrent(0)).toBe("0 A");
  });
});

describe("validateField", () => {
  it("rejects negative currents without sending a request", () => {
    expect(validateField("sig_s.i_gain0", -1e-9)).toMatch(/≥ 0/);
    expect(validateField("sig_s.i_gain0", 0)).toBeNull();
  });

  it("requires strictly positive widths, taus, and gains", () => {
    expect(validateField("sig_f.i_lin", 0)).toMatch(/> 0/);
    expect(validateField("tau_f", 0)).toMatch(/> 0/);
    expect(validateField("g_s", -1)).toMatch(/> 0/);
    expect(validateField("tau_f", 1e-3)).toBeNull();
  });

  it("rejects non-finite entries", () => {
    expect(validateField("sig_f.i_thr", NaN)).toMatch(/number/);
  });
});

describe("debounce", () => {
  it("collapses a slider drag into one trailing call", () => {
    vi.useFakeTimers();
    const hits: number[] = [];
    const fn = debounce((v: number) => hits.push(v), 150);
    for (let k = 0; k < 20; k++) {
      fn(k);
      vi.advanceTimersByTime(50);
    }
    vi.advanceTimersByTime(200);
    expect(hits).toEqual([19]);
    vi.useRealTimers();
  });
});

describe("RequestSequencer", () => {
  it("discards stale responses (last write wins)", () => {
    const seq = new RequestSequencer();
    const a = seq.issue();
    const b = seq.issue();
    expect(seq.accept(a)).toBe(false); // b is already in flight
    expect(seq.accept(b)).toBe(true);
  });

  it("accepts in-order responses", () => {
    const seq = new RequestSequencer();
    const a = seq.issue();
    expect(seq.accept(a)).toBe(true);
    const b = seq.issue();
    expect(seq.accept(b)).toBe(true);
    expect(seq.accept(b)).toBe(false); // duplicate
  });
});
