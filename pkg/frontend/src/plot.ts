// Small canvas plotter: line series, event markers, shaded value bands.
// Rendering is pure with respect to the supplied data.

export interface Series {
  xs: number[];
  ys: number[];
  color: string;
  width?: number;
}

export interface Marker {
  x: number;
  color: string;
}

export interface Span {
  x0: number;
  x1: number;
  color: string;
}

/** Horizontal band over a y-value interval (bistability window shading). */
export interface YBand {
  lo: number;
  hi: number;
  color: string;
}

export interface PlotOptions {
  series: Series[];
  markers?: Marker[];
  spans?: Span[];
  ybands?: YBand[];
  xLabel?: string;
  yLabel?: string;
}

const MARGIN = { left: 56, right: 10, top: 8, bottom: 26 };

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!isFinite(lo) || !isFinite(hi)) return [0, 1];
  if (lo === hi) return [lo - 1, hi + 1];
  return [lo, hi];
}

export function drawPlot(canvas: HTMLCanvasElement, opts: PlotOptions): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const w = canvas.width;
  const h = canvas.height;
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, w, h);

  const allX = opts.series.flatMap((s) => s.xs);
  const allY = opts.series.flatMap((s) => s.ys);
  const [x0, x1] = extent(allX);
  const [yLo, yHi] = extent(allY.concat((opts.ybands ?? []).flatMap((b) => [b.lo, b.hi])));
  const pad = 0.06 * (yHi - yLo);
  const y0 = yLo - pad;
  const y1 = yHi + pad;

  const px = (x: number) =>
    MARGIN.left + ((x - x0) / (x1 - x0 || 1)) * (w - MARGIN.left - MARGIN.right);
  const py = (y: number) =>
    h - MARGIN.bottom - ((y - y0) / (y1 - y0 || 1)) * (h - MARGIN.top - MARGIN.bottom);

  // shaded y-bands first, under everything
  for (const band of opts.ybands ?? []) {
    ctx.fillStyle = band.color;
    const top = py(band.hi);
    ctx.fillRect(MARGIN.left, top, w - MARGIN.left - MARGIN.right, py(band.lo) - top);
  }
  // event spans along the bottom edge
  for (const span of opts.spans ?? []) {
    ctx.fillStyle = span.color;
    ctx.fillRect(px(span.x0), h - MARGIN.bottom - 5, Math.max(px(span.x1) - px(span.x0), 2), 4);
  }

  // axes
  ctx.strokeStyle = "#3a4452";
  ctx.lineWidth = 1;
  ctx.strokeRect(MARGIN.left, MARGIN.top, w - MARGIN.left - MARGIN.right, h - MARGIN.top - MARGIN.bottom);

  // ticks
  ctx.fillStyle = "#8a97a8";
  ctx.font = "10px sans-serif";
  ctx.textAlign = "center";
  for (let k = 0; k <= 4; k++) {
    const x = x0 + (k / 4) * (x1 - x0);
    ctx.fillText(x.toPrecision(3), px(x), h - MARGIN.bottom + 14);
  }
  ctx.textAlign = "right";
  for (let k = 0; k <= 4; k++) {
    const y = y0 + (k / 4) * (y1 - y0);
    ctx.fillText(y.toExponential(1), MARGIN.left - 4, py(y) + 3);
  }
  if (opts.xLabel) {
    ctx.textAlign = "center";
    ctx.fillText(opts.xLabel, MARGIN.left + (w - MARGIN.left - MARGIN.right) / 2, h - 4);
  }
  if (opts.yLabel) {
    ctx.save();
    ctx.translate(10, MARGIN.top + (h - MARGIN.top - MARGIN.bottom) / 2);
    ctx.rotate(-Math.PI / 2);
    ctx.textAlign = "center";
    ctx.fillText(opts.yLabel, 0, 0);
    ctx.restore();
  }

  // markers (spike ticks)
  for (const m of opts.markers ?? []) {
    ctx.strokeStyle = m.color;
    ctx.beginPath();
    ctx.moveTo(px(m.x), MARGIN.top);
    ctx.lineTo(px(m.x), MARGIN.top + 8);
    ctx.stroke();
  }

  // line series
  for (const s of opts.series) {
    if (s.xs.length === 0) continue;
    ctx.strokeStyle = s.color;
    ctx.lineWidth = s.width ?? 1.4;
    ctx.beginPath();
    ctx.moveTo(px(s.xs[0]), py(s.ys[0]));
    for (let k = 1; k < s.xs.length; k++) {
      ctx.lineTo(px(s.xs[k]), py(s.ys[k]));
    }
    ctx.stroke();
  }
}
