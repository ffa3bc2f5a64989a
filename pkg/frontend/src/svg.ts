/**
 * Minimal deterministic SVG line charts: no DOM, no timestamps, output
 * depends only on the input series.
 */

export interface Series {
  x: number[];
  y: number[];
  label: string;
  color: string;
  dash?: string;
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  width?: number;
  height?: number;
  /** series longer than this are decimated with a uniform stride */
  maxPoints?: number;
}

const MARGIN = { left: 64, right: 16, top: 34, bottom: 44 };

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
    throw new Error("cannot scale an empty or non-finite series");
  }
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  return [lo, hi];
}

function ticks(lo: number, hi: number, n = 6): number[] {
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = span / n / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = mult * step;
  const start = Math.ceil(lo / s) * s;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += s) {
    out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return out;
}

function fmt(v: number): string {
  const a = Math.abs(v);
  if (a !== 0 && (a >= 1e5 || a < 1e-3)) return v.toExponential(1);
  return String(Math.round(v * 1e6) / 1e6);
}

function decimate(xs: number[], ys: number[], maxPoints: number): [number[], number[]] {
  if (xs.length <= maxPoints) return [xs, ys];
  const stride = Math.ceil(xs.length / maxPoints);
  const x: number[] = [];
  const y: number[] = [];
  for (let i = 0; i < xs.length; i += stride) {
    x.push(xs[i]);
    y.push(ys[i]);
  }
  // always keep the final sample so the chart covers the full span
  if (x[x.length - 1] !== xs[xs.length - 1]) {
    x.push(xs[xs.length - 1]);
    y.push(ys[ys.length - 1]);
  }
  return [x, y];
}

export function lineChart(series: Series[], opts: ChartOptions): string {
  const width = opts.width ?? 860;
  const height = opts.height ?? 420;
  const maxPoints = opts.maxPoints ?? 2000;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const reduced = series.map((s) => {
    if (s.x.length !== s.y.length) {
      throw new Error(`series "${s.label}": x and y lengths differ`);
    }
    const [x, y] = decimate(s.x, s.y, maxPoints);
    return { ...s, x, y };
  });

  const [xLo, xHi] = extent(reduced.flatMap((s) => s.x));
  const [yLo, yHi] = extent(reduced.flatMap((s) => s.y));
  const sx = (v: number) => MARGIN.left + ((v - xLo) / (xHi - xLo)) * plotW;
  const sy = (v: number) => MARGIN.top + plotH - ((v - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);

  for (const tx of ticks(xLo, xHi)) {
    const px = sx(tx);
    parts.push(
      `<line x1="${px.toFixed(2)}" y1="${MARGIN.top}" x2="${px.toFixed(2)}" ` +
      `y2="${MARGIN.top + plotH}" stroke="#e0e0e0"/>`,
      `<text x="${px.toFixed(2)}" y="${MARGIN.top + plotH + 16}" ` +
      `text-anchor="middle">${fmt(tx)}</text>`,
    );
  }
  for (const ty of ticks(yLo, yHi)) {
    const py = sy(ty);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${py.toFixed(2)}" ` +
      `x2="${MARGIN.left + plotW}" y2="${py.toFixed(2)}" stroke="#e0e0e0"/>`,
      `<text x="${MARGIN.left - 6}" y="${(py + 4).toFixed(2)}" ` +
      `text-anchor="end">${fmt(ty)}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" ` +
    `height="${plotH}" fill="none" stroke="#444"/>`,
  );

  for (const s of reduced) {
    const pts = s.x
      .map((v, i) => `${sx(v).toFixed(2)},${sy(s.y[i]).toFixed(2)}`)
      .join(" ");
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(
      `<polyline fill="none" stroke="${s.color}" stroke-width="1.5"${dash} ` +
      `points="${pts}"/>`,
    );
  }

  parts.push(
    `<text x="${width / 2}" y="20" text-anchor="middle" font-size="15">` +
    `${opts.title}</text>`,
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 8}" ` +
    `text-anchor="middle">${opts.xLabel}</text>`,
    `<text x="16" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
    `transform="rotate(-90 16 ${MARGIN.top + plotH / 2})">${opts.yLabel}</text>`,
  );

  let ly = MARGIN.top + 10;
  for (const s of reduced) {
    const lx = MARGIN.left + plotW - 150;
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(
      `<line x1="${lx}" y1="${ly}" x2="${lx + 24}" y2="${ly}" ` +
      `stroke="${s.color}" stroke-width="1.5"${dash}/>`,
      `<text x="${lx + 30}" y="${ly + 4}">${s.label}</text>`,
    );
    ly += 18;
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
