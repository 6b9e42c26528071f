/**
 * Minimal deterministic SVG builder: plain string assembly with fixed
 * number formatting, so identical inputs always produce identical bytes.
 */

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { top: 30, right: 20, bottom: 45, left: 55 };

// 10-color cycle; labels beyond the palette reuse colors
const PALETTE = [
  "#4269d0", "#efb118", "#ff725c", "#6cc5b0", "#3ca951",
  "#ff8ab7", "#a463f2", "#97bbf5", "#9c6b4e", "#9498a0",
];
export const DISCARDED_COLOR = "#c8c8c8";

export function clusterColor(label: number, discarded: boolean): string {
  return discarded ? DISCARDED_COLOR : PALETTE[label % PALETTE.length];
}

export function fmt(x: number): string {
  // fixed-width decimal keeps output byte-stable and diffs readable
  const s = x.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export interface Scale {
  (value: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0;
  const f = (value: number): number =>
    span === 0 ? (r0 + r1) / 2 : r0 + ((value - d0) / span) * (r1 - r0);
  const scale = f as Scale;
  scale.domain = domain;
  return scale;
}

export function niceTicks(domain: [number, number], count = 5): number[] {
  const [lo, hi] = domain;
  if (lo === hi) return [lo];
  const step = Math.pow(10, Math.floor(Math.log10((hi - lo) / count)));
  const err = (hi - lo) / count / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * mult;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12; v += s) {
    ticks.push(Math.round(v / s) * s);
  }
  return ticks;
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(width = WIDTH, height = HEIGHT) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="11">`,
    );
    this.parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  }

  raw(s: string): void {
    this.parts.push(s);
  }

  circle(cx: number, cy: number, r: number, fill: string): void {
    this.parts.push(`<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" fill="${fill}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke = "#333"): void {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
        `stroke="${stroke}" stroke-width="1"/>`,
    );
  }

  text(x: number, y: number, content: string, anchor = "middle"): void {
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" text-anchor="${anchor}" fill="#333">${content}</text>`,
    );
  }

  finish(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

/** Horizontal and vertical axes with tick marks and labels. */
export function drawAxes(
  doc: SvgDoc,
  xScale: Scale,
  yScale: Scale,
  xLabel: string,
  yLabel: string,
  plotLeft: number,
  plotRight: number,
  plotTop: number,
  plotBottom: number,
  xTicks = true,
): void {
  doc.line(plotLeft, plotBottom, plotRight, plotBottom);
  doc.line(plotLeft, plotTop, plotLeft, plotBottom);
  if (xTicks) {
    for (const t of niceTicks(xScale.domain)) {
      const x = xScale(t);
      doc.line(x, plotBottom, x, plotBottom + 4);
      doc.text(x, plotBottom + 16, trimTick(t));
    }
  }
  for (const t of niceTicks(yScale.domain)) {
    const y = yScale(t);
    doc.line(plotLeft - 4, y, plotLeft, y);
    doc.text(plotLeft - 7, y + 3.5, trimTick(t), "end");
  }
  doc.text((plotLeft + plotRight) / 2, plotBottom + 34, xLabel);
  doc.raw(
    `<text x="${fmt(14)}" y="${fmt((plotTop + plotBottom) / 2)}" text-anchor="middle" ` +
      `fill="#333" transform="rotate(-90 14 ${fmt((plotTop + plotBottom) / 2)})">${yLabel}</text>`,
  );
}

function trimTick(t: number): string {
  const s = t.toPrecision(4);
  return String(parseFloat(s));
}
