/**
 * The four figure kinds, each a pure function from parsed inputs to an
 * SVG string. File IO stays in the CLI so tests can render in memory.
 */

import {
  ClusterInfo,
  PartitionRow,
  PositionRow,
  SchemaError,
  SpectrumRow,
} from "./data.js";
import {
  HEIGHT,
  MARGIN,
  Scale,
  SvgDoc,
  WIDTH,
  clusterColor,
  drawAxes,
  fmt,
  linearScale,
} from "./svg.js";

const MAX_SCATTER_EIGENVALUES = 20;
const HISTOGRAM_BINS = 20;

/** Scatter of the leading eigenvalues next to a histogram of all of them. */
export function renderSpectrum(rows: SpectrumRow[]): string {
  const doc = new SvgDoc();
  const mid = WIDTH / 2;
  const top = MARGIN.top;
  const bottom = HEIGHT - MARGIN.bottom;

  // left panel: lambda_2 .. lambda_20 against their index
  const head = rows.slice(1, MAX_SCATTER_EIGENVALUES);
  const left = MARGIN.left;
  const right = mid - 25;
  const xs = linearScale([2, Math.max(3, head[head.length - 1]?.index ?? 3)], [left, right]);
  const maxLam = Math.max(...head.map((r) => r.eigenvalue), 1e-12);
  const ys = linearScale([0, maxLam], [bottom, top]);
  drawAxes(doc, xs, ys, "index", "eigenvalue", left, right, top, bottom);
  for (const r of head) {
    doc.circle(xs(r.index), ys(r.eigenvalue), 3, "#4269d0");
  }
  doc.text((left + right) / 2, top - 12, "smallest eigenvalues");

  // right panel: histogram over the full spectrum
  const hLeft = mid + 35;
  const hRight = WIDTH - MARGIN.right;
  const values = rows.map((r) => r.eigenvalue);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo || 1;
  const counts = new Array<number>(HISTOGRAM_BINS).fill(0);
  for (const v of values) {
    const bin = Math.min(HISTOGRAM_BINS - 1, Math.floor(((v - lo) / span) * HISTOGRAM_BINS));
    counts[bin] += 1;
  }
  const hx = linearScale([lo, lo + span], [hLeft, hRight]);
  const hy = linearScale([0, Math.max(...counts)], [bottom, top]);
  drawAxes(doc, hx, hy, "eigenvalue", "count", hLeft, hRight, top, bottom);
  const binWidth = (hRight - hLeft) / HISTOGRAM_BINS;
  counts.forEach((count, i) => {
    if (count === 0) return;
    const y = hy(count);
    doc.rect(hLeft + i * binWidth + 0.5, y, binWidth - 1, bottom - y, "#97bbf5");
  });
  doc.text((hLeft + hRight) / 2, top - 12, "full spectrum");
  return doc.finish();
}

/** Node scatter at the stored coordinates, colored by cluster label. */
export function renderClusters(
  partition: PartitionRow[],
  positions: Map<number, PositionRow>,
): string {
  for (const row of partition) {
    if (!positions.has(row.node)) {
      throw new SchemaError(`node ${row.node} has no position`);
    }
  }
  const doc = new SvgDoc();
  const left = MARGIN.left;
  const right = WIDTH - MARGIN.right;
  const top = MARGIN.top;
  const bottom = HEIGHT - MARGIN.bottom;
  const pts = partition.map((row) => ({ ...positions.get(row.node)!, row }));
  const xs = linearScale(extent(pts.map((p) => p.x)), [left, right]);
  const ys = linearScale(extent(pts.map((p) => p.y)), [bottom, top]);
  drawAxes(doc, xs, ys, "x", "y", left, right, top, bottom);
  // draw discarded nodes first so live clusters stay on top
  const ordered = [...pts].sort(
    (a, b) => Number(b.row.discarded) - Number(a.row.discarded) || a.row.node - b.row.node,
  );
  for (const p of ordered) {
    doc.circle(xs(p.x), ys(p.y), 3, clusterColor(p.row.cluster, p.row.discarded));
  }
  const clusters = new Set(partition.filter((r) => !r.discarded).map((r) => r.cluster));
  doc.text((left + right) / 2, top - 12, `${clusters.size} clusters (discarded in gray)`);
  return doc.finish();
}

/** One bar per cluster: its conductance, discarded clusters in gray. */
export function renderConductance(clusters: ClusterInfo[]): string {
  return barChart(
    clusters,
    (c) => c.conductance,
    "cluster",
    "conductance",
    "per-cluster conductance",
  );
}

/** One bar per cluster: its node count, discarded clusters in gray. */
export function renderSizes(clusters: ClusterInfo[]): string {
  return barChart(clusters, (c) => c.size, "cluster", "size", "cluster sizes");
}

function barChart(
  clusters: ClusterInfo[],
  value: (c: ClusterInfo) => number,
  xLabel: string,
  yLabel: string,
  title: string,
): string {
  const doc = new SvgDoc();
  const left = MARGIN.left;
  const right = WIDTH - MARGIN.right;
  const top = MARGIN.top;
  const bottom = HEIGHT - MARGIN.bottom;
  const maxVal = Math.max(...clusters.map(value), 1e-12);
  const ys = linearScale([0, maxVal], [bottom, top]);
  const xs = linearScale([0, clusters.length], [left, right]);
  // cluster ids label the bars directly, so suppress the numeric x ticks
  drawAxes(doc, xs, ys, xLabel, yLabel, left, right, top, bottom, false);
  const slot = (right - left) / clusters.length;
  clusters.forEach((c, i) => {
    const v = value(c);
    const y = ys(v);
    doc.rect(
      left + i * slot + slot * 0.1,
      y,
      slot * 0.8,
      bottom - y,
      clusterColor(c.id, c.discarded),
    );
    if (clusters.length <= 30) {
      doc.text(left + (i + 0.5) * slot, bottom + 16, String(c.id));
    }
  });
  doc.text((left + right) / 2, top - 12, title);
  return doc.finish();
}

function extent(values: number[]): [number, number] {
  return [Math.min(...values), Math.max(...values)];
}
