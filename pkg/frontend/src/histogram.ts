/** Text/SVG rendering of the masked histogram. */

import { MaskedHistogram } from "./api.js";

export interface Bar {
  x0: number;
  x1: number;
  count: number;
  /** Height as a fraction of the tallest bar, in [0, 1]. */
  height: number;
}

export function histogramBars(hist: MaskedHistogram): Bar[] {
  const max = Math.max(1, ...hist.counts);
  const bars: Bar[] = [];
  for (let i = 0; i < hist.counts.length; i++) {
    const x0 = hist.bin_edges[i];
    const x1 = hist.bin_edges[i + 1];
    const count = hist.counts[i];
    if (x0 === undefined || x1 === undefined || count === undefined) {
      continue;
    }
    bars.push({ x0, x1, count, height: count / max });
  }
  return bars;
}

/** Render the histogram as an SVG string (no external dependencies). */
export function histogramSvg(
  hist: MaskedHistogram,
  width = 640,
  height = 180,
): string {
  const bars = histogramBars(hist);
  if (bars.length === 0) {
    return `<svg width="${width}" height="${height}" role="img"></svg>`;
  }
  const lo = bars[0]!.x0;
  const hi = bars[bars.length - 1]!.x1;
  const span = Math.max(hi - lo, 1e-9);
  const pad = 18;
  const plotH = height - pad;
  const rects = bars
    .map((b) => {
      const x = ((b.x0 - lo) / span) * width;
      const w = Math.max(1, ((b.x1 - b.x0) / span) * width - 1);
      const h = b.height * (plotH - 4);
      const y = plotH - h;
      return (
        `<rect x="${x.toFixed(1)}" y="${y.toFixed(1)}" ` +
        `width="${w.toFixed(1)}" height="${h.toFixed(1)}" ` +
        `class="hist-bar"><title>[${b.x0.toFixed(3)}, ${b.x1.toFixed(3)}): ` +
        `${b.count}</title></rect>`
      );
    })
    .join("");
  const labels =
    `<text x="0" y="${height - 4}" class="hist-label">${lo.toFixed(2)}</text>` +
    `<text x="${width}" y="${height - 4}" text-anchor="end" ` +
    `class="hist-label">${hi.toFixed(2)}</text>`;
  return (
    `<svg width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" ` +
    `role="img" aria-label="histogram of visible p-values">${rects}${labels}</svg>`
  );
}
