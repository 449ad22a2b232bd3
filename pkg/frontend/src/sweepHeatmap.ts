import { formatTick } from "./scale";
import { BuiltPlot, Figure, Primitive, SweepRow } from "./types";

// Blue -> yellow ramp; enough contrast for a gain-grid glance.
function rampColor(fraction: number): string {
  const f = Math.max(0, Math.min(1, fraction));
  const r = Math.round(40 + 215 * f);
  const g = Math.round(60 + 170 * f);
  const b = Math.round(160 - 130 * f);
  return `rgb(${r},${g},${b})`;
}

const NON_PARAM_COLUMNS = new Set([
  "seed", "status", "duration", "collision", "mode_switches", "mean_abs_u",
  "rms_offset", "max_abs_offset", "convergence_time", "offset_crossings",
  "rest_offset", "progress",
]);

export function buildSweepHeatmap(
  columns: string[],
  rows: SweepRow[],
  options: { metric?: string; width?: number; height?: number } = {},
): BuiltPlot {
  const metric = options.metric ?? "rms_offset";
  const width = options.width ?? 640;
  const height = options.height ?? 560;
  if (!columns.includes(metric)) {
    throw new Error(`sweep CSV has no '${metric}' column`);
  }
  const params = columns.filter((c) => !NON_PARAM_COLUMNS.has(c));
  if (params.length < 2) {
    throw new Error(`sweep CSV needs two grid parameter columns, found: ${params.join(", ") || "none"}`);
  }
  const [px, py] = params;
  const xs = [...new Set(rows.map((r) => Number(r[px])))].sort((a, b) => a - b);
  const ys = [...new Set(rows.map((r) => Number(r[py])))].sort((a, b) => a - b);

  // metric averaged over seeds per grid point; failed rows are skipped
  const values: (number | null)[][] = ys.map(() => xs.map(() => null));
  for (let yi = 0; yi < ys.length; yi++) {
    for (let xi = 0; xi < xs.length; xi++) {
      const cell = rows.filter(
        (r) => Number(r[px]) === xs[xi] && Number(r[py]) === ys[yi]
          && r.status === "ok" && r[metric] !== null,
      );
      if (cell.length > 0) {
        values[yi][xi] =
          cell.reduce((a, r) => a + Number(r[metric]), 0) / cell.length;
      }
    }
  }
  const data = { kind: "sweep_heatmap", x_param: px, y_param: py, metric,
                 xs, ys, values };

  const flat = values.flat().filter((v): v is number => v !== null);
  if (flat.length === 0) {
    throw new Error(`no successful sweep rows carry '${metric}'`);
  }
  const lo = Math.min(...flat);
  const hi = Math.max(...flat);
  const span = hi - lo || 1;

  const margin = { left: 80, right: 30, top: 44, bottom: 60 };
  const gridW = width - margin.left - margin.right;
  const gridH = height - margin.top - margin.bottom;
  const cellW = gridW / xs.length;
  const cellH = gridH / ys.length;

  const prims: Primitive[] = [];
  prims.push({ kind: "text", x: width / 2, y: 20,
               text: `${metric} over (${px}, ${py}), seed-averaged`,
               color: "#000000", size: 13, anchor: "middle" });
  for (let yi = 0; yi < ys.length; yi++) {
    for (let xi = 0; xi < xs.length; xi++) {
      const x = margin.left + xi * cellW;
      const y = margin.top + (ys.length - 1 - yi) * cellH;
      const value = values[yi][xi];
      const color = value === null ? "#dddddd" : rampColor((value - lo) / span);
      prims.push({ kind: "rect", x, y, w: cellW - 1, h: cellH - 1, color, fill: true });
      prims.push({
        kind: "text", x: x + cellW / 2, y: y + cellH / 2 + 4,
        text: value === null ? "n/a" : value.toFixed(3),
        color: "#111111", size: 11, anchor: "middle",
      });
    }
  }
  xs.forEach((v, xi) => {
    prims.push({ kind: "text", x: margin.left + (xi + 0.5) * cellW,
                 y: height - margin.bottom + 18, text: formatTick(v),
                 color: "#333333", size: 12, anchor: "middle" });
  });
  ys.forEach((v, yi) => {
    prims.push({ kind: "text", x: margin.left - 8,
                 y: margin.top + (ys.length - 1 - yi + 0.5) * cellH + 4,
                 text: formatTick(v), color: "#333333", size: 12, anchor: "end" });
  });
  prims.push({ kind: "text", x: margin.left + gridW / 2, y: height - 16,
               text: px, color: "#333333", size: 12, anchor: "middle" });
  prims.push({ kind: "text", x: 22, y: margin.top + gridH / 2, text: py,
               color: "#333333", size: 12, anchor: "middle" });

  const figure: Figure = { width, height, background: "#ffffff", primitives: prims };
  return { kind: "sweep_heatmap", data, figure };
}
