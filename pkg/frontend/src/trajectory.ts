import { formatTick, linearScale } from "./scale";
import { BuiltPlot, EpisodeRow, Figure, Primitive, WorldFile } from "./types";

export const MODE_COLORS: Record<string, string> = {
  corridor: "#1f77b4",
  turn_left: "#ff7f0e",
  turn_right: "#d62728",
  single_wall_left: "#2ca02c",
  single_wall_right: "#17becf",
  blind: "#7f7f7f",
};

interface ModeSegment {
  mode: string;
  points: [number, number][];
}

export function modeSegments(rows: EpisodeRow[]): ModeSegment[] {
  const segments: ModeSegment[] = [];
  let current: ModeSegment | null = null;
  for (const row of rows) {
    if (current === null || row.mode !== current.mode) {
      const start: [number, number][] = current
        ? [current.points[current.points.length - 1]]
        : [];
      current = { mode: row.mode, points: [...start, [row.x, row.y]] };
      segments.push(current);
    } else {
      current.points.push([row.x, row.y]);
    }
  }
  return segments;
}

export function buildTrajectoryPlot(
  rows: EpisodeRow[],
  world: WorldFile,
  options: { width?: number; height?: number; collided?: boolean; title?: string } = {},
): BuiltPlot {
  if (rows.length === 0) {
    throw new Error("episode CSV has no rows");
  }
  const width = options.width ?? 720;
  const height = options.height ?? 720;
  const collided = options.collided ?? false;
  const segments = modeSegments(rows);

  const data = {
    kind: "trajectory",
    walls: world.walls,
    features: world.features.map((f) => f.pos),
    centerline: world.centerline ?? null,
    segments,
    start: [rows[0].x, rows[0].y],
    end: [rows[rows.length - 1].x, rows[rows.length - 1].y],
    collided,
  };

  // equal-aspect viewport over walls plus trajectory, padded half a meter
  const xs: number[] = [];
  const ys: number[] = [];
  for (const wall of world.walls) {
    for (const [x, y] of wall) {
      xs.push(x);
      ys.push(y);
    }
  }
  for (const row of rows) {
    xs.push(row.x);
    ys.push(row.y);
  }
  const pad = 0.5;
  let x0 = Math.min(...xs) - pad;
  let x1 = Math.max(...xs) + pad;
  let y0 = Math.min(...ys) - pad;
  let y1 = Math.max(...ys) + pad;
  const margin = { left: 56, right: 16, top: 34, bottom: 42 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;
  const scale = Math.min(plotW / (x1 - x0), plotH / (y1 - y0));
  // grow the shorter span so both axes share one meters-per-pixel factor
  const cx = (x0 + x1) / 2;
  const cy = (y0 + y1) / 2;
  x0 = cx - plotW / scale / 2;
  x1 = cx + plotW / scale / 2;
  y0 = cy - plotH / scale / 2;
  y1 = cy + plotH / scale / 2;
  const sx = linearScale([x0, x1], [margin.left, width - margin.right], 8);
  const sy = linearScale([y0, y1], [height - margin.bottom, margin.top], 8);

  const prims: Primitive[] = [];
  prims.push({ kind: "rect", x: margin.left, y: margin.top, w: plotW, h: plotH,
               color: "#444444", fill: false });
  for (const t of sx.ticks) {
    prims.push({ kind: "line", points: [[sx.toPx(t), height - margin.bottom],
                                        [sx.toPx(t), height - margin.bottom + 4]],
                 color: "#444444", width: 1 });
    prims.push({ kind: "text", x: sx.toPx(t), y: height - margin.bottom + 16,
                 text: formatTick(t), color: "#333333", size: 11, anchor: "middle" });
  }
  for (const t of sy.ticks) {
    prims.push({ kind: "line", points: [[margin.left - 4, sy.toPx(t)],
                                        [margin.left, sy.toPx(t)]],
                 color: "#444444", width: 1 });
    prims.push({ kind: "text", x: margin.left - 7, y: sy.toPx(t) + 4,
                 text: formatTick(t), color: "#333333", size: 11, anchor: "end" });
  }
  prims.push({ kind: "text", x: width / 2, y: height - 8, text: "x [m]",
               color: "#333333", size: 12, anchor: "middle" });
  prims.push({ kind: "text", x: width / 2, y: 18,
               text: options.title ?? "trajectory by scene mode",
               color: "#000000", size: 14, anchor: "middle" });

  const px = (p: [number, number]): [number, number] => [sx.toPx(p[0]), sy.toPx(p[1])];

  if (world.centerline && world.centerline.length >= 2) {
    prims.push({ kind: "line", points: world.centerline.map(px),
                 color: "#bbbbbb", width: 1, dash: [6, 5] });
  }
  for (const f of world.features) {
    const [fx, fy] = px(f.pos);
    prims.push({ kind: "circle", cx: fx, cy: fy, r: 1.6, color: "#9b9b9b", fill: true });
  }
  for (const wall of world.walls) {
    prims.push({ kind: "line", points: wall.map((p) => px(p as [number, number])),
                 color: "#111111", width: 2.5 });
  }
  for (const seg of segments) {
    if (seg.points.length < 2) continue;
    prims.push({ kind: "line", points: seg.points.map(px),
                 color: MODE_COLORS[seg.mode] ?? "#e377c2", width: 2 });
  }

  const [startX, startY] = px(data.start as [number, number]);
  prims.push({ kind: "circle", cx: startX, cy: startY, r: 5, color: "#2ca02c", fill: true });
  const [endX, endY] = px(data.end as [number, number]);
  if (collided) {
    const r = 6;
    prims.push({ kind: "line", points: [[endX - r, endY - r], [endX + r, endY + r]],
                 color: "#d62728", width: 2.5 });
    prims.push({ kind: "line", points: [[endX - r, endY + r], [endX + r, endY - r]],
                 color: "#d62728", width: 2.5 });
  } else {
    prims.push({ kind: "rect", x: endX - 4, y: endY - 4, w: 8, h: 8,
                 color: "#d62728", fill: true });
  }

  // legend: only the modes that actually appear
  const seen = [...new Set(segments.map((s) => s.mode))];
  seen.forEach((mode, i) => {
    const ly = margin.top + 14 + 16 * i;
    prims.push({ kind: "line", points: [[margin.left + 8, ly], [margin.left + 30, ly]],
                 color: MODE_COLORS[mode] ?? "#e377c2", width: 3 });
    prims.push({ kind: "text", x: margin.left + 36, y: ly + 4, text: mode,
                 color: "#333333", size: 11, anchor: "start" });
  });

  const figure: Figure = { width, height, background: "#ffffff", primitives: prims };
  return { kind: "trajectory", data, figure };
}
