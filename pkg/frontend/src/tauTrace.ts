import { formatTick, linearScale } from "./scale";
import { BuiltPlot, Figure, Primitive, TauTraceRow } from "./types";

export const MANEUVER_COLORS: Record<string, string> = {
  straight: "#1f77b4",
  turn_away: "#d62728",
  turn_toward: "#2ca02c",
};
const GEOM_COLOR = "#222222";
const ACT_COLOR = "#c4c4c4";
const VARIANTS = ["continuous", "sense_act"] as const;
const MANEUVERS = ["straight", "turn_away", "turn_toward"] as const;

interface Series {
  maneuver: string;
  variant: string;
  t: number[];
  tau_geom: number[];
  tau_per: (number | null)[];
  phase: string[];
}

export function groupSeries(rows: TauTraceRow[]): Series[] {
  const byKey = new Map<string, Series>();
  for (const row of rows) {
    const key = `${row.maneuver}|${row.variant}`;
    let series = byKey.get(key);
    if (!series) {
      series = { maneuver: row.maneuver, variant: row.variant,
                 t: [], tau_geom: [], tau_per: [], phase: [] };
      byKey.set(key, series);
    }
    series.t.push(row.t);
    series.tau_geom.push(row.tau_geom);
    series.tau_per.push(row.tau_per);
    series.phase.push(row.phase);
  }
  for (const maneuver of MANEUVERS) {
    for (const variant of VARIANTS) {
      if (!byKey.has(`${maneuver}|${variant}`)) {
        throw new Error(`tau-trace CSV is missing the (${maneuver}, ${variant}) series`);
      }
    }
  }
  return [...byKey.values()];
}

function rms(series: Series): number | null {
  // the sense-act variant is judged on samples taken while sensing
  const errors: number[] = [];
  for (let i = 0; i < series.t.length; i++) {
    const per = series.tau_per[i];
    if (per === null) continue;
    if (series.variant === "sense_act" && series.phase[i] !== "sense") continue;
    errors.push(per - series.tau_geom[i]);
  }
  if (errors.length === 0) return null;
  return Math.sqrt(errors.reduce((a, e) => a + e * e, 0) / errors.length);
}

export function buildTauTracePlot(
  rows: TauTraceRow[],
  options: { width?: number; height?: number } = {},
): BuiltPlot {
  const width = options.width ?? 980;
  const height = options.height ?? 460;
  const series = groupSeries(rows);
  const rmsByKey: Record<string, number | null> = {};
  for (const s of series) {
    rmsByKey[`${s.maneuver}|${s.variant}`] = rms(s);
  }
  const data = { kind: "tau_trace", series, rms: rmsByKey };

  // shared ranges across both panels, driven by the geometric curves
  const ts = series.flatMap((s) => s.t);
  const geoms = series.flatMap((s) => s.tau_geom);
  const t0 = Math.min(...ts);
  const t1 = Math.max(...ts);
  const gLo = Math.min(...geoms);
  const gHi = Math.max(...geoms);
  const yPad = 0.25 * (gHi - gLo || 1);
  const y0 = gLo - yPad;
  const y1 = gHi + yPad;

  const prims: Primitive[] = [];
  const panelTitles: Record<string, string> = {
    continuous: "continuous control",
    sense_act: "sense-act interleaving",
  };
  const margin = { left: 56, right: 14, top: 40, bottom: 44 };
  const gap = 48;
  const panelW = (width - margin.left * 2 - margin.right - gap) / 2;
  const panelH = height - margin.top - margin.bottom;

  VARIANTS.forEach((variant, pi) => {
    const left = margin.left + pi * (panelW + gap + margin.left - 14);
    const sx = linearScale([t0, t1], [left, left + panelW], 5);
    const sy = linearScale([y0, y1], [margin.top + panelH, margin.top], 6);

    prims.push({ kind: "rect", x: left, y: margin.top, w: panelW, h: panelH,
                 color: "#444444", fill: false });
    for (const t of sx.ticks) {
      prims.push({ kind: "line", points: [[sx.toPx(t), margin.top + panelH],
                                          [sx.toPx(t), margin.top + panelH + 4]],
                   color: "#444444", width: 1 });
      prims.push({ kind: "text", x: sx.toPx(t), y: margin.top + panelH + 17,
                   text: formatTick(t), color: "#333333", size: 11, anchor: "middle" });
    }
    for (const t of sy.ticks) {
      prims.push({ kind: "line", points: [[left - 4, sy.toPx(t)], [left, sy.toPx(t)]],
                   color: "#444444", width: 1 });
      prims.push({ kind: "text", x: left - 7, y: sy.toPx(t) + 4,
                   text: formatTick(t), color: "#333333", size: 11, anchor: "end" });
    }
    prims.push({ kind: "text", x: left + panelW / 2, y: margin.top - 10,
                 text: panelTitles[variant], color: "#000000", size: 13, anchor: "middle" });
    prims.push({ kind: "text", x: left + panelW / 2, y: height - 10,
                 text: "t [s]", color: "#333333", size: 12, anchor: "middle" });
    if (pi === 0) {
      prims.push({ kind: "text", x: 16, y: margin.top + panelH / 2,
                   text: "tau [s]", color: "#333333", size: 12, anchor: "middle" });
    }

    const inY = (v: number) => v >= y0 && v <= y1;
    let note = 0;
    for (const s of series.filter((s) => s.variant === variant)) {
      const color = MANEUVER_COLORS[s.maneuver] ?? "#9467bd";
      // geometric tau: thick line
      const geomPts: [number, number][] = [];
      for (let i = 0; i < s.t.length; i++) {
        geomPts.push([sx.toPx(s.t[i]), sy.toPx(s.tau_geom[i])]);
      }
      prims.push({ kind: "line", points: geomPts, color: GEOM_COLOR, width: 3 });
      // perceived tau: fine polyline over in-range runs, plus sample dots;
      // samples taken while acting are greyed out
      let run: [number, number][] = [];
      for (let i = 0; i < s.t.length; i++) {
        const per = s.tau_per[i];
        const usable = per !== null && inY(per) && s.phase[i] !== "act";
        if (usable) {
          run.push([sx.toPx(s.t[i]), sy.toPx(per as number)]);
        } else {
          if (run.length > 1) prims.push({ kind: "line", points: run, color, width: 1 });
          run = [];
        }
        if (per !== null && inY(per)) {
          const grey = s.phase[i] === "act";
          prims.push({ kind: "circle", cx: sx.toPx(s.t[i]), cy: sy.toPx(per),
                       r: grey ? 1.2 : 1.6, color: grey ? ACT_COLOR : color, fill: true });
        }
      }
      if (run.length > 1) prims.push({ kind: "line", points: run, color, width: 1 });

      const value = rmsByKey[`${s.maneuver}|${variant}`];
      prims.push({ kind: "text", x: left + 8, y: margin.top + 16 + 14 * note,
                   text: `${s.maneuver}: rms=${value === null ? "n/a" : value.toFixed(2)}`,
                   color, size: 11, anchor: "start" });
      note += 1;
    }
  });

  const figure: Figure = { width, height, background: "#ffffff", primitives: prims };
  return { kind: "tau_trace", data, figure };
}
