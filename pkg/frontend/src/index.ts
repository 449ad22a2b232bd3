import * as fs from "node:fs";
import * as path from "node:path";
import { readEpisodeCsv, readSweepCsv, readTauTraceCsv, readWorldFile } from "./csv";
import { hashPlotData } from "./hash";
import { buildSweepHeatmap } from "./sweepHeatmap";
import { buildTauTracePlot } from "./tauTrace";
import { buildTrajectoryPlot } from "./trajectory";
import { BuiltPlot, PlotKind } from "./types";

export { readEpisodeCsv, readSweepCsv, readTauTraceCsv, readWorldFile } from "./csv";
export { canonicalJson, hashPlotData } from "./hash";
export { figureToPng, figureToSvg, writeFigure } from "./render";
export { buildSweepHeatmap } from "./sweepHeatmap";
export { buildTauTracePlot, groupSeries, MANEUVER_COLORS } from "./tauTrace";
export { buildTrajectoryPlot, modeSegments, MODE_COLORS } from "./trajectory";
export * from "./types";

export interface PlotSpec {
  kind: PlotKind;
  input: string;          // CSV path
  world?: string;         // world JSON, trajectory only
  metric?: string;        // sweep_heatmap only
  width?: number;
  height?: number;
}

function episodeCollided(csvPath: string): boolean {
  // the episode sidecar (events + metrics) sits next to the CSV
  const sidecar = csvPath.replace(/\.csv$/, ".json");
  if (!fs.existsSync(sidecar)) return false;
  try {
    const body = JSON.parse(fs.readFileSync(sidecar, "utf-8"));
    return Boolean(body?.metrics?.collision);
  } catch {
    return false;
  }
}

export function buildPlot(spec: PlotSpec): BuiltPlot {
  if (!fs.existsSync(spec.input)) {
    throw new Error(`input CSV not found: ${spec.input}`);
  }
  switch (spec.kind) {
    case "trajectory": {
      if (!spec.world) {
        throw new Error("trajectory plots need --world pointing at the world JSON");
      }
      const rows = readEpisodeCsv(spec.input);
      const world = readWorldFile(spec.world);
      return buildTrajectoryPlot(rows, world, {
        width: spec.width,
        height: spec.height,
        collided: episodeCollided(spec.input),
        title: path.basename(spec.input),
      });
    }
    case "tau_trace":
      return buildTauTracePlot(readTauTraceCsv(spec.input),
                               { width: spec.width, height: spec.height });
    case "sweep_heatmap": {
      const { columns, rows } = readSweepCsv(spec.input);
      return buildSweepHeatmap(columns, rows, {
        metric: spec.metric,
        width: spec.width,
        height: spec.height,
      });
    }
    default:
      throw new Error(`unknown plot kind '${spec.kind}'`);
  }
}

export function plotDataHash(plot: BuiltPlot): string {
  return hashPlotData(plot.data);
}
