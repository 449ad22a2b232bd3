import * as fs from "node:fs";
import Papa from "papaparse";
import { EpisodeRow, SweepRow, TauTraceRow, WorldFile } from "./types";

function parseTable(path: string): Record<string, string>[] {
  const text = fs.readFileSync(path, "utf-8");
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`${path}: CSV parse error at row ${first.row}: ${first.message}`);
  }
  return parsed.data;
}

function requireColumns(path: string, rows: Record<string, string>[], columns: string[]) {
  const present = rows.length > 0 ? Object.keys(rows[0]) : [];
  const missing = columns.filter((c) => !present.includes(c));
  if (missing.length > 0) {
    throw new Error(`${path}: missing column(s): ${missing.join(", ")}`);
  }
}

const num = (value: string): number => Number(value);
const numOrNull = (value: string): number | null => (value === "" ? null : Number(value));

export function readEpisodeCsv(path: string): EpisodeRow[] {
  const rows = parseTable(path);
  requireColumns(path, rows, ["t", "x", "y", "theta", "v", "u", "phase", "mode", "offset"]);
  return rows.map((r) => ({
    t: num(r.t),
    x: num(r.x),
    y: num(r.y),
    theta: num(r.theta),
    v: num(r.v),
    u: num(r.u),
    phase: r.phase,
    mode: r.mode,
    offset: numOrNull(r.offset),
  }));
}

export function readTauTraceCsv(path: string): TauTraceRow[] {
  const rows = parseTable(path);
  requireColumns(path, rows, ["t", "tau_geom", "tau_per", "phase", "variant", "maneuver"]);
  return rows.map((r) => ({
    t: num(r.t),
    tau_geom: num(r.tau_geom),
    tau_per: numOrNull(r.tau_per),
    phase: r.phase,
    variant: r.variant,
    maneuver: r.maneuver,
  }));
}

export function readSweepCsv(path: string): { columns: string[]; rows: SweepRow[] } {
  const raw = parseTable(path);
  if (raw.length === 0) {
    throw new Error(`${path}: sweep CSV has no rows`);
  }
  const columns = Object.keys(raw[0]);
  const rows = raw.map((r) => {
    const out: SweepRow = {};
    for (const col of columns) {
      const value = r[col];
      if (value === "" || value === undefined) {
        out[col] = null;
      } else if (value === "true" || value === "false") {
        out[col] = value;
      } else {
        const n = Number(value);
        out[col] = Number.isNaN(n) ? value : n;
      }
    }
    return out;
  });
  return { columns, rows };
}

export function readWorldFile(path: string): WorldFile {
  const data = JSON.parse(fs.readFileSync(path, "utf-8"));
  if (!Array.isArray(data.walls)) {
    throw new Error(`${path}: world file has no walls array`);
  }
  return {
    walls: data.walls,
    features: data.features ?? [],
    centerline: data.centerline ?? null,
  };
}
