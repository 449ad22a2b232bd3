// Shared row/figure types for the plot builders.

export interface EpisodeRow {
  t: number;
  x: number;
  y: number;
  theta: number;
  v: number;
  u: number;
  phase: string;
  mode: string;
  offset: number | null;
}

export interface TauTraceRow {
  t: number;
  tau_geom: number;
  tau_per: number | null;
  phase: string; // "sense" | "act" | "" (continuous)
  variant: string; // "continuous" | "sense_act"
  maneuver: string; // "straight" | "turn_away" | "turn_toward"
}

export interface SweepRow {
  [column: string]: number | string | null;
}

export interface WorldFile {
  walls: [number, number][][];
  features: { id: number; pos: [number, number] }[];
  centerline?: [number, number][] | null;
}

// Render primitives in pixel space; both the SVG writer and the PNG
// rasterizer consume the same list, so outputs always agree.
export type Primitive =
  | { kind: "line"; points: [number, number][]; color: string; width: number; dash?: number[] }
  | { kind: "circle"; cx: number; cy: number; r: number; color: string; fill: boolean }
  | { kind: "rect"; x: number; y: number; w: number; h: number; color: string; fill: boolean }
  | {
      kind: "text";
      x: number;
      y: number;
      text: string;
      color: string;
      size: number;
      anchor: "start" | "middle" | "end";
    };

export interface Figure {
  width: number;
  height: number;
  background: string;
  primitives: Primitive[];
}

export type PlotKind = "trajectory" | "tau_trace" | "sweep_heatmap";

export interface BuiltPlot {
  kind: PlotKind;
  // The exact arrays that drive the figure; hashed for determinism checks.
  data: unknown;
  figure: Figure;
}
