import { createHash } from "node:crypto";

// Canonical JSON: object keys sorted recursively so the digest only depends
// on the plotted values, never on construction order.
export function canonicalJson(value: unknown): string {
  if (value === null || typeof value !== "object") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return `[${value.map(canonicalJson).join(",")}]`;
  }
  const entries = Object.entries(value as Record<string, unknown>)
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
    .map(([k, v]) => `${JSON.stringify(k)}:${canonicalJson(v)}`);
  return `{${entries.join(",")}}`;
}

export function hashPlotData(data: unknown): string {
  return createHash("sha256").update(canonicalJson(data)).digest("hex");
}
