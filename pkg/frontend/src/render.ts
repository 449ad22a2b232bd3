import * as fs from "node:fs";
import * as path from "node:path";
import { Figure, Primitive } from "./types";

const FONT_FAMILY = "DejaVu Sans, sans-serif";

function fmt(value: number): string {
  // fixed 2-decimal pixel coordinates keep the SVG byte-stable
  return (Math.round(value * 100) / 100).toString();
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function primitiveSvg(p: Primitive): string {
  switch (p.kind) {
    case "line": {
      const pts = p.points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
      const dash = p.dash ? ` stroke-dasharray="${p.dash.join(" ")}"` : "";
      return (
        `<polyline points="${pts}" fill="none" stroke="${p.color}"` +
        ` stroke-width="${p.width}" stroke-linejoin="round"${dash}/>`
      );
    }
    case "circle": {
      const paint = p.fill
        ? `fill="${p.color}"`
        : `fill="none" stroke="${p.color}" stroke-width="1"`;
      return `<circle cx="${fmt(p.cx)}" cy="${fmt(p.cy)}" r="${fmt(p.r)}" ${paint}/>`;
    }
    case "rect": {
      const paint = p.fill
        ? `fill="${p.color}"`
        : `fill="none" stroke="${p.color}" stroke-width="1"`;
      return (
        `<rect x="${fmt(p.x)}" y="${fmt(p.y)}" width="${fmt(p.w)}"` +
        ` height="${fmt(p.h)}" ${paint}/>`
      );
    }
    case "text": {
      const anchor = p.anchor === "start" ? "" : ` text-anchor="${p.anchor}"`;
      return (
        `<text x="${fmt(p.x)}" y="${fmt(p.y)}" font-family="${FONT_FAMILY}"` +
        ` font-size="${p.size}" fill="${p.color}"${anchor}>${escapeXml(p.text)}</text>`
      );
    }
  }
}

export function figureToSvg(figure: Figure): string {
  const body = figure.primitives.map(primitiveSvg).join("\n");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${figure.width}"` +
    ` height="${figure.height}" viewBox="0 0 ${figure.width} ${figure.height}">\n` +
    `<rect x="0" y="0" width="${figure.width}" height="${figure.height}"` +
    ` fill="${figure.background}"/>\n${body}\n</svg>\n`
  );
}

export function figureToPng(figure: Figure): Buffer {
  // Rasterize the identical SVG so both formats always agree.
  // eslint-disable-next-line @typescript-eslint/no-var-requires
  const { Resvg } = require("@resvg/resvg-js");
  const resvg = new Resvg(figureToSvg(figure), {
    fitTo: { mode: "original" },
    font: { loadSystemFonts: true },
  });
  return Buffer.from(resvg.render().asPng());
}

export function writeFigure(figure: Figure, outPath: string): void {
  const ext = path.extname(outPath).toLowerCase();
  fs.mkdirSync(path.dirname(path.resolve(outPath)), { recursive: true });
  if (ext === ".svg") {
    fs.writeFileSync(outPath, figureToSvg(figure));
  } else if (ext === ".png") {
    fs.writeFileSync(outPath, figureToPng(figure));
  } else {
    throw new Error(`unsupported output extension '${ext}' (use .svg or .png)`);
  }
}
