#!/usr/bin/env node
// plot <kind> --in PATH [--world PATH] --out PATH
// kinds: trajectory | tau_trace | sweep_heatmap; output .svg or .png

import yargs from "yargs";
import { buildPlot, plotDataHash, PlotSpec } from "./index";
import { writeFigure } from "./render";
import { PlotKind } from "./types";

export async function run(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .command("$0 <kind>", "render a figure from taunav CSV output", (y) =>
      y.positional("kind", {
        choices: ["trajectory", "tau_trace", "sweep_heatmap"] as const,
        describe: "figure kind",
      }),
    )
    .option("in", { type: "string", demandOption: true, describe: "input CSV path" })
    .option("world", { type: "string", describe: "world JSON (trajectory)" })
    .option("out", { type: "string", demandOption: true, describe: "output .svg/.png" })
    .option("metric", { type: "string", describe: "sweep metric column" })
    .option("width", { type: "number" })
    .option("height", { type: "number" })
    .option("print-hash", { type: "boolean", default: false,
                            describe: "print the plotted-data sha256" })
    .strict()
    .fail((msg) => {
      throw new Error(msg);
    })
    .parse();

  const spec: PlotSpec = {
    kind: args.kind as PlotKind,
    input: args.in,
    world: args.world,
    metric: args.metric,
    width: args.width,
    height: args.height,
  };
  const plot = buildPlot(spec);
  writeFigure(plot.figure, args.out);
  if (args["print-hash"]) {
    process.stdout.write(`${plotDataHash(plot)}\n`);
  }
  process.stderr.write(`wrote ${args.out}\n`);
  return 0;
}

if (require.main === module) {
  run(process.argv.slice(2)).catch((err: Error) => {
    process.stderr.write(`error: ${err.message}\n`);
    process.exit(1);
  });
}
