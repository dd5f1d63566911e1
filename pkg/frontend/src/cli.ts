/**
 * Command line entry point: render a sweep CSV to an SVG line chart.
 *
 *   sweepplot plot --csv results.csv --x sweep_value --y mean_rate \
 *       --yerr stderr_rate --series solver --out results.svg
 */

import { parseArgs } from "node:util";
import { pathToFileURL } from "node:url";
import { renderSweepFigure, type FigureSpec } from "./figure.js";

export interface Streams {
  out: (line: string) => void;
  err: (line: string) => void;
}

const USAGE =
  "usage: sweepplot plot --csv FILE --x COLUMN --y COLUMN --series COLUMN " +
  "--out FILE.svg [--yerr COLUMN] [--title TEXT] [--xlabel TEXT] [--ylabel TEXT]";

function parsePlotArgs(args: string[]): FigureSpec {
  const { values, positionals } = parseArgs({
    args,
    allowPositionals: true,
    options: {
      csv: { type: "string" },
      x: { type: "string" },
      y: { type: "string" },
      yerr: { type: "string" },
      series: { type: "string" },
      out: { type: "string" },
      title: { type: "string" },
      xlabel: { type: "string" },
      ylabel: { type: "string" },
    },
  });
  if (positionals.length > 0) {
    throw new Error(`unexpected argument "${positionals[0]}"`);
  }
  for (const flag of ["csv", "x", "y", "series", "out"] as const) {
    if (values[flag] === undefined) {
      throw new Error(`missing required flag --${flag}`);
    }
  }
  return {
    inputCsv: values.csv!,
    outputPath: values.out!,
    xColumn: values.x!,
    yColumn: values.y!,
    yerrColumn: values.yerr,
    seriesColumn: values.series!,
    title: values.title,
    xLabel: values.xlabel,
    yLabel: values.ylabel,
  };
}

export function main(argv: string[], streams?: Streams): number {
  const out = streams?.out ?? ((line) => process.stdout.write(line + "\n"));
  const err = streams?.err ?? ((line) => process.stderr.write(line + "\n"));
  const [command, ...rest] = argv;
  if (command === undefined || command === "--help" || command === "-h") {
    out(USAGE);
    return command === undefined ? 2 : 0;
  }
  if (command !== "plot") {
    err(`unknown command "${command}"`);
    err(USAGE);
    return 2;
  }
  let spec: FigureSpec;
  try {
    spec = parsePlotArgs(rest);
  } catch (e) {
    err(`error: ${(e as Error).message}`);
    err(USAGE);
    return 2;
  }
  try {
    const summary = renderSweepFigure(spec);
    out(
      `wrote ${spec.outputPath}: ${summary.series} series, ${summary.points} points`,
    );
    return 0;
  } catch (e) {
    err(`error: ${(e as Error).message}`);
    return 1;
  }
}

if (
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href
) {
  process.exit(main(process.argv.slice(2)));
}
