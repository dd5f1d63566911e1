/**
 * SVG line charts from sweep CSVs: one series per solver, optional error
 * bars, fixed canvas, deterministic output (same input, same bytes).
 */

import { readFileSync, renameSync, writeFileSync } from "node:fs";
import { extname } from "node:path";
import {
  numericColumnValues,
  parseSweepCsv,
  type SweepRow,
  textColumnValues,
} from "./csv.js";

export interface FigureSpec {
  inputCsv: string;
  outputPath: string;
  xColumn: string;
  yColumn: string;
  yerrColumn?: string;
  seriesColumn: string;
  title?: string;
  xLabel?: string;
  yLabel?: string;
}

export interface RenderSummary {
  series: number;
  pointsPerSeries: number[];
  points: number;
}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 48, right: 160, bottom: 56, left: 72 };

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
];

interface Point {
  x: number;
  y: number;
  err: number;
}

interface Series {
  name: string;
  points: Point[];
}

/** Fixed-precision number formatting keeps the output byte-stable. */
function fmt(value: number): string {
  const text = value.toFixed(3);
  return text === "-0.000" ? "0.000" : text;
}

function tickLabel(value: number): string {
  const abs = Math.abs(value);
  if (abs !== 0 && (abs >= 1e5 || abs < 1e-3)) {
    return value.toExponential(1);
  }
  const text = Number(value.toPrecision(8)).toString();
  return text === "-0" ? "0" : text;
}

/** Round tick spacing to a 1/2/5 decade multiple covering span/count. */
function niceTicks(lo: number, hi: number, count: number): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const raw = (hi - lo) / count;
  const mag = 10 ** Math.floor(Math.log10(raw));
  const norm = raw / mag;
  const step = (norm <= 1 ? 1 : norm <= 2 ? 2 : norm <= 5 ? 5 : 10) * mag;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return ticks;
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function groupSeries(rows: SweepRow[], spec: FigureSpec): Series[] {
  const xs = numericColumnValues(rows, spec.xColumn);
  const ys = numericColumnValues(rows, spec.yColumn);
  const errs = spec.yerrColumn
    ? numericColumnValues(rows, spec.yerrColumn)
    : rows.map(() => 0);
  const names = textColumnValues(rows, spec.seriesColumn);
  const bySeries = new Map<string, Point[]>();
  for (let i = 0; i < rows.length; i++) {
    const name = names[i]!;
    if (!bySeries.has(name)) {
      bySeries.set(name, []);
    }
    bySeries.get(name)!.push({ x: xs[i]!, y: ys[i]!, err: errs[i]! });
  }
  return [...bySeries.entries()].map(([name, points]) => ({
    name,
    points: [...points].sort((a, b) => a.x - b.x),
  }));
}

export function buildSweepFigure(rows: SweepRow[], spec: FigureSpec): string {
  const series = groupSeries(rows, spec);
  const all = series.flatMap((s) => s.points);
  let xLo = Math.min(...all.map((p) => p.x));
  let xHi = Math.max(...all.map((p) => p.x));
  let yLo = Math.min(...all.map((p) => p.y - p.err));
  let yHi = Math.max(...all.map((p) => p.y + p.err));
  if (xHi === xLo) {
    xLo -= 1;
    xHi += 1;
  }
  const yPad = yHi === yLo ? 1 : 0.06 * (yHi - yLo);
  yLo -= yPad;
  yHi += yPad;

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const sx = (x: number) => MARGIN.left + ((x - xLo) / (xHi - xLo)) * plotW;
  const sy = (y: number) => MARGIN.top + plotH - ((y - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);

  // grid and ticks
  for (const t of niceTicks(yLo, yHi, 6)) {
    const y = fmt(sy(t));
    parts.push(
      `<line class="grid" x1="${fmt(MARGIN.left)}" y1="${y}" ` +
        `x2="${fmt(MARGIN.left + plotW)}" y2="${y}" stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${fmt(MARGIN.left - 8)}" y="${y}" text-anchor="end" ` +
        `dominant-baseline="middle" font-size="12" fill="#333333">${tickLabel(t)}</text>`,
    );
  }
  for (const t of niceTicks(xLo, xHi, 7)) {
    const x = fmt(sx(t));
    parts.push(
      `<line class="grid" x1="${x}" y1="${fmt(MARGIN.top)}" ` +
        `x2="${x}" y2="${fmt(MARGIN.top + plotH)}" stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${x}" y="${fmt(MARGIN.top + plotH + 20)}" text-anchor="middle" ` +
        `font-size="12" fill="#333333">${tickLabel(t)}</text>`,
    );
  }

  // axes
  parts.push(
    `<rect x="${fmt(MARGIN.left)}" y="${fmt(MARGIN.top)}" width="${fmt(plotW)}" ` +
      `height="${fmt(plotH)}" fill="none" stroke="#333333" stroke-width="1"/>`,
  );

  // series: error bars under markers under the legend
  series.forEach((s, k) => {
    const color = PALETTE[k % PALETTE.length]!;
    if (spec.yerrColumn) {
      for (const p of s.points) {
        const x = fmt(sx(p.x));
        const y0 = fmt(sy(p.y - p.err));
        const y1 = fmt(sy(p.y + p.err));
        parts.push(
          `<line class="errbar" x1="${x}" y1="${y0}" x2="${x}" y2="${y1}" ` +
            `stroke="${color}" stroke-width="1.5"/>`,
        );
        for (const yc of [y0, y1]) {
          parts.push(
            `<line class="errcap" x1="${fmt(sx(p.x) - 4)}" y1="${yc}" ` +
              `x2="${fmt(sx(p.x) + 4)}" y2="${yc}" stroke="${color}" stroke-width="1.5"/>`,
          );
        }
      }
    }
    const coords = s.points
      .map((p) => `${fmt(sx(p.x))},${fmt(sy(p.y))}`)
      .join(" ");
    parts.push(
      `<polyline class="series" fill="none" stroke="${color}" stroke-width="2" ` +
        `points="${coords}"/>`,
    );
    for (const p of s.points) {
      parts.push(
        `<circle class="marker" cx="${fmt(sx(p.x))}" cy="${fmt(sy(p.y))}" ` +
          `r="3.5" fill="${color}"/>`,
      );
    }
    // legend entry
    const ly = MARGIN.top + 10 + 22 * k;
    parts.push(
      `<line x1="${fmt(MARGIN.left + plotW + 12)}" y1="${ly}" ` +
        `x2="${fmt(MARGIN.left + plotW + 40)}" y2="${ly}" stroke="${color}" stroke-width="2"/>`,
    );
    parts.push(
      `<text x="${fmt(MARGIN.left + plotW + 46)}" y="${ly}" font-size="12" ` +
        `dominant-baseline="middle" fill="#333333">${escapeXml(s.name)}</text>`,
    );
  });

  // labels
  const title = spec.title ?? "";
  if (title !== "") {
    parts.push(
      `<text x="${fmt(MARGIN.left + plotW / 2)}" y="26" text-anchor="middle" ` +
        `font-size="16" fill="#111111">${escapeXml(title)}</text>`,
    );
  }
  parts.push(
    `<text x="${fmt(MARGIN.left + plotW / 2)}" y="${HEIGHT - 12}" ` +
      `text-anchor="middle" font-size="13" fill="#111111">` +
      `${escapeXml(spec.xLabel ?? spec.xColumn)}</text>`,
  );
  parts.push(
    `<text x="18" y="${fmt(MARGIN.top + plotH / 2)}" text-anchor="middle" ` +
      `font-size="13" fill="#111111" transform="rotate(-90 18 ${fmt(
        MARGIN.top + plotH / 2,
      )})">${escapeXml(spec.yLabel ?? spec.yColumn)}</text>`,
  );

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

/** Read, render, and atomically (re)write the output file. */
export function renderSweepFigure(spec: FigureSpec): RenderSummary {
  if (extname(spec.outputPath).toLowerCase() !== ".svg") {
    throw new Error(
      `unsupported output extension on "${spec.outputPath}": this tool writes .svg`,
    );
  }
  const text = readFileSync(spec.inputCsv, "utf-8");
  const rows = parseSweepCsv(text);
  const svg = buildSweepFigure(rows, spec);
  const tmp = `${spec.outputPath}.tmp-${process.pid}`;
  writeFileSync(tmp, svg, "utf-8");
  renameSync(tmp, spec.outputPath); // atomic on the same filesystem
  const series = groupSeries(rows, spec);
  return {
    series: series.length,
    pointsPerSeries: series.map((s) => s.points.length),
    points: rows.length,
  };
}
