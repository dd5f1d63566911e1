/**
 * Strict reader for the simulator's aggregate sweep CSV.
 *
 * The format is fixed: one header line, LF endings, one row per
 * (sweep value, solver) pair. Anything else is rejected loudly so a
 * truncated or foreign file never renders as an empty-looking chart.
 */

export const CSV_HEADER =
  "sweep_param,sweep_value,solver,mean_rate,stderr_rate,mean_time_s,trials";

export const COLUMNS = CSV_HEADER.split(",");

const NUMERIC_COLUMNS = new Set([
  "sweep_value",
  "mean_rate",
  "stderr_rate",
  "mean_time_s",
  "trials",
]);

export interface SweepRow {
  sweep_param: string;
  sweep_value: number;
  solver: string;
  mean_rate: number;
  stderr_rate: number;
  mean_time_s: number;
  trials: number;
}

export class CsvFormatError extends Error {}

export class MissingColumnError extends Error {
  constructor(public readonly column: string) {
    super(`column "${column}" not found in CSV header (have: ${CSV_HEADER})`);
  }
}

function parseNumber(raw: string, column: string, line: number): number {
  const value = Number(raw);
  if (raw.trim() === "" || !Number.isFinite(value)) {
    throw new CsvFormatError(
      `line ${line}: ${column} is not a finite number: "${raw}"`,
    );
  }
  return value;
}

export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text.split("\n");
  while (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop(); // trailing newline
  }
  if (lines.length === 0) {
    throw new CsvFormatError("empty CSV: no header line");
  }
  if (lines[0] !== CSV_HEADER) {
    throw new CsvFormatError(
      `unexpected CSV header: "${lines[0]}" (want "${CSV_HEADER}")`,
    );
  }
  if (lines.length === 1) {
    throw new CsvFormatError("empty CSV: header present but no data rows");
  }
  const rows: SweepRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i]!;
    const fields = line.split(",");
    if (fields.length !== COLUMNS.length) {
      throw new CsvFormatError(
        `line ${i + 1}: expected ${COLUMNS.length} fields, got ${fields.length}`,
      );
    }
    const trials = parseNumber(fields[6]!, "trials", i + 1);
    if (!Number.isInteger(trials) || trials < 1) {
      throw new CsvFormatError(
        `line ${i + 1}: trials must be a positive integer, got "${fields[6]}"`,
      );
    }
    rows.push({
      sweep_param: fields[0]!,
      sweep_value: parseNumber(fields[1]!, "sweep_value", i + 1),
      solver: fields[2]!,
      mean_rate: parseNumber(fields[3]!, "mean_rate", i + 1),
      stderr_rate: parseNumber(fields[4]!, "stderr_rate", i + 1),
      mean_time_s: parseNumber(fields[5]!, "mean_time_s", i + 1),
      trials,
    });
  }
  return rows;
}

/** Column accessor used by the figure builder; validates the name first. */
export function columnValues(
  rows: SweepRow[],
  column: string,
): (number | string)[] {
  if (!COLUMNS.includes(column)) {
    throw new MissingColumnError(column);
  }
  return rows.map((row) => row[column as keyof SweepRow]);
}

export function numericColumnValues(rows: SweepRow[], column: string): number[] {
  const values = columnValues(rows, column);
  if (!NUMERIC_COLUMNS.has(column)) {
    throw new CsvFormatError(
      `column "${column}" is not numeric; pick one of ${[...NUMERIC_COLUMNS].join(", ")}`,
    );
  }
  return values as number[];
}

export function textColumnValues(rows: SweepRow[], column: string): string[] {
  return columnValues(rows, column).map(String);
}
