import * as fs from "node:fs";

export interface Table {
    path: string;
    header: string[];
    rows: Record<string, string>[];
}

export class CsvError extends Error {}

/** Strict reader for the simulator's CSV outputs (no quoting, no escapes). */
export function readCsv(path: string): Table {
    if (!fs.existsSync(path)) {
        throw new CsvError(`missing input CSV: ${path}`);
    }
    const text = fs.readFileSync(path, "utf8");
    const lines = text.split("\n").filter(line => line.length > 0);
    if (lines.length === 0) {
        throw new CsvError(`empty CSV: ${path}`);
    }
    const header = lines[0].split(",");
    if (lines.length === 1) {
        throw new CsvError(`CSV has a header but no data rows: ${path}`);
    }
    const rows = lines.slice(1).map((line, i) => {
        const cells = line.split(",");
        if (cells.length !== header.length) {
            throw new CsvError(`row ${i + 2} of ${path} has ${cells.length} cells, expected ${header.length}`);
        }
        const row: Record<string, string> = {};
        header.forEach((name, j) => { row[name] = cells[j]; });
        return row;
    });
    return { path, header, rows };
}

export function requireColumns(table: Table, columns: string[]): void {
    for (const column of columns) {
        if (!table.header.includes(column)) {
            throw new CsvError(`${table.path}: missing required column '${column}'`);
        }
    }
}

export function column(table: Table, name: string): number[] {
    requireColumns(table, [name]);
    return table.rows.map(row => Number(row[name]));
}
