#!/usr/bin/env node
/**
 * plot --figure fig1..fig9|all --in DIR --out DIR [--no-theory]
 *
 * Reads the simulator's CSVs from --in and writes <figure>.svg into --out.
 * Rendering is read-only on the inputs and idempotent.
 */

import * as path from "node:path";

import { CsvError } from "./csv.js";
import { FIGURE_IDS, renderToFile } from "./figures.js";

interface Args {
    figure: string;
    inDir: string;
    outDir: string;
    overlayTheory: boolean;
}

function parseArgs(argv: string[]): Args {
    let figure = "";
    let inDir = "";
    let outDir = "";
    let overlayTheory = true;
    for (let i = 0; i < argv.length; i += 1) {
        const arg = argv[i];
        if (arg === "--figure") figure = argv[++i] ?? "";
        else if (arg === "--in") inDir = argv[++i] ?? "";
        else if (arg === "--out") outDir = argv[++i] ?? "";
        else if (arg === "--no-theory") overlayTheory = false;
        else throw new CsvError(`unknown argument: ${arg}`);
    }
    if (!figure || !inDir || !outDir) {
        throw new CsvError("usage: plot --figure fig1..fig9|all --in DIR --out DIR [--no-theory]");
    }
    if (figure !== "all" && !FIGURE_IDS.includes(figure)) {
        throw new CsvError(`unknown figure id: ${figure}`);
    }
    return { figure, inDir, outDir, overlayTheory };
}

export function main(argv: string[]): number {
    try {
        const args = parseArgs(argv);
        const ids = args.figure === "all" ? FIGURE_IDS : [args.figure];
        for (const figureId of ids) {
            renderToFile({
                figureId,
                inputDir: args.inDir,
                overlayTheory: args.overlayTheory,
                output: path.join(args.outDir, `${figureId}.svg`),
            });
            console.log(`wrote ${path.join(args.outDir, `${figureId}.svg`)}`);
        }
        return 0;
    } catch (err) {
        console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
        return 1;
    }
}

const invokedDirectly = process.argv[1] !== undefined
    && import.meta.url === new URL(`file://${path.resolve(process.argv[1])}`).href;
if (invokedDirectly) {
    process.exit(main(process.argv.slice(2)));
}
