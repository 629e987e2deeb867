import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { describe, expect, it } from "vitest";

import { FIGURE_IDS, buildFigure, renderFigureSvg, renderToFile } from "../src/figures.js";
import { fmt, linearTicks, logTicks } from "../src/svg.js";

const GOLDEN = path.join(__dirname, "..", "golden");

function tempDir(): string {
    return fs.mkdtempSync(path.join(os.tmpdir(), "figs-"));
}

describe("figure rendering from golden CSVs", () => {
    for (const figureId of FIGURE_IDS) {
        it(`${figureId} renders and is byte-stable`, () => {
            const out = tempDir();
            const spec = {
                figureId,
                inputDir: GOLDEN,
                overlayTheory: true,
                output: path.join(out, `${figureId}.svg`),
            };
            const first = renderFigureSvg(spec);
            const second = renderFigureSvg(spec);
            expect(first).toBe(second);
            expect(first.startsWith("<svg")).toBe(true);
            expect(first).toContain("</svg>");
            renderToFile(spec);
            const onDiskOnce = fs.readFileSync(spec.output, "utf8");
            renderToFile(spec);
            const onDiskTwice = fs.readFileSync(spec.output, "utf8");
            expect(onDiskOnce).toBe(first);
            expect(onDiskTwice).toBe(first);
        });
    }

    it("rendering leaves the input CSVs untouched", () => {
        const before = fs.readdirSync(GOLDEN).map(f =>
            [f, fs.readFileSync(path.join(GOLDEN, f), "utf8")] as const);
        renderFigureSvg({
            figureId: "fig1", inputDir: GOLDEN, overlayTheory: true,
            output: path.join(tempDir(), "fig1.svg"),
        });
        for (const [name, content] of before) {
            expect(fs.readFileSync(path.join(GOLDEN, name), "utf8")).toBe(content);
        }
    });

    it("names a missing column", () => {
        const dir = tempDir();
        const source = fs.readFileSync(path.join(GOLDEN, "rc_sweep_greedy.csv"), "utf8");
        const lines = source.split("\n");
        const broken = lines[0].replace("eta_mean", "eta_renamed");
        fs.writeFileSync(path.join(dir, "rc_sweep_greedy.csv"), [broken, ...lines.slice(1)].join("\n"));
        fs.copyFileSync(path.join(GOLDEN, "rc_sweep_random.csv"), path.join(dir, "rc_sweep_random.csv"));
        expect(() => buildFigure("fig1", dir, true)).toThrowError(/missing required column 'eta_mean'/);
    });

    it("names an empty input file", () => {
        const dir = tempDir();
        fs.writeFileSync(path.join(dir, "rc_sweep_greedy.csv"), "");
        fs.copyFileSync(path.join(GOLDEN, "rc_sweep_random.csv"), path.join(dir, "rc_sweep_random.csv"));
        expect(() => buildFigure("fig1", dir, true)).toThrowError(/empty CSV/);
    });

    it("rejects unknown figure ids", () => {
        expect(() => buildFigure("fig99", GOLDEN, true)).toThrowError(/unknown figure id/);
    });

    it("reports an empty input directory clearly", () => {
        expect(() => buildFigure("fig2", tempDir(), true)).toThrowError(/no input CSVs matching/);
    });
});

describe("svg primitives", () => {
    it("formats numbers deterministically", () => {
        expect(fmt(0)).toBe("0");
        expect(fmt(1.5)).toBe("1.5");
        expect(fmt(0.30000000000000004)).toBe("0.3");
        expect(fmt(12345.678)).toBe("12345.7");
    });

    it("covers the range with linear ticks", () => {
        const ticks = linearTicks(0, 480);
        expect(ticks[0]).toBeGreaterThanOrEqual(0);
        expect(ticks[ticks.length - 1]).toBeLessThanOrEqual(480);
        expect(ticks.length).toBeGreaterThanOrEqual(4);
    });

    it("gives decade log ticks", () => {
        expect(logTicks(0.01, 1)).toEqual([0.01, 0.1, 1]);
    });
});
