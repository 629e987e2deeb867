/**
 * The nine standard figures, each built from documented simulator CSVs
 * found in one input directory.  File naming conventions:
 *
 *   fig1  rc_sweep_greedy.csv, rc_sweep_random.csv
 *   fig2  rc_sweep_v*.csv (panel a), rc_sweep_r*.csv (panel b)
 *   fig3  rc_vs_v_r*.csv (a), rc_vs_r_v*.csv (b)
 *   fig4  travel_vs_R_v*.csv (a), travel_vs_R_r*.csv (b)
 *   fig5  loads_v*.csv and loads_r*.csv (one histogram panel each)
 *   fig6  travel_vs_v_r*.csv (a), travel_vs_r_v*.csv (b)
 *   fig7  beta_sweep_v*.csv (a), beta_sweep_r*.csv (b)
 *   fig8  betac_vs_v_r*.csv (a), betac_vs_r_v*.csv (b)
 *   fig9  betac_vs_R_C10.csv, betac_vs_R_Cinf.csv
 *
 * The wildcard part of a filename becomes the series label (e.g.
 * rc_sweep_v0.1.csv -> "v=0.1").  Theory overlays use the theory columns
 * already present in the CSVs; this tool never computes statistics.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { CsvError, column, readCsv, requireColumns, Table } from "./csv.js";
import { Panel, Series, renderFigure } from "./svg.js";

export interface FigureSpec {
    figureId: string;
    inputDir: string;
    overlayTheory: boolean;
    output: string;
}

export const FIGURE_IDS = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"];

function globPrefix(dir: string, prefix: string, suffix = ".csv"): string[] {
    if (!fs.existsSync(dir)) {
        throw new CsvError(`input directory does not exist: ${dir}`);
    }
    return fs.readdirSync(dir)
        .filter(name => name.startsWith(prefix) && name.endsWith(suffix))
        .sort()
        .map(name => path.join(dir, name));
}

function labelled(filePath: string, prefix: string, axis: string): string {
    const stem = path.basename(filePath, ".csv").slice(prefix.length);
    return `${axis}=${stem}`;
}

function requireFiles(dir: string, prefix: string): string[] {
    const files = globPrefix(dir, prefix);
    if (files.length === 0) {
        throw new CsvError(`no input CSVs matching ${prefix}*.csv in ${dir}`);
    }
    return files;
}

function seriesFrom(table: Table, xcol: string, ycol: string, label: string,
                    errcol?: string): Series {
    requireColumns(table, errcol ? [xcol, ycol, errcol] : [xcol, ycol]);
    return {
        label,
        x: column(table, xcol),
        y: column(table, ycol),
        yerr: errcol ? column(table, errcol) : undefined,
        kind: "both",
    };
}

function sweepPanel(dir: string, prefix: string, axisLabel: string, title: string,
                    ycol: string, yerr: string, ylabel: string, xcol = "axis_value",
                    xlabel = "packet generation rate R"): Panel {
    const series = requireFiles(dir, prefix).map(file =>
        seriesFrom(readCsv(file), xcol, ycol, labelled(file, prefix, axisLabel), yerr));
    return { title, xlabel, ylabel, series };
}

function buildFig1(dir: string): Panel[] {
    const greedy = readCsv(path.join(dir, "rc_sweep_greedy.csv"));
    const random = readCsv(path.join(dir, "rc_sweep_random.csv"));
    return [{
        title: "order parameter vs generation rate",
        xlabel: "packet generation rate R",
        ylabel: "order parameter",
        series: [
            seriesFrom(greedy, "axis_value", "eta_mean", "greedy routing", "eta_se"),
            seriesFrom(random, "axis_value", "eta_mean", "random routing", "eta_se"),
        ],
    }];
}

function buildFig2(dir: string): Panel[] {
    return [
        sweepPanel(dir, "rc_sweep_v", "v", "(a) by moving speed", "eta_mean", "eta_se", "order parameter"),
        sweepPanel(dir, "rc_sweep_r", "r", "(b) by communication radius", "eta_mean", "eta_se", "order parameter"),
    ];
}

function buildFig3(dir: string): Panel[] {
    const a = requireFiles(dir, "rc_vs_v_r").map(file =>
        seriesFrom(readCsv(file), "axis_value", "rc_mean", labelled(file, "rc_vs_v_r", "r"), "rc_se"));
    const b = requireFiles(dir, "rc_vs_r_v").map(file =>
        seriesFrom(readCsv(file), "axis_value", "rc_mean", labelled(file, "rc_vs_r_v", "v"), "rc_se"));
    return [
        { title: "(a) critical rate vs speed", xlabel: "moving speed v", ylabel: "critical rate Rc", xlog: true, series: a },
        { title: "(b) critical rate vs radius", xlabel: "communication radius r", ylabel: "critical rate Rc", series: b },
    ];
}

function buildFig4(dir: string): Panel[] {
    return [
        sweepPanel(dir, "travel_vs_R_v", "v", "(a) by moving speed", "avg_t_mean", "avg_t_se", "average traveling time"),
        sweepPanel(dir, "travel_vs_R_r", "r", "(b) by communication radius", "avg_t_mean", "avg_t_se", "average traveling time"),
    ];
}

function buildFig5(dir: string): Panel[] {
    const files = [...requireFiles(dir, "loads_v"), ...requireFiles(dir, "loads_r")];
    return files.map(file => {
        const table = readCsv(file);
        requireColumns(table, ["bin_left", "bin_right", "p_n"]);
        const lefts = column(table, "bin_left");
        const rights = column(table, "bin_right");
        const centers = lefts.map((left, i) => (left + rights[i]) / 2);
        const stem = path.basename(file, ".csv").slice("loads_".length);
        return {
            title: stem,
            xlabel: "load n",
            ylabel: "P(n)",
            xlog: true,
            ylog: true,
            series: [{ label: stem, x: centers, y: column(table, "p_n"), kind: "points" as const }],
        };
    });
}

function buildFig6(dir: string): Panel[] {
    return [
        sweepPanel(dir, "travel_vs_v_r", "r", "(a) travel time vs speed", "avg_t_mean", "avg_t_se",
            "average traveling time", "axis_value", "moving speed v"),
        sweepPanel(dir, "travel_vs_r_v", "v", "(b) travel time vs radius", "avg_t_mean", "avg_t_se",
            "average traveling time", "axis_value", "communication radius r"),
    ];
}

function betaPanel(dir: string, prefix: string, axis: string, title: string, overlay: boolean): Panel {
    const series: Series[] = [];
    for (const file of requireFiles(dir, prefix)) {
        const table = readCsv(file);
        series.push(seriesFrom(table, "beta", "rho_mean", labelled(file, prefix, axis), "rho_se"));
        if (overlay) {
            requireColumns(table, ["rho_mf"]);
            series.push({
                label: `${labelled(file, prefix, axis)} mean field`,
                x: column(table, "beta"),
                y: column(table, "rho_mf"),
                kind: "line",
                dashed: true,
            });
        }
    }
    return { title, xlabel: "spreading rate beta", ylabel: "infected density rho", series };
}

function buildFig7(dir: string, overlay: boolean): Panel[] {
    return [
        betaPanel(dir, "beta_sweep_v", "v", "(a) by moving speed", overlay),
        betaPanel(dir, "beta_sweep_r", "r", "(b) by communication radius", overlay),
    ];
}

function betacPanel(files: string[], prefix: string, axis: string, title: string,
                    xlabel: string, overlay: boolean, xlog = false): Panel {
    const series: Series[] = [];
    for (const file of files) {
        const table = readCsv(file);
        series.push(seriesFrom(table, "axis_value", "betac_mean", labelled(file, prefix, axis), "betac_se"));
        if (overlay) {
            requireColumns(table, ["betac_free_theory"]);
            series.push({
                label: `${labelled(file, prefix, axis)} theory`,
                x: column(table, "axis_value"),
                y: column(table, "betac_free_theory"),
                kind: "line",
                dashed: true,
            });
        }
    }
    return { title, xlabel, ylabel: "epidemic threshold", xlog, ylog: true, series };
}

function buildFig8(dir: string, overlay: boolean): Panel[] {
    return [
        betacPanel(requireFiles(dir, "betac_vs_v_r"), "betac_vs_v_r", "r",
            "(a) threshold vs speed", "moving speed v", overlay, true),
        betacPanel(requireFiles(dir, "betac_vs_r_v"), "betac_vs_r_v", "v",
            "(b) threshold vs radius", "communication radius r", overlay),
    ];
}

function buildFig9(dir: string, overlay: boolean): Panel[] {
    const c10 = readCsv(path.join(dir, "betac_vs_R_C10.csv"));
    const cinf = readCsv(path.join(dir, "betac_vs_R_Cinf.csv"));
    const series: Series[] = [
        seriesFrom(c10, "axis_value", "betac_mean", "C=10", "betac_se"),
        seriesFrom(cinf, "axis_value", "betac_mean", "C=inf", "betac_se"),
    ];
    if (overlay) {
        requireColumns(cinf, ["betac_free_theory"]);
        series.push({
            label: "free-flow theory",
            x: column(cinf, "axis_value"),
            y: column(cinf, "betac_free_theory"),
            kind: "line",
            dashed: true,
        });
        requireColumns(c10, ["betac_congested_theory"]);
        series.push({
            label: "congested limit 1/C",
            x: column(c10, "axis_value"),
            y: column(c10, "betac_congested_theory"),
            kind: "line",
            dashed: true,
        });
    }
    return [{
        title: "epidemic threshold vs generation rate",
        xlabel: "packet generation rate R",
        ylabel: "epidemic threshold",
        xlog: true,
        ylog: true,
        series,
    }];
}

export function buildFigure(figureId: string, inputDir: string, overlayTheory: boolean): Panel[] {
    switch (figureId) {
        case "fig1": return buildFig1(inputDir);
        case "fig2": return buildFig2(inputDir);
        case "fig3": return buildFig3(inputDir);
        case "fig4": return buildFig4(inputDir);
        case "fig5": return buildFig5(inputDir);
        case "fig6": return buildFig6(inputDir);
        case "fig7": return buildFig7(inputDir, overlayTheory);
        case "fig8": return buildFig8(inputDir, overlayTheory);
        case "fig9": return buildFig9(inputDir, overlayTheory);
        default:
            throw new CsvError(`unknown figure id: ${figureId} (expected fig1..fig9)`);
    }
}

/** Render one figure to SVG text; pure given the CSV contents. */
export function renderFigureSvg(spec: FigureSpec): string {
    const panels = buildFigure(spec.figureId, spec.inputDir, spec.overlayTheory);
    const columns = spec.figureId === "fig5" ? 4 : Math.min(panels.length, 2);
    return renderFigure(panels, columns);
}

export function renderToFile(spec: FigureSpec): void {
    const svg = renderFigureSvg(spec);
    fs.mkdirSync(path.dirname(spec.output), { recursive: true });
    fs.writeFileSync(spec.output, svg, "utf8");
}
