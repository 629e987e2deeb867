/**
 * Minimal deterministic SVG plotting: linear/log scales, ticks, line and
 * scatter series with optional error bars, multi-panel layout.  Everything
 * is plain string assembly, so re-rendering the same inputs is
 * byte-identical.
 */

export interface Series {
    label: string;
    x: number[];
    y: number[];
    yerr?: number[];
    kind: "line" | "points" | "both";
    dashed?: boolean;
}

export interface Panel {
    title: string;
    xlabel: string;
    ylabel: string;
    xlog?: boolean;
    ylog?: boolean;
    series: Series[];
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"];

const PANEL_W = 440;
const PANEL_H = 340;
const MARGIN = { left: 64, right: 16, top: 34, bottom: 48 };

/** Fixed-precision number text, stable across runs. */
export function fmt(value: number): string {
    if (!isFinite(value)) return "0";
    if (value === 0) return "0";
    const text = value.toPrecision(6);
    return text.includes(".") ? text.replace(/\.?0+$/, "").replace(/\.?0+e/, "e") : text;
}

function tickStep(span: number): number {
    const raw = span / 5;
    const power = Math.pow(10, Math.floor(Math.log10(raw)));
    const unit = raw / power;
    const nice = unit >= 5 ? 5 : unit >= 2 ? 2 : 1;
    return nice * power;
}

export function linearTicks(lo: number, hi: number): number[] {
    if (!(hi > lo)) return [lo];
    const step = tickStep(hi - lo);
    const ticks: number[] = [];
    for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
        ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
    }
    return ticks;
}

export function logTicks(lo: number, hi: number): number[] {
    const ticks: number[] = [];
    for (let p = Math.floor(Math.log10(lo)); p <= Math.ceil(Math.log10(hi)); p += 1) {
        const v = Math.pow(10, p);
        if (v >= lo / 1.0001 && v <= hi * 1.0001) ticks.push(v);
    }
    return ticks.length >= 2 ? ticks : [lo, hi];
}

interface Extent { lo: number; hi: number }

function extent(values: number[], log: boolean): Extent {
    const usable = values.filter(v => isFinite(v) && (!log || v > 0));
    if (usable.length === 0) return { lo: log ? 0.1 : 0, hi: 1 };
    let lo = Math.min(...usable);
    let hi = Math.max(...usable);
    if (lo === hi) {
        lo = log ? lo / 2 : lo - 1;
        hi = log ? hi * 2 : hi + 1;
    } else if (!log) {
        const pad = (hi - lo) * 0.06;
        lo = lo >= 0 && lo - pad < 0 ? 0 : lo - pad;
        hi = hi + pad;
    } else {
        lo = lo / 1.4;
        hi = hi * 1.4;
    }
    return { lo, hi };
}

function makeScale(e: Extent, r0: number, r1: number, log: boolean): (v: number) => number {
    if (log) {
        const l0 = Math.log10(e.lo);
        const l1 = Math.log10(e.hi);
        return v => r0 + ((Math.log10(v) - l0) / (l1 - l0)) * (r1 - r0);
    }
    return v => r0 + ((v - e.lo) / (e.hi - e.lo)) * (r1 - r0);
}

function renderPanel(panel: Panel, originX: number, originY: number, parts: string[]): void {
    const x0 = originX + MARGIN.left;
    const x1 = originX + PANEL_W - MARGIN.right;
    const y0 = originY + PANEL_H - MARGIN.bottom;
    const y1 = originY + MARGIN.top;

    const xs = panel.series.flatMap(s => s.x);
    const ys = panel.series.flatMap(s => s.y);
    const ex = extent(xs, !!panel.xlog);
    const ey = extent(ys, !!panel.ylog);
    const sx = makeScale(ex, x0, x1, !!panel.xlog);
    const sy = makeScale(ey, y0, y1, !!panel.ylog);

    parts.push(`<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#333" stroke-width="1"/>`);
    parts.push(`<text x="${(x0 + x1) / 2}" y="${originY + 18}" text-anchor="middle" font-size="13" font-weight="bold">${panel.title}</text>`);

    const xticks = panel.xlog ? logTicks(ex.lo, ex.hi) : linearTicks(ex.lo, ex.hi);
    for (const t of xticks) {
        const px = sx(t);
        parts.push(`<line x1="${fmt(px)}" y1="${y0}" x2="${fmt(px)}" y2="${y0 + 4}" stroke="#333"/>`);
        parts.push(`<text x="${fmt(px)}" y="${y0 + 17}" text-anchor="middle" font-size="10">${fmt(t)}</text>`);
    }
    const yticks = panel.ylog ? logTicks(ey.lo, ey.hi) : linearTicks(ey.lo, ey.hi);
    for (const t of yticks) {
        const py = sy(t);
        parts.push(`<line x1="${x0 - 4}" y1="${fmt(py)}" x2="${x0}" y2="${fmt(py)}" stroke="#333"/>`);
        parts.push(`<text x="${x0 - 7}" y="${fmt(py + 3)}" text-anchor="end" font-size="10">${fmt(t)}</text>`);
    }
    parts.push(`<text x="${(x0 + x1) / 2}" y="${y0 + 36}" text-anchor="middle" font-size="12">${panel.xlabel}</text>`);
    parts.push(`<text x="${originX + 16}" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 ${originX + 16} ${(y0 + y1) / 2})">${panel.ylabel}</text>`);

    panel.series.forEach((series, index) => {
        const color = PALETTE[index % PALETTE.length];
        const keep = series.x
            .map((x, i) => ({ x, y: series.y[i], err: series.yerr ? series.yerr[i] : 0 }))
            .filter(p => isFinite(p.x) && isFinite(p.y))
            .filter(p => (!panel.xlog || p.x > 0) && (!panel.ylog || p.y > 0));
        if (keep.length === 0) return;
        if (series.kind !== "points") {
            const path = keep.map((p, i) => `${i === 0 ? "M" : "L"}${fmt(sx(p.x))} ${fmt(sy(p.y))}`).join(" ");
            const dash = series.dashed ? ` stroke-dasharray="6 4"` : "";
            parts.push(`<path d="${path}" fill="none" stroke="${color}" stroke-width="1.6"${dash}/>`);
        }
        if (series.kind !== "line") {
            for (const p of keep) {
                if (p.err > 0) {
                    const yLow = panel.ylog && p.y - p.err <= 0 ? p.y : p.y - p.err;
                    parts.push(`<line x1="${fmt(sx(p.x))}" y1="${fmt(sy(yLow))}" x2="${fmt(sx(p.x))}" y2="${fmt(sy(p.y + p.err))}" stroke="${color}" stroke-width="1"/>`);
                }
                parts.push(`<circle cx="${fmt(sx(p.x))}" cy="${fmt(sy(p.y))}" r="3" fill="${color}"/>`);
            }
        }
        const lx = x0 + 10;
        const ly = y1 + 14 + 14 * index;
        parts.push(`<line x1="${lx}" y1="${ly - 3}" x2="${lx + 18}" y2="${ly - 3}" stroke="${color}" stroke-width="2"/>`);
        parts.push(`<text x="${lx + 23}" y="${ly}" font-size="10">${series.label}</text>`);
    });
}

export function renderFigure(panels: Panel[], columns?: number): string {
    const cols = columns ?? Math.min(panels.length, 2);
    const rowCount = Math.ceil(panels.length / cols);
    const width = cols * PANEL_W;
    const height = rowCount * PANEL_H;
    const parts: string[] = [];
    parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`);
    parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
    panels.forEach((panel, index) => {
        const originX = (index % cols) * PANEL_W;
        const originY = Math.floor(index / cols) * PANEL_H;
        renderPanel(panel, originX, originY, parts);
    });
    parts.push("</svg>");
    return parts.join("\n") + "\n";
}
