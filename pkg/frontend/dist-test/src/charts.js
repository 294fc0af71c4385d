/**
 * Minimal SVG chart geometry: data-to-pixel mapping and path strings for
 * the ROC, precision/recall, and per-threshold metric lines. The chart
 * layer draws server-provided points; it never derives new metric values.
 */
export const DEFAULT_GEOM = { width: 320, height: 240, margin: 32 };
export function toPixel(point, geom) {
    const [x, y] = point;
    const innerW = geom.width - 2 * geom.margin;
    const innerH = geom.height - 2 * geom.margin;
    return [geom.margin + x * innerW, geom.height - geom.margin - y * innerH];
}
function pathFrom(points, geom) {
    if (points.length === 0)
        return "";
    const parts = points.map((p, i) => {
        const [px, py] = toPixel(p, geom);
        return `${i === 0 ? "M" : "L"}${px.toFixed(2)},${py.toFixed(2)}`;
    });
    return parts.join(" ");
}
/**
 * ROC polyline through the unit square, sorted by false-positive rate,
 * with the (0,0) and (1,1) corner points guaranteed present.
 */
export function rocPath(points, geom = DEFAULT_GEOM) {
    const all = [...points];
    if (!all.some(([x, y]) => x === 0 && y === 0))
        all.push([0, 0]);
    if (!all.some(([x, y]) => x === 1 && y === 1))
        all.push([1, 1]);
    all.sort((a, b) => a[0] - b[0] || a[1] - b[1]);
    return pathFrom(all, geom);
}
/** Precision/recall polyline sorted by recall. */
export function prPath(points, geom = DEFAULT_GEOM) {
    const sorted = [...points].sort((a, b) => a[0] - b[0] || a[1] - b[1]);
    return pathFrom(sorted, geom);
}
/** Metric-vs-threshold polyline (both axes already in [0, 1]). */
export function seriesPath(points, geom = DEFAULT_GEOM) {
    return pathFrom(points, geom);
}
export function diagonalPath(geom = DEFAULT_GEOM) {
    return pathFrom([
        [0, 0],
        [1, 1],
    ], geom);
}
export function axisTicks(count) {
    const ticks = [];
    for (let i = 0; i <= count; i++)
        ticks.push(i / count);
    return ticks;
}
/** SVG fragment for an axes frame with ticks; purely presentational. */
export function axesSvg(geom, xLabel, yLabel) {
    const [x0, y0] = toPixel([0, 0], geom);
    const [x1, y1] = toPixel([1, 1], geom);
    const ticks = axisTicks(4)
        .map((t) => {
        const [tx, ty] = toPixel([t, t], geom);
        return (`<line x1="${tx}" y1="${y0}" x2="${tx}" y2="${y0 + 4}" stroke="#888"/>` +
            `<text x="${tx}" y="${y0 + 16}" font-size="9" text-anchor="middle">${t}</text>` +
            `<line x1="${x0 - 4}" y1="${ty}" x2="${x0}" y2="${ty}" stroke="#888"/>` +
            `<text x="${x0 - 6}" y="${ty + 3}" font-size="9" text-anchor="end">${t}</text>`);
    })
        .join("");
    return (`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="#444"/>` +
        `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="#444"/>` +
        ticks +
        `<text x="${(x0 + x1) / 2}" y="${geom.height - 4}" font-size="10" text-anchor="middle">${xLabel}</text>` +
        `<text x="10" y="${(y0 + y1) / 2}" font-size="10" text-anchor="middle" transform="rotate(-90 10 ${(y0 + y1) / 2})">${yLabel}</text>`);
}
