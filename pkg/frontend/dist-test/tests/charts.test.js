import assert from "node:assert/strict";
import { test } from "node:test";
import { DEFAULT_GEOM, prPath, rocPath, seriesPath, toPixel } from "../src/charts.js";
test("roc path passes through the (0,0) and (1,1) corners on fixture data", () => {
    // fixture: a separated-classifier ROC that omits both corner points
    const points = [
        [0.0, 0.6],
        [0.2, 0.9],
        [0.6, 1.0],
    ];
    const d = rocPath(points, DEFAULT_GEOM);
    const [x0, y0] = toPixel([0, 0], DEFAULT_GEOM);
    const [x1, y1] = toPixel([1, 1], DEFAULT_GEOM);
    assert.ok(d.startsWith(`M${x0.toFixed(2)},${y0.toFixed(2)}`), `path starts at (0,0): ${d}`);
    assert.ok(d.endsWith(`L${x1.toFixed(2)},${y1.toFixed(2)}`), `path ends at (1,1): ${d}`);
});
test("roc path keeps corners that are already present", () => {
    const points = [
        [0, 0],
        [0.5, 0.8],
        [1, 1],
    ];
    const d = rocPath(points, DEFAULT_GEOM);
    assert.equal(d.split(" ").length, 3); // no duplicates appended
});
test("roc points are sorted by fpr before drawing", () => {
    const shuffled = [
        [0.9, 0.95],
        [0.1, 0.4],
        [0.5, 0.8],
    ];
    const d = rocPath(shuffled, DEFAULT_GEOM);
    const xs = [...d.matchAll(/[ML]([\d.]+),/g)].map((m) => Number(m[1]));
    const sorted = [...xs].sort((a, b) => a - b);
    assert.deepEqual(xs, sorted);
});
test("pixel mapping puts the unit square inside the margins", () => {
    const geom = { width: 100, height: 80, margin: 10 };
    assert.deepEqual(toPixel([0, 0], geom), [10, 70]);
    assert.deepEqual(toPixel([1, 1], geom), [90, 10]);
    assert.deepEqual(toPixel([0.5, 0.5], geom), [50, 40]);
});
test("series path preserves point order (threshold axis)", () => {
    const d = seriesPath([
        [0, 1],
        [0.5, 0.4],
        [1, 0],
    ], DEFAULT_GEOM);
    assert.ok(d.startsWith("M"));
    assert.equal((d.match(/L/g) ?? []).length, 2);
});
test("pr path sorts by recall", () => {
    const d = prPath([
        [1, 0.5],
        [0, 1],
    ], DEFAULT_GEOM);
    const xs = [...d.matchAll(/[ML]([\d.]+),/g)].map((m) => Number(m[1]));
    assert.ok(xs[0] < xs[1]);
});
