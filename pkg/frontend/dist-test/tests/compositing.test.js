import assert from "node:assert/strict";
import { test } from "node:test";
import { blendChannel, blendImageData } from "../src/compositing.js";
function serverBlend(base, overlay, opacity) {
    // reference formula used by the service renderer
    return Math.round((1 - opacity) * base + opacity * overlay);
}
test("blendChannel matches the server formula within 1/255 everywhere", () => {
    for (let base = 0; base <= 255; base += 5) {
        for (let overlay = 0; overlay <= 255; overlay += 5) {
            for (const opacity of [0, 0.1, 0.25, 0.5, 0.7, 0.8, 0.9, 1]) {
                const got = blendChannel(base, overlay, opacity);
                const want = serverBlend(base, overlay, opacity);
                assert.ok(Math.abs(got - want) <= 1, `${base},${overlay},${opacity}: ${got} vs ${want}`);
            }
        }
    }
});
test("opacity 0 is identity, opacity 1 is the overlay", () => {
    const base = new Uint8ClampedArray([10, 20, 30, 255, 200, 100, 50, 255]);
    const overlay = new Uint8ClampedArray([90, 80, 70, 255, 10, 20, 30, 255]);
    assert.deepEqual([...blendImageData(base, overlay, 0)], [...base]);
    assert.deepEqual([...blendImageData(base, overlay, 1)], [...overlay]);
});
test("buffer blend matches the per-channel formula on random data", () => {
    let seed = 123456789;
    const rand = () => {
        seed = (1103515245 * seed + 12345) % 2147483648;
        return seed / 2147483648;
    };
    const n = 64 * 4;
    const base = new Uint8ClampedArray(n);
    const overlay = new Uint8ClampedArray(n);
    for (let i = 0; i < n; i++) {
        base[i] = Math.floor(rand() * 256);
        overlay[i] = Math.floor(rand() * 256);
    }
    const opacity = 0.73;
    const out = blendImageData(base, overlay, opacity);
    for (let i = 0; i < n; i += 4) {
        for (let c = 0; c < 3; c++) {
            const want = serverBlend(base[i + c], overlay[i + c], opacity);
            assert.ok(Math.abs(out[i + c] - want) <= 1);
        }
        assert.equal(out[i + 3], 255);
    }
});
test("mismatched buffers are rejected", () => {
    assert.throws(() => blendImageData(new Uint8ClampedArray(8), new Uint8ClampedArray(4), 0.5));
});
