/**
 * Client-side overlay blending, kept in lockstep with the server's
 * renderer: out = round((1 - opacity) * base + opacity * overlay) per
 * 8-bit channel. The browser composites overlays locally only so the
 * slider responds instantly; the math must match the server to within
 * one 8-bit step.
 */
export function blendChannel(base, overlay, opacity) {
    return Math.round((1 - opacity) * base + opacity * overlay);
}
/**
 * Blend two RGBA pixel buffers (as from canvas ImageData). Alpha is
 * forced opaque; the server-side masks and heatmaps carry no alpha.
 */
export function blendImageData(base, overlay, opacity, out) {
    if (base.length !== overlay.length) {
        throw new Error(`buffer length mismatch: ${base.length} vs ${overlay.length}`);
    }
    const result = out ?? new Uint8ClampedArray(base.length);
    for (let i = 0; i < base.length; i += 4) {
        result[i] = blendChannel(base[i], overlay[i], opacity);
        result[i + 1] = blendChannel(base[i + 1], overlay[i + 1], opacity);
        result[i + 2] = blendChannel(base[i + 2], overlay[i + 2], opacity);
        result[i + 3] = 255;
    }
    return result;
}
