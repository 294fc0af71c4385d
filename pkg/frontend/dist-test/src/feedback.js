export const REGION_COLORS = {
    add: "#2ecc40",
    remove: "#ff4136",
};
/** Ramer-Douglas-Peucker polyline simplification (closed path kept). */
export function simplifyPolygon(points, epsilon = 2.0) {
    if (points.length <= 3)
        return points.slice();
    const keep = new Array(points.length).fill(false);
    keep[0] = keep[points.length - 1] = true;
    const stack = [[0, points.length - 1]];
    while (stack.length) {
        const [lo, hi] = stack.pop();
        const [ax, ay] = points[lo];
        const [bx, by] = points[hi];
        const dx = bx - ax;
        const dy = by - ay;
        const norm = Math.hypot(dx, dy) || 1e-12;
        let worst = -1;
        let worstDist = 0;
        for (let i = lo + 1; i < hi; i++) {
            const [px, py] = points[i];
            const dist = Math.abs(dy * px - dx * py + bx * ay - by * ax) / norm;
            if (dist > worstDist) {
                worstDist = dist;
                worst = i;
            }
        }
        if (worst !== -1 && worstDist > epsilon) {
            keep[worst] = true;
            stack.push([lo, worst], [worst, hi]);
        }
    }
    const out = points.filter((_, i) => keep[i]);
    return out.length >= 3 ? out : points.slice();
}
export class FeedbackDraft {
    constructor() {
        this.regions = [];
        this.stroke = null;
        this.strokeAction = "add";
    }
    get regionCount() {
        return this.regions.length;
    }
    /** The send button stays disabled until at least one region exists. */
    get submittable() {
        return this.regions.length >= 1;
    }
    get completedRegions() {
        return this.regions;
    }
    beginStroke(action) {
        this.stroke = [];
        this.strokeAction = action;
    }
    extendStroke(x, y) {
        this.stroke?.push([x, y]);
    }
    /** Close the lasso; strokes too small to make a polygon are dropped. */
    endStroke(epsilon = 2.0) {
        if (!this.stroke)
            return false;
        const simplified = simplifyPolygon(this.stroke, epsilon);
        this.stroke = null;
        if (simplified.length < 3)
            return false;
        this.regions.push({ points: simplified, action: this.strokeAction });
        return true;
    }
    removeRegion(index) {
        this.regions.splice(index, 1);
    }
    clear() {
        this.regions = [];
        this.stroke = null;
    }
    /** Documented wire schema for POST /feedback. */
    payload(imageId, maskClass, imageSize) {
        const regions = this.regions.map((r) => ({
            points: r.points.map(([x, y]) => [x, y]),
            action: r.action,
        }));
        return {
            image_id: imageId,
            mask_class: maskClass,
            image_size: imageSize,
            regions,
            client_timestamp: new Date().toISOString(),
        };
    }
}
