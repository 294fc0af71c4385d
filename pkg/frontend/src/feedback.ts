/**
 * Feedback draft: freehand regions drawn over the active mask, each with
 * an add/remove action, posted to the service in its documented schema.
 * Lasso strokes are simplified client-side before submission.
 */
import type { FeedbackRecord, FeedbackRegion } from "./api.js";

export type RegionAction = "add" | "remove";

export const REGION_COLORS: Record<RegionAction, string> = {
  add: "#2ecc40",
  remove: "#ff4136",
};

/** Ramer-Douglas-Peucker polyline simplification (closed path kept). */
export function simplifyPolygon(points: [number, number][], epsilon = 2.0): [number, number][] {
  if (points.length <= 3) return points.slice();

  const keep = new Array<boolean>(points.length).fill(false);
  keep[0] = keep[points.length - 1] = true;

  const stack: [number, number][] = [[0, points.length - 1]];
  while (stack.length) {
    const [lo, hi] = stack.pop()!;
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
  private regions: { points: [number, number][]; action: RegionAction }[] = [];
  private stroke: [number, number][] | null = null;
  private strokeAction: RegionAction = "add";

  get regionCount(): number {
    return this.regions.length;
  }

  /** The send button stays disabled until at least one region exists. */
  get submittable(): boolean {
    return this.regions.length >= 1;
  }

  get completedRegions(): readonly { points: [number, number][]; action: RegionAction }[] {
    return this.regions;
  }

  beginStroke(action: RegionAction): void {
    this.stroke = [];
    this.strokeAction = action;
  }

  extendStroke(x: number, y: number): void {
    this.stroke?.push([x, y]);
  }

  /** Close the lasso; strokes too small to make a polygon are dropped. */
  endStroke(epsilon = 2.0): boolean {
    if (!this.stroke) return false;
    const simplified = simplifyPolygon(this.stroke, epsilon);
    this.stroke = null;
    if (simplified.length < 3) return false;
    this.regions.push({ points: simplified, action: this.strokeAction });
    return true;
  }

  removeRegion(index: number): void {
    this.regions.splice(index, 1);
  }

  clear(): void {
    this.regions = [];
    this.stroke = null;
  }

  /** Documented wire schema for POST /feedback. */
  payload(imageId: string, maskClass: string, imageSize: [number, number]): FeedbackRecord {
    const regions: FeedbackRegion[] = this.regions.map((r) => ({
      points: r.points.map(([x, y]) => [x, y] as [number, number]),
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
