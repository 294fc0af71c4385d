/**
 * DOM-free presentation models. Everything displayed is a verbatim
 * pass-through (or pure formatting) of server payload fields; no metric,
 * score, or probability is derived client-side. The network-mock tests
 * pin that property by feeding inconsistent fixtures and asserting the
 * served values win.
 */
import type { AbcdPayload, ConfidencePayload, EvalReport, ThresholdRow } from "./api.js";

export interface ScoreBar {
  label: string;
  value: number; // server-provided, already in [0, 10]
  widthPct: number; // value mapped onto the bar track: value * 10
}

export function formatPct(value: number, digits = 1): string {
  return `${value.toFixed(digits)}%`;
}

export class ClassificationViewModel {
  constructor(
    readonly confidence: ConfidencePayload,
    readonly abcd: AbcdPayload
  ) {}

  /** Blue A1/A2/B/D1/D2 bars; widths are display scaling only. */
  scoreBars(): ScoreBar[] {
    const scores = this.abcd.display_scores;
    return (["A1", "A2", "B", "D1", "D2"] as const).map((label) => ({
      label,
      value: scores[label],
      widthPct: scores[label] * 10,
    }));
  }

  /** Confidence rows exactly as served, best first (server ordering). */
  confidenceRows(): { label: string; p: number; confidencePct: number }[] {
    return this.confidence.confidence.map((entry) => ({
      label: entry.label,
      p: entry.p,
      confidencePct: entry.confidence_pct,
    }));
  }

  /** Frame color encoding malignancy probability, chosen by the server. */
  borderColor(): string {
    return this.confidence.malignancy_color ?? "#888888";
  }

  colorsPresent(): string[] {
    return this.abcd.features.colors_present;
  }

  centroidDistances(): [string, number][] {
    return Object.entries(this.abcd.features.centroid_distances_px);
  }
}

export class EvaluationViewModel {
  constructor(readonly report: EvalReport) {}

  /** Row lookup by threshold; nearest row wins (no interpolation). */
  rowAt(threshold: number): ThresholdRow {
    let best = this.report.per_threshold[0];
    for (const row of this.report.per_threshold) {
      if (Math.abs(row.threshold - threshold) < Math.abs(best.threshold - threshold)) {
        best = row;
      }
    }
    return best;
  }

  aucLabel(): string {
    return this.report.roc_auc.toFixed(2);
  }

  rocPoints(): [number, number][] {
    return this.report.roc_points;
  }

  prPoints(): [number, number][] {
    return this.report.pr_points;
  }

  /** (threshold, metric) pairs straight out of the report rows. */
  thresholdSeries(
    metric: "precision" | "recall" | "specificity" | "accuracy" | "f1" | "fpr" | "tpr"
  ): [number, number][] {
    return this.report.per_threshold.map((row) => [row.threshold, row[metric]]);
  }

  failures(): { item_id: string; error: string }[] {
    return this.report.failures;
  }
}
