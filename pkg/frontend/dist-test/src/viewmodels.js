export function formatPct(value, digits = 1) {
    return `${value.toFixed(digits)}%`;
}
export class ClassificationViewModel {
    constructor(confidence, abcd) {
        this.confidence = confidence;
        this.abcd = abcd;
    }
    /** Blue A1/A2/B/D1/D2 bars; widths are display scaling only. */
    scoreBars() {
        const scores = this.abcd.display_scores;
        return ["A1", "A2", "B", "D1", "D2"].map((label) => ({
            label,
            value: scores[label],
            widthPct: scores[label] * 10,
        }));
    }
    /** Confidence rows exactly as served, best first (server ordering). */
    confidenceRows() {
        return this.confidence.confidence.map((entry) => ({
            label: entry.label,
            p: entry.p,
            confidencePct: entry.confidence_pct,
        }));
    }
    /** Frame color encoding malignancy probability, chosen by the server. */
    borderColor() {
        return this.confidence.malignancy_color ?? "#888888";
    }
    colorsPresent() {
        return this.abcd.features.colors_present;
    }
    centroidDistances() {
        return Object.entries(this.abcd.features.centroid_distances_px);
    }
}
export class EvaluationViewModel {
    constructor(report) {
        this.report = report;
    }
    /** Row lookup by threshold; nearest row wins (no interpolation). */
    rowAt(threshold) {
        let best = this.report.per_threshold[0];
        for (const row of this.report.per_threshold) {
            if (Math.abs(row.threshold - threshold) < Math.abs(best.threshold - threshold)) {
                best = row;
            }
        }
        return best;
    }
    aucLabel() {
        return this.report.roc_auc.toFixed(2);
    }
    rocPoints() {
        return this.report.roc_points;
    }
    prPoints() {
        return this.report.pr_points;
    }
    /** (threshold, metric) pairs straight out of the report rows. */
    thresholdSeries(metric) {
        return this.report.per_threshold.map((row) => [row.threshold, row[metric]]);
    }
    failures() {
        return this.report.failures;
    }
}
