/**
 * Evaluation dashboard: upload a benign set and a malignant set, let the
 * server classify and sweep thresholds, then chart its report (metric
 * lines, ROC, precision/recall) and the per-image result columns. All
 * numbers shown come from the report payload.
 */
import { ApiClient, ApiError, isJobRef, type EvalReport } from "../api.js";
import { axesSvg, DEFAULT_GEOM, diagonalPath, prPath, rocPath, seriesPath } from "../charts.js";
import { clear, el } from "../dom.js";
import { EvaluationViewModel } from "../viewmodels.js";
import { buildZip } from "../zip.js";

const METRICS = ["precision", "recall", "specificity", "accuracy", "f1", "fpr", "tpr"] as const;
const METRIC_COLORS: Record<(typeof METRICS)[number], string> = {
  precision: "#1f77b4",
  recall: "#ff7f0e",
  specificity: "#2ca02c",
  accuracy: "#d62728",
  f1: "#9467bd",
  fpr: "#8c564b",
  tpr: "#e377c2",
};

async function filesToZip(files: FileList): Promise<Blob> {
  const entries = [];
  for (const file of Array.from(files)) {
    entries.push({ name: file.name, data: new Uint8Array(await file.arrayBuffer()) });
  }
  return new Blob([buildZip(entries)], { type: "application/zip" });
}

export class EvaluationView {
  readonly root: HTMLElement;
  private benignInput!: HTMLInputElement;
  private malignantInput!: HTMLInputElement;
  private status!: HTMLElement;
  private results!: HTMLElement;

  constructor(private readonly api: ApiClient) {
    this.root = el("section", { class: "page page-evaluate" });
    this.build();
  }

  private build(): void {
    this.benignInput = el("input", { type: "file", multiple: "true", accept: "image/*" });
    this.malignantInput = el("input", { type: "file", multiple: "true", accept: "image/*" });
    const run = el("button", { class: "send" }, "Classify and evaluate");
    run.addEventListener("click", () => void this.run());
    this.status = el("div", { class: "status" }, "Upload two labeled image sets.");
    this.results = el("div", { class: "eval-results" });
    this.root.append(
      el(
        "div",
        { class: "eval-uploads" },
        el("label", { class: "upload-slot" }, "Benign set ", this.benignInput),
        el("label", { class: "upload-slot" }, "Malignant set ", this.malignantInput),
        run
      ),
      this.status,
      this.results
    );
  }

  private async run(): Promise<void> {
    const benign = this.benignInput.files;
    const malignant = this.malignantInput.files;
    if (!benign?.length || !malignant?.length) {
      this.status.textContent = "Both sets need at least one image.";
      return;
    }
    this.status.textContent = `Evaluating ${benign.length} benign + ${malignant.length} malignant images…`;
    clear(this.results);
    try {
      const result = await this.api.evaluate(
        await filesToZip(benign),
        await filesToZip(malignant)
      );
      if (isJobRef(result)) {
        await this.poll(result.job_id);
      } else {
        this.render(result);
      }
    } catch (err) {
      this.status.textContent =
        err instanceof ApiError ? `Evaluation failed: ${err.message}` : `Evaluation failed: ${err}`;
    }
  }

  private async poll(jobId: string): Promise<void> {
    this.status.textContent = `Evaluation running (job ${jobId})…`;
    for (;;) {
      const job = await this.api.evalJob(jobId);
      if (job.status === "done" && job.report) {
        this.render(job.report);
        return;
      }
      if (job.status === "failed") {
        this.status.textContent = `Evaluation failed: ${job.error}`;
        return;
      }
      await new Promise((resolve) => setTimeout(resolve, 750));
    }
  }

  private render(report: EvalReport): void {
    const vm = new EvaluationViewModel(report);
    this.status.textContent = "";
    clear(this.results);

    const geom = DEFAULT_GEOM;
    const rocSvg = el("div", { class: "chart" });
    rocSvg.innerHTML =
      `<h3>ROC (AUC ${vm.aucLabel()})</h3>` +
      `<svg viewBox="0 0 ${geom.width} ${geom.height}">` +
      axesSvg(geom, "FPR", "TPR") +
      `<path d="${diagonalPath(geom)}" stroke="#ccc" fill="none" stroke-dasharray="4 3"/>` +
      `<path d="${rocPath(vm.rocPoints(), geom)}" stroke="#1f77b4" fill="none" stroke-width="2"/>` +
      `</svg>`;

    const prSvg = el("div", { class: "chart" });
    prSvg.innerHTML =
      "<h3>Precision vs recall</h3>" +
      `<svg viewBox="0 0 ${geom.width} ${geom.height}">` +
      axesSvg(geom, "Recall", "Precision") +
      `<path d="${prPath(vm.prPoints(), geom)}" stroke="#ff7f0e" fill="none" stroke-width="2"/>` +
      `</svg>`;

    const lineSvg = el("div", { class: "chart chart-wide" });
    const legend = METRICS.map(
      (m) => `<span class="legend-item" style="color:${METRIC_COLORS[m]}">${m}</span>`
    ).join(" ");
    lineSvg.innerHTML =
      `<h3>Metrics by threshold</h3><div class="legend">${legend}</div>` +
      `<svg viewBox="0 0 ${geom.width} ${geom.height}">` +
      axesSvg(geom, "Threshold", "Value") +
      METRICS.map(
        (m) =>
          `<path d="${seriesPath(vm.thresholdSeries(m), geom)}" stroke="${METRIC_COLORS[m]}" fill="none"/>`
      ).join("") +
      `</svg>`;

    // threshold readout: slider selects a served row, values shown verbatim
    const slider = el("input", { type: "range", min: "0", max: "100", value: "50" });
    const readout = el("div", { class: "threshold-readout" });
    const updateReadout = () => {
      const row = vm.rowAt(Number(slider.value) / 100);
      clear(readout);
      readout.append(
        el("strong", {}, `t = ${row.threshold.toFixed(2)}: `),
        el(
          "span",
          { "data-role": "readout" },
          `TP ${row.tp}, FP ${row.fp}, TN ${row.tn}, FN ${row.fn} | ` +
            `precision ${row.precision.toFixed(3)}, recall ${row.recall.toFixed(3)}, ` +
            `specificity ${row.specificity.toFixed(3)}, accuracy ${row.accuracy.toFixed(3)}, ` +
            `F1 ${row.f1.toFixed(3)}, FPR ${row.fpr.toFixed(3)}, TPR ${row.tpr.toFixed(3)}`
        )
      );
    };
    slider.addEventListener("input", updateReadout);
    updateReadout();

    // per-image columns: grouping follows the upload labels, scores served
    const benignCol = el("div", { class: "item-col" }, el("h4", {}, "Benign set"));
    const malignantCol = el("div", { class: "item-col" }, el("h4", {}, "Malignant set"));
    for (const item of report.items) {
      const node = el(
        "div",
        { class: "item-row" },
        el("span", { class: "item-id" }, item.item_id.split("/").pop() ?? item.item_id),
        el("span", { class: "item-score" }, item.score.toFixed(3))
      );
      (item.truth === "benign" ? benignCol : malignantCol).append(node);
    }
    const failures = vm.failures();
    const failureList = el("div", { class: "failures" });
    if (failures.length) {
      failureList.append(el("h4", {}, `Failed items (${failures.length})`));
      for (const f of failures) {
        failureList.append(el("div", { class: "failure" }, `${f.item_id}: ${f.error}`));
      }
    }

    this.results.append(
      el("div", { class: "charts" }, rocSvg, prSvg, lineSvg),
      el("div", { class: "panel" }, slider, readout),
      el("div", { class: "item-grid" }, benignCol, malignantCol),
      failureList
    );
  }
}

// re-exported for the evaluation tests
export interface EvalReportItems {
  items: { item_id: string; truth: string; score: number }[];
}
