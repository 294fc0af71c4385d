/**
 * Typed client over the analysis service. Every number shown in the UI
 * comes back from these calls verbatim; nothing is recomputed locally.
 */

export interface ConfidenceEntry {
  label: string;
  p: number;
  confidence_pct: number;
}

export interface ConfidencePayload {
  taxonomy: string;
  labels: string[];
  prediction: number[];
  confidence: ConfidenceEntry[];
  malignancy_color?: string;
  filename?: string;
  model?: string;
}

export interface DisplayScores {
  A1: number;
  A2: number;
  B: number;
  D1: number;
  D2: number;
}

export interface ColorRegion {
  color: string;
  area_px: number;
  centroid: [number, number];
  distance_px: number;
}

export interface AbcdPayload {
  image_id: string;
  mm_per_pixel: number;
  mm_per_pixel_source: string;
  features: {
    asym_vertical_pct: number;
    asym_horizontal_pct: number;
    centroid_distances_px: Record<string, number>;
    irregularity_index: number;
    diameter_h_mm: number;
    diameter_v_mm: number;
    colors_present: string[];
    color_regions: ColorRegion[];
    rect_major_px: number;
    rect_minor_px: number;
    tilt_angle_deg: number;
  };
  display_scores: DisplayScores;
  segmentation: { iterations: number; converged: boolean };
  overlays: Record<string, string>;
}

export interface BinaryPrediction {
  filename: string;
  prediction: [number, number];
}

export interface RiseRequest {
  n_masks?: number;
  grid_cells?: number;
  p_on?: number;
  seed?: number;
  target_class?: number;
  opacity?: number;
}

export interface RisePayload {
  image_id: string;
  params: Required<Omit<RiseRequest, "target_class">> & { target_class: number };
  images: { saliency: string; heatmap: string };
}

export interface ThresholdRow {
  threshold: number;
  tp: number;
  fp: number;
  tn: number;
  fn: number;
  precision: number;
  recall: number;
  specificity: number;
  accuracy: number;
  f1: number;
  fpr: number;
  tpr: number;
  undefined: string[];
}

export interface EvalItem {
  item_id: string;
  truth: "benign" | "malignant";
  score: number;
}

export interface EvalReport {
  items: EvalItem[];
  per_threshold: ThresholdRow[];
  roc_points: [number, number][];
  pr_points: [number, number][];
  roc_auc: number;
  failures: { item_id: string; error: string }[];
}

export interface EvalJobRef {
  job_id: string;
  status: string;
  poll: string;
}

export interface EvalJobStatus {
  status: "running" | "done" | "failed";
  report?: EvalReport;
  error?: string;
}

export interface FeedbackRegion {
  points: [number, number][];
  action: "add" | "remove";
}

export interface FeedbackRecord {
  image_id: string;
  mask_class: string;
  image_size: [number, number];
  regions: FeedbackRegion[];
  client_timestamp: string;
}

export interface ModelInfo {
  binary_classification_model: string;
  [key: string]: unknown;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let message = `HTTP ${resp.status}`;
  try {
    const doc = await resp.json();
    if (doc && typeof doc.error === "string") message = doc.error;
  } catch {
    /* non-JSON error body; keep the status line */
  }
  return new ApiError(resp.status, message);
}

async function asJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) throw await parseError(resp);
  return (await resp.json()) as T;
}

async function asBlob(resp: Response): Promise<Blob> {
  if (!resp.ok) throw await parseError(resp);
  return await resp.blob();
}

function fileForm(file: Blob, filename: string, extra?: Record<string, string>): FormData {
  const form = new FormData();
  form.append("file", file, filename);
  for (const [key, value] of Object.entries(extra ?? {})) form.append(key, value);
  return form;
}

export class ApiClient {
  constructor(readonly base: string = "") {}

  private url(path: string): string {
    return this.base + path;
  }

  async modelInfo(): Promise<ModelInfo> {
    return asJson(await fetch(this.url("/model_info")));
  }

  async classifyBinary(file: Blob, filename: string): Promise<BinaryPrediction> {
    return asJson(
      await fetch(this.url("/classify/binary"), { method: "POST", body: fileForm(file, filename) })
    );
  }

  async classifyConfidence(
    file: Blob,
    filename: string,
    taxonomy: "binary" | "multi8"
  ): Promise<ConfidencePayload> {
    return asJson(
      await fetch(this.url("/classify/confidence"), {
        method: "POST",
        body: fileForm(file, filename, { taxonomy }),
      })
    );
  }

  async featuresAbcd(file: Blob, filename: string, mmPerPixel?: number): Promise<AbcdPayload> {
    const extra = mmPerPixel !== undefined ? { mm_per_pixel: String(mmPerPixel) } : undefined;
    return asJson(
      await fetch(this.url("/features/abcd"), {
        method: "POST",
        body: fileForm(file, filename, extra),
      })
    );
  }

  async segment(file: Blob, filename: string): Promise<Blob> {
    return asBlob(
      await fetch(this.url("/segment"), { method: "POST", body: fileForm(file, filename) })
    );
  }

  async extractFeature(file: Blob, filename: string, featureClass: string): Promise<Blob> {
    return asBlob(
      await fetch(this.url(`/extract_feature/${featureClass}`), {
        method: "POST",
        body: fileForm(file, filename),
      })
    );
  }

  async explainRise(file: Blob, filename: string, params: RiseRequest): Promise<RisePayload> {
    const extra: Record<string, string> = {};
    for (const [key, value] of Object.entries(params)) {
      if (value !== undefined) extra[key] = String(value);
    }
    return asJson(
      await fetch(this.url("/explain/rise"), {
        method: "POST",
        body: fileForm(file, filename, extra),
      })
    );
  }

  async evaluate(benignZip: Blob, malignantZip: Blob): Promise<EvalReport | EvalJobRef> {
    const form = new FormData();
    form.append("benign", benignZip, "benign.zip");
    form.append("malignant", malignantZip, "malignant.zip");
    return asJson(await fetch(this.url("/evaluate"), { method: "POST", body: form }));
  }

  async evalJob(jobId: string): Promise<EvalJobStatus> {
    return asJson(await fetch(this.url(`/evaluate/jobs/${jobId}`)));
  }

  async postFeedback(record: FeedbackRecord): Promise<{ record_id: string }> {
    return asJson(
      await fetch(this.url("/feedback"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(record),
      })
    );
  }
}

export function isJobRef(result: EvalReport | EvalJobRef): result is EvalJobRef {
  return (result as EvalJobRef).job_id !== undefined;
}
