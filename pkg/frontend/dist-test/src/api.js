/**
 * Typed client over the analysis service. Every number shown in the UI
 * comes back from these calls verbatim; nothing is recomputed locally.
 */
export class ApiError extends Error {
    constructor(status, message) {
        super(message);
        this.status = status;
    }
}
async function parseError(resp) {
    let message = `HTTP ${resp.status}`;
    try {
        const doc = await resp.json();
        if (doc && typeof doc.error === "string")
            message = doc.error;
    }
    catch {
        /* non-JSON error body; keep the status line */
    }
    return new ApiError(resp.status, message);
}
async function asJson(resp) {
    if (!resp.ok)
        throw await parseError(resp);
    return (await resp.json());
}
async function asBlob(resp) {
    if (!resp.ok)
        throw await parseError(resp);
    return await resp.blob();
}
function fileForm(file, filename, extra) {
    const form = new FormData();
    form.append("file", file, filename);
    for (const [key, value] of Object.entries(extra ?? {}))
        form.append(key, value);
    return form;
}
export class ApiClient {
    constructor(base = "") {
        this.base = base;
    }
    url(path) {
        return this.base + path;
    }
    async modelInfo() {
        return asJson(await fetch(this.url("/model_info")));
    }
    async classifyBinary(file, filename) {
        return asJson(await fetch(this.url("/classify/binary"), { method: "POST", body: fileForm(file, filename) }));
    }
    async classifyConfidence(file, filename, taxonomy) {
        return asJson(await fetch(this.url("/classify/confidence"), {
            method: "POST",
            body: fileForm(file, filename, { taxonomy }),
        }));
    }
    async featuresAbcd(file, filename, mmPerPixel) {
        const extra = mmPerPixel !== undefined ? { mm_per_pixel: String(mmPerPixel) } : undefined;
        return asJson(await fetch(this.url("/features/abcd"), {
            method: "POST",
            body: fileForm(file, filename, extra),
        }));
    }
    async segment(file, filename) {
        return asBlob(await fetch(this.url("/segment"), { method: "POST", body: fileForm(file, filename) }));
    }
    async extractFeature(file, filename, featureClass) {
        return asBlob(await fetch(this.url(`/extract_feature/${featureClass}`), {
            method: "POST",
            body: fileForm(file, filename),
        }));
    }
    async explainRise(file, filename, params) {
        const extra = {};
        for (const [key, value] of Object.entries(params)) {
            if (value !== undefined)
                extra[key] = String(value);
        }
        return asJson(await fetch(this.url("/explain/rise"), {
            method: "POST",
            body: fileForm(file, filename, extra),
        }));
    }
    async evaluate(benignZip, malignantZip) {
        const form = new FormData();
        form.append("benign", benignZip, "benign.zip");
        form.append("malignant", malignantZip, "malignant.zip");
        return asJson(await fetch(this.url("/evaluate"), { method: "POST", body: form }));
    }
    async evalJob(jobId) {
        return asJson(await fetch(this.url(`/evaluate/jobs/${jobId}`)));
    }
    async postFeedback(record) {
        return asJson(await fetch(this.url("/feedback"), {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(record),
        }));
    }
}
export function isJobRef(result) {
    return result.job_id !== undefined;
}
