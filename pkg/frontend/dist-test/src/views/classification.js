/**
 * Decision-support page: upload an image, browse the analysis masks as
 * translucent overlays (hover, tap, or swipe to switch; slider for
 * opacity), read the confidence panel and the blue ABCD score bars,
 * trigger a saliency explanation, and mark feedback regions.
 */
import { ApiError } from "../api.js";
import { blendImageData } from "../compositing.js";
import { blobToImage, clear, el, inlineError, toast, urlToImage } from "../dom.js";
import { FeedbackDraft, REGION_COLORS } from "../feedback.js";
import { OverlayStore } from "../state.js";
import { ClassificationViewModel, formatPct } from "../viewmodels.js";
const FEATURE_CLASSES = [
    "globules",
    "streaks",
    "pigment_network",
    "milia_like_cyst",
    "negative_network",
];
const LAYER_TITLES = {
    original: "Original",
    segmentation: "Segmentation",
    globules: "Globules",
    streaks: "Streaks",
    pigment_network: "Pigment network",
    milia_like_cyst: "Milia-like cyst",
    negative_network: "Negative network",
    "abcd-colors": "Colours",
    asymmetry: "Asymmetry",
    "rise-heatmap": "Saliency",
};
const FEEDBACK_LAYERS = ["segmentation", ...FEATURE_CLASSES];
export class ClassificationView {
    constructor(api) {
        this.api = api;
        this.store = new OverlayStore();
        this.draft = new FeedbackDraft();
        this.analysis = null;
        this.drawing = false;
        this.drawAction = "add";
        this.feedbackMode = false;
        this.swipeStartX = null;
        this.root = el("section", { class: "page page-classify" });
        this.build();
        this.store.subscribe(() => this.renderViewer());
    }
    build() {
        const fileInput = el("input", { type: "file", accept: "image/png,image/jpeg" });
        fileInput.addEventListener("change", () => {
            const file = fileInput.files?.[0];
            if (file)
                void this.analyze(file);
        });
        this.statusLine = el("div", { class: "status" }, "Upload a dermoscopy image to analyze.");
        this.opacitySlider = el("input", {
            type: "range",
            min: "0",
            max: "100",
            value: "80",
            class: "opacity-slider",
        });
        this.opacitySlider.addEventListener("input", () => {
            this.store.setOpacity(Number(this.opacitySlider.value) / 100);
        });
        this.viewer = el("canvas", { class: "viewer-canvas" });
        this.frame = el("div", { class: "viewer-frame" }, this.viewer);
        this.attachViewerGestures();
        this.thumbRowDl = el("div", { class: "thumb-row" });
        this.thumbRowAbcd = el("div", { class: "thumb-row" });
        this.confidencePanel = el("div", { class: "panel confidence-panel" });
        this.barsPanel = el("div", { class: "panel bars-panel" });
        this.explainPanel = el("div", { class: "panel explain-panel" });
        this.feedbackPanel = el("div", { class: "panel feedback-panel" });
        this.root.append(el("div", { class: "upload-bar" }, fileInput, this.statusLine), el("div", { class: "layout" }, el("div", { class: "side" }, this.confidencePanel, this.barsPanel, this.explainPanel, this.feedbackPanel), el("div", { class: "main" }, el("div", { class: "row-label" }, "Structure masks"), this.thumbRowDl, el("div", { class: "row-label" }, "ABCD features"), this.thumbRowAbcd, el("div", { class: "viewer-controls" }, el("span", {}, "Opacity"), this.opacitySlider), this.frame)));
    }
    async analyze(file) {
        this.statusLine.textContent = `Analyzing ${file.name} …`;
        this.store.reset();
        this.draft.clear();
        try {
            const [confidence, abcd, segBlob] = await Promise.all([
                this.api.classifyConfidence(file, file.name, "binary"),
                this.api.featuresAbcd(file, file.name),
                this.api.segment(file, file.name),
            ]);
            const original = await blobToImage(file);
            const layers = new Map();
            layers.set("original", original);
            layers.set("segmentation", await blobToImage(segBlob));
            layers.set("abcd-colors", await urlToImage(abcd.overlays.colors));
            layers.set("asymmetry", await urlToImage(abcd.overlays.asymmetry));
            this.analysis = {
                file,
                filename: file.name,
                imageId: abcd.image_id,
                width: original.naturalWidth,
                height: original.naturalHeight,
                layers,
                confidence,
                abcd,
            };
            for (const id of ["segmentation", "abcd-colors", "asymmetry"]) {
                this.store.enableLayer(id);
            }
            this.statusLine.textContent = `${file.name}: analysis ready.`;
            this.renderPanels();
            this.renderThumbs();
            this.renderViewer();
            void this.loadFeatureMasks(file);
        }
        catch (err) {
            this.statusLine.textContent =
                err instanceof ApiError ? `Analysis failed: ${err.message}` : `Analysis failed: ${err}`;
        }
    }
    /** The five structure masks load lazily; failures disable their layer only. */
    async loadFeatureMasks(file) {
        const analysis = this.analysis;
        if (!analysis)
            return;
        await Promise.all(FEATURE_CLASSES.map(async (cls) => {
            try {
                const blob = await this.api.extractFeature(file, analysis.filename, cls);
                analysis.layers.set(cls, await blobToImage(blob));
                this.store.enableLayer(cls);
            }
            catch {
                /* endpoint unavailable: the layer simply never appears */
            }
            this.renderThumbs();
        }));
    }
    // ---- rendering -----------------------------------------------------
    renderPanels() {
        if (!this.analysis)
            return;
        const vm = new ClassificationViewModel(this.analysis.confidence, this.analysis.abcd);
        clear(this.confidencePanel);
        this.frame.style.borderColor = vm.borderColor();
        const rows = vm.confidenceRows();
        this.confidencePanel.append(el("h3", {}, "Classification"), ...(rows.length === 0
            ? [el("p", { class: "muted" }, "No class rises above uniform probability.")]
            : rows.map((row) => el("div", { class: "confidence-row" }, el("span", { class: "label" }, row.label), el("span", { class: "value", "data-role": "confidence" }, `${formatPct(row.confidencePct)} (p=${row.p.toFixed(3)})`)))));
        clear(this.barsPanel);
        this.barsPanel.append(el("h3", {}, "ABCD scores"));
        for (const bar of vm.scoreBars()) {
            const fill = el("div", { class: "bar-fill" });
            fill.style.width = `${bar.widthPct}%`;
            this.barsPanel.append(el("div", { class: "score-bar" }, el("span", { class: "bar-label" }, bar.label), el("div", { class: "bar-track" }, fill), el("span", { class: "bar-value", "data-role": "score" }, bar.value.toFixed(2))));
        }
        this.barsPanel.append(el("p", { class: "muted" }, `Colours: ${vm.colorsPresent().join(", ") || "none detected"}`));
        this.renderExplainPanel();
        this.renderFeedbackPanel();
    }
    renderThumbs() {
        if (!this.analysis)
            return;
        clear(this.thumbRowDl);
        clear(this.thumbRowAbcd);
        const dlLayers = ["original", "segmentation", ...FEATURE_CLASSES];
        const abcdLayers = ["abcd-colors", "asymmetry", "rise-heatmap"];
        for (const [host, ids] of [
            [this.thumbRowDl, dlLayers],
            [this.thumbRowAbcd, abcdLayers],
        ]) {
            for (const id of ids) {
                const img = this.analysis.layers.get(id);
                if (!img)
                    continue;
                const thumb = el("figure", { class: "thumb", "data-layer": id });
                const small = el("canvas", { width: "96", height: "72" });
                const ctx = small.getContext("2d");
                ctx.drawImage(img, 0, 0, 96, 72);
                thumb.append(small, el("figcaption", {}, LAYER_TITLES[id]));
                // hover (pointer) and tap (touch) drive the same transition
                thumb.addEventListener("mouseover", () => this.store.selectLayer(id));
                thumb.addEventListener("click", () => this.store.selectLayer(id));
                host.append(thumb);
            }
        }
    }
    renderViewer() {
        const analysis = this.analysis;
        if (!analysis)
            return;
        const { activeLayer, opacity } = this.store.selection;
        this.opacitySlider.value = String(Math.round(opacity * 100));
        const base = analysis.layers.get("original");
        const { width, height } = analysis;
        this.viewer.width = width;
        this.viewer.height = height;
        const ctx = this.viewer.getContext("2d");
        ctx.drawImage(base, 0, 0, width, height);
        if (activeLayer !== "original") {
            const overlayImg = analysis.layers.get(activeLayer);
            if (overlayImg) {
                const baseData = ctx.getImageData(0, 0, width, height);
                const scratch = el("canvas");
                scratch.width = width;
                scratch.height = height;
                const sctx = scratch.getContext("2d");
                sctx.drawImage(overlayImg, 0, 0, width, height);
                const overlayData = sctx.getImageData(0, 0, width, height);
                blendImageData(baseData.data, overlayData.data, opacity, baseData.data);
                ctx.putImageData(baseData, 0, 0);
            }
        }
        this.drawDraftRegions(ctx);
        for (const marker of this.thumbRowDl.querySelectorAll(".thumb")) {
            marker.classList.toggle("active", marker.getAttribute("data-layer") === activeLayer);
        }
        for (const marker of this.thumbRowAbcd.querySelectorAll(".thumb")) {
            marker.classList.toggle("active", marker.getAttribute("data-layer") === activeLayer);
        }
        this.renderFeedbackPanel();
    }
    drawDraftRegions(ctx) {
        for (const region of this.draft.completedRegions) {
            ctx.strokeStyle = REGION_COLORS[region.action];
            ctx.lineWidth = 2;
            ctx.beginPath();
            region.points.forEach(([x, y], i) => (i ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
            ctx.closePath();
            ctx.stroke();
        }
    }
    // ---- gestures --------------------------------------------------------
    canvasPoint(event) {
        const rect = this.viewer.getBoundingClientRect();
        const x = ((event.clientX - rect.left) / rect.width) * this.viewer.width;
        const y = ((event.clientY - rect.top) / rect.height) * this.viewer.height;
        return [Math.round(x), Math.round(y)];
    }
    attachViewerGestures() {
        this.viewer.addEventListener("pointerdown", (event) => {
            if (this.feedbackMode) {
                this.drawing = true;
                this.draft.beginStroke(this.drawAction);
                const [x, y] = this.canvasPoint(event);
                this.draft.extendStroke(x, y);
                this.viewer.setPointerCapture(event.pointerId);
            }
            else {
                this.swipeStartX = event.clientX;
            }
        });
        this.viewer.addEventListener("pointermove", (event) => {
            if (this.drawing) {
                const [x, y] = this.canvasPoint(event);
                this.draft.extendStroke(x, y);
                this.renderViewer();
            }
        });
        this.viewer.addEventListener("pointerup", (event) => {
            if (this.drawing) {
                this.drawing = false;
                this.draft.endStroke();
                this.renderViewer();
            }
            else if (this.swipeStartX !== null) {
                const delta = event.clientX - this.swipeStartX;
                this.swipeStartX = null;
                // swipe and hover both end in the store's transitions
                if (Math.abs(delta) > 40)
                    this.store.cycleLayer(delta < 0 ? 1 : -1);
            }
        });
    }
    // ---- explain ---------------------------------------------------------
    renderExplainPanel() {
        clear(this.explainPanel);
        if (!this.analysis)
            return;
        const runButton = el("button", {}, "Explain (random masks)");
        const details = el("details", {}, el("summary", {}, "More details"));
        const nMasks = el("input", { type: "number", value: "100", min: "1" });
        const grid = el("input", { type: "number", value: "7", min: "2" });
        const seed = el("input", { type: "number", value: "42" });
        const fields = el("div", { class: "explain-fields" }, el("label", {}, "Masks ", nMasks), el("label", {}, "Grid ", grid), el("label", {}, "Seed ", seed));
        details.append(fields);
        const run = async () => {
            if (!this.analysis)
                return;
            runButton.setAttribute("disabled", "true");
            runButton.textContent = "Explaining…";
            try {
                const payload = await this.api.explainRise(this.analysis.file, this.analysis.filename, {
                    n_masks: Number(nMasks.value),
                    grid_cells: Number(grid.value),
                    seed: Number(seed.value),
                });
                this.analysis.layers.set("rise-heatmap", await urlToImage(payload.images.heatmap));
                this.store.enableLayer("rise-heatmap");
                this.store.selectLayer("rise-heatmap");
                this.renderThumbs();
                toast(`Saliency ready (${payload.params.n_masks} masks)`);
            }
            catch (err) {
                if (err instanceof ApiError)
                    inlineError(fields, err.message);
                else
                    inlineError(fields, String(err));
            }
            finally {
                runButton.removeAttribute("disabled");
                runButton.textContent = "Explain (random masks)";
            }
        };
        runButton.addEventListener("click", () => void run());
        this.explainPanel.append(el("h3", {}, "Explanation"), runButton, details);
    }
    // ---- feedback ---------------------------------------------------------
    renderFeedbackPanel() {
        if (!this.analysis)
            return;
        const active = this.store.selection.activeLayer;
        const eligible = FEEDBACK_LAYERS.includes(active);
        clear(this.feedbackPanel);
        this.feedbackPanel.append(el("h3", {}, "Feedback"));
        if (!eligible) {
            this.feedbackMode = false;
            this.feedbackPanel.append(el("p", { class: "muted" }, "Select a mask layer to mark corrections."));
            return;
        }
        const modeToggle = el("button", {}, this.feedbackMode ? "Stop drawing" : "Draw regions");
        modeToggle.addEventListener("click", () => {
            this.feedbackMode = !this.feedbackMode;
            this.renderFeedbackPanel();
        });
        const addBtn = el("button", { class: this.drawAction === "add" ? "action active-add" : "action" }, "Add");
        const removeBtn = el("button", { class: this.drawAction === "remove" ? "action active-remove" : "action" }, "Remove");
        addBtn.addEventListener("click", () => {
            this.drawAction = "add";
            this.renderFeedbackPanel();
        });
        removeBtn.addEventListener("click", () => {
            this.drawAction = "remove";
            this.renderFeedbackPanel();
        });
        const send = el("button", { class: "send" }, `Send (${this.draft.regionCount})`);
        if (!this.draft.submittable)
            send.setAttribute("disabled", "true");
        send.addEventListener("click", () => void this.sendFeedback(active));
        const clearBtn = el("button", {}, "Clear");
        clearBtn.addEventListener("click", () => {
            this.draft.clear();
            this.renderViewer();
        });
        this.feedbackPanel.append(el("div", { class: "feedback-controls" }, modeToggle, addBtn, removeBtn, clearBtn, send));
    }
    async sendFeedback(layer) {
        const analysis = this.analysis;
        if (!analysis || !this.draft.submittable)
            return;
        const record = this.draft.payload(analysis.imageId, layer, [analysis.width, analysis.height]);
        try {
            const { record_id } = await this.api.postFeedback(record);
            toast(`Feedback stored: ${record_id}`);
            this.draft.clear();
            this.feedbackMode = false;
            this.renderViewer();
        }
        catch (err) {
            if (err instanceof ApiError)
                inlineError(this.feedbackPanel, err.message);
            else
                inlineError(this.feedbackPanel, String(err));
        }
    }
}
