"""HTTP decision-support service.

Five core endpoints keep their documented wire contract exactly
(``/model_info``, ``/html/<file>``, ``/classify/binary``, ``/segment``,
``/extract_feature/<class>``); the extended endpoints
(``/features/abcd``, ``/classify/confidence``, ``/explain/rise``,
``/evaluate``, ``/feedback``) are additive. Every error body is JSON with
an ``error`` field; image responses are ``image/png``. Default port 5000.

Configuration is a JSON file mirroring :class:`ServiceConfig`; explicitly
configured paths must exist at startup or the service refuses to start.
"""
from __future__ import annotations

import hashlib
import io
import json
import mimetypes
import os
import tempfile
import threading
import time
import uuid
import zipfile
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import __version__, classify, evalharness, pipeline
from .abcd import (
    DEFAULT_MM_PER_PIXEL,
    extract_features,
    project_scores,
    render_asymmetry_axes,
    render_color_regions,
)
from .errors import (
    ConfigError,
    DegenerateSegmentationError,
    LesionKitError,
    ProviderUnavailableError,
    UnknownProviderError,
)
from .explain import RiseParams, rise, saliency_artifacts
from .imaging import RasterImage, blend_overlay, colorize, decode_image, encode_mask_png, encode_png
from .providers import FEATURE_CLASSES, FEATURE_MASK, build_default_registry
from .segmentation import CVParams, segment_image

FEEDBACK_MASK_CLASSES = FEATURE_CLASSES + ("segmentation",)

_EXTENSION_TYPES = {
    ".html": "text/html",
    ".htm": "text/html",
    ".js": "application/javascript",
    ".mjs": "application/javascript",
    ".css": "text/css",
    ".json": "application/json",
    ".png": "image/png",
    ".jpg": "image/jpeg",
    ".jpeg": "image/jpeg",
    ".svg": "image/svg+xml",
    ".ico": "image/x-icon",
    ".txt": "text/plain",
    ".map": "application/json",
    ".woff2": "font/woff2",
}


@dataclass
class ServiceConfig:
    port: int = 5000
    binary_model_path: str | None = None  # None: packaged baseline
    multi8_model_path: str | None = None
    static_root: str = "html"
    feedback_path: str = "feedback.jsonl"
    artifact_cache_dir: str | None = None  # None: per-process temp dir
    artifact_cache_mb: int = 128
    mm_per_pixel: float = DEFAULT_MM_PER_PIXEL
    cv: CVParams = field(default_factory=CVParams)
    rise_defaults: RiseParams = field(default_factory=lambda: RiseParams(n_masks=1000))
    rise_max_n_masks: int = 4000
    eval_sync_limit: int = 50
    feature_masks_available: bool = True
    providers: dict = field(default_factory=dict)  # kind -> pinned default id
    source_path: str | None = None  # file this config was loaded from

    @classmethod
    def from_file(cls, path) -> "ServiceConfig":
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        return cls.from_dict(doc, source_path=str(path))

    @classmethod
    def from_dict(cls, doc: dict, source_path=None) -> "ServiceConfig":
        cfg = cls(source_path=source_path)
        for key in (
            "port",
            "binary_model_path",
            "multi8_model_path",
            "static_root",
            "feedback_path",
            "artifact_cache_dir",
            "artifact_cache_mb",
            "mm_per_pixel",
            "rise_max_n_masks",
            "eval_sync_limit",
            "feature_masks_available",
            "providers",
        ):
            if key in doc:
                setattr(cfg, key, doc[key])
        if "cv" in doc:
            cfg.cv = CVParams(**doc["cv"])
        if "rise" in doc:
            cfg.rise_defaults = RiseParams(**doc["rise"])
        explicit = {k for k in ("static_root",) if k in doc}
        cfg.validate(strict_static=bool(explicit))
        return cfg

    def validate(self, strict_static=False):
        for label, path in (
            ("binary_model_path", self.binary_model_path),
            ("multi8_model_path", self.multi8_model_path),
        ):
            if path is not None and not Path(path).is_file():
                raise ConfigError(f"{label} does not exist: {path}")
        if strict_static and not Path(self.static_root).is_dir():
            raise ConfigError(f"static_root does not exist: {self.static_root}")


def _load_packaged_model(name) -> classify.LinearModel:
    text = resources.files("lesionkit.models").joinpath(name).read_text(encoding="utf-8")
    return classify.LinearModel.from_json(text)


def load_models(config: ServiceConfig):
    if config.binary_model_path:
        binary = classify.LinearModel.load(config.binary_model_path)
    else:
        binary = _load_packaged_model("binary_baseline.json")
    if config.multi8_model_path:
        multi8 = classify.LinearModel.load(config.multi8_model_path)
    else:
        multi8 = _load_packaged_model("multi8_baseline.json")
    return binary, multi8


class FeedbackStore:
    """Append-only JSONL record store; every append is flushed and
    fsynced before the id is returned, and existing lines never change."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._index = {}
        if self.path.exists():
            with open(self.path, "r", encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        rec = json.loads(line)
                        self._index[rec["record_id"]] = rec

    def append(self, record: dict) -> str:
        record_id = uuid.uuid4().hex[:12]
        rec = {"record_id": record_id, **record}
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._index[record_id] = rec
        return record_id

    def get(self, record_id):
        return self._index.get(record_id)


class ArtifactCache:
    """Content-addressed PNG store with an LRU megabyte cap, backing the
    overlay URLs handed out by the analysis endpoints."""

    def __init__(self, root, cap_mb):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.cap_bytes = int(cap_mb * 1024 * 1024)
        self._lock = threading.Lock()
        self._entries = {}  # (image_id, name) -> (size, last_used)

    def put(self, image_id, name, data: bytes) -> str:
        with self._lock:
            path = self.root / f"{image_id}__{name}"
            path.write_bytes(data)
            self._entries[(image_id, name)] = (len(data), time.monotonic())
            self._evict()
        return f"/artifacts/{image_id}/{name}"

    def get(self, image_id, name):
        with self._lock:
            key = (image_id, name)
            if key not in self._entries:
                return None
            size, _ = self._entries[key]
            self._entries[key] = (size, time.monotonic())
            path = self.root / f"{image_id}__{name}"
            return path.read_bytes() if path.exists() else None

    def _evict(self):
        total = sum(size for size, _ in self._entries.values())
        if total <= self.cap_bytes:
            return
        for key in sorted(self._entries, key=lambda k: self._entries[k][1]):
            size, _ = self._entries.pop(key)
            (self.root / f"{key[0]}__{key[1]}").unlink(missing_ok=True)
            total -= size
            if total <= self.cap_bytes:
                break


class EvalJobs:
    def __init__(self):
        self._jobs = {}
        self._lock = threading.Lock()

    def start(self, fn):
        job_id = uuid.uuid4().hex[:12]
        with self._lock:
            self._jobs[job_id] = {"status": "running"}

        def run():
            try:
                report = fn()
                with self._lock:
                    self._jobs[job_id] = {"status": "done", "report": report}
            except Exception as exc:
                with self._lock:
                    self._jobs[job_id] = {"status": "failed", "error": str(exc)}

        threading.Thread(target=run, daemon=True).start()
        return job_id

    def get(self, job_id):
        with self._lock:
            return self._jobs.get(job_id)


class ServiceState:
    """Mutable app state: models + provider registry swap atomically on
    reload; caches and the feedback store persist across swaps."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        cache_dir = config.artifact_cache_dir or tempfile.mkdtemp(prefix="lesionkit-cache-")
        self.artifacts = ArtifactCache(cache_dir, config.artifact_cache_mb)
        self.feedback = FeedbackStore(config.feedback_path)
        self.jobs = EvalJobs()
        self._lock = threading.Lock()
        self._build(config)

    def _build(self, config):
        binary, multi8 = load_models(config)
        registry = build_default_registry(
            binary,
            multi8,
            config.cv,
            config.mm_per_pixel,
            feature_masks_available=config.feature_masks_available,
        )
        # a pinned default must exist: fail at startup, not on first request
        for kind, pinned_id in (config.providers or {}).items():
            try:
                registry.resolve(kind, pinned_id)
            except UnknownProviderError as exc:
                raise ConfigError(f"config pins unknown provider: {exc}") from exc
            except ProviderUnavailableError:
                pass  # pinning an unavailable provider is allowed; requests get 503
        with self._lock:
            self.config = config
            self.binary_model = binary
            self.multi8_model = multi8
            self.registry = registry

    def resolve_provider(self, kind, requested_id=None):
        """Requested id wins; otherwise the config pin; otherwise the
        registry default. A named id is never silently substituted."""
        pinned = (self.config.providers or {}).get(kind)
        return self.registry.resolve(kind, requested_id or pinned)

    def reload(self):
        if self.config.source_path:
            self._build(ServiceConfig.from_file(self.config.source_path))
        else:
            self._build(self.config)

    def model_for(self, taxonomy_kind):
        if taxonomy_kind == "binary":
            return self.binary_model
        if taxonomy_kind == "multi8":
            return self.multi8_model
        return None


def _error(status, message, **extra):
    return JSONResponse(status_code=status, content={"error": str(message), **extra})


def _image_id(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:16]


async def _read_upload(request: Request, field="file"):
    form = await request.form()
    upload = form.get(field)
    if upload is None or isinstance(upload, str):
        raise LesionKitError(f"multipart field {field!r} with an image file is required")
    data = await upload.read()
    return upload.filename or field, data, form


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    state = ServiceState(config)
    app = FastAPI(title="lesionkit", version=__version__)
    app.state.service = state

    @app.exception_handler(StarletteHTTPException)
    async def http_error(request, exc):
        return _error(exc.status_code, exc.detail)

    @app.exception_handler(RequestValidationError)
    async def validation_error(request, exc):
        return _error(400, f"invalid request: {exc.errors()[0].get('msg', 'bad input')}")

    @app.exception_handler(LesionKitError)
    async def domain_error(request, exc):
        return _error(400, exc)

    # ---- documented core endpoints ------------------------------------

    @app.get("/model_info")
    @app.post("/model_info")
    async def model_info():
        return {
            "binary_classification_model": state.binary_model.model_id,
            "multi8_classification_model": state.multi8_model.model_id,
            "segmenter": state.registry.default_id("segmenter"),
            "feature_mask_provider": state.registry.default_id(FEATURE_MASK),
            "version": __version__,
        }

    @app.get("/html/{file_path:path}")
    @app.post("/html/{file_path:path}")
    async def static_html(file_path: str):
        root = Path(state.config.static_root)
        if not root.is_dir():
            return _error(404, f"file not found: {file_path}")
        try:
            target = (root / file_path).resolve()
            root_resolved = root.resolve()
            target.relative_to(root_resolved)
        except (ValueError, OSError):
            return _error(403, "path traversal rejected")
        if ".." in Path(file_path).parts:
            return _error(403, "path traversal rejected")
        if not target.is_file():
            return _error(404, f"file not found: {file_path}")
        media = _EXTENSION_TYPES.get(target.suffix.lower()) or mimetypes.guess_type(
            target.name
        )[0] or "application/octet-stream"
        return Response(content=target.read_bytes(), media_type=media)

    @app.post("/classify/binary")
    async def classify_binary(request: Request):
        filename, data, form = await _read_upload(request)
        requested = form.get("provider") or request.query_params.get("provider")
        try:
            descriptor, classifier_fn = state.resolve_provider("classifier", requested)
        except UnknownProviderError as exc:
            return _error(404, exc)
        except ProviderUnavailableError as exc:
            return _error(503, exc)
        if descriptor.taxonomy is not None and descriptor.taxonomy.kind != "binary":
            return _error(400, f"provider {descriptor.id!r} is not a binary classifier")
        try:
            img = decode_image(data)
            pred = classifier_fn(img)
        except LesionKitError as exc:
            return _error(400, exc)
        return {"filename": filename, "prediction": [float(p) for p in pred.probs]}

    @app.post("/segment")
    async def segment(request: Request):
        _, data, _ = await _read_upload(request)
        try:
            img = decode_image(data)
            result = segment_image(img, state.config.cv)
        except DegenerateSegmentationError as exc:
            return _error(400, exc)
        except LesionKitError as exc:
            return _error(400, exc)
        return Response(content=encode_mask_png(result.mask), media_type="image/png")

    @app.post("/extract_feature/{feature_class}")
    async def extract_feature(feature_class: str, request: Request):
        if feature_class not in FEATURE_CLASSES:
            return _error(
                404,
                f"unknown feature class {feature_class!r}; "
                f"expected one of {sorted(FEATURE_CLASSES)}",
            )
        _, data, form = await _read_upload(request)
        requested = form.get("provider") or request.query_params.get("provider")
        try:
            provider_desc, provider = state.resolve_provider(FEATURE_MASK, requested)
        except ProviderUnavailableError as exc:
            return _error(503, exc)
        except UnknownProviderError as exc:
            return _error(404 if requested else 503, exc)
        try:
            img = decode_image(data)
            lesion = segment_image(img, state.config.cv).mask
            mask = provider(img, lesion, feature_class)
        except LesionKitError as exc:
            return _error(400, exc)
        return Response(
            content=encode_mask_png(mask),
            media_type="image/png",
            headers={"X-Mask-Provider": provider_desc.id, "X-Mask-Quality": "heuristic"},
        )

    # ---- extended endpoints --------------------------------------------

    @app.post("/features/abcd")
    async def features_abcd(request: Request):
        _, data, form = await _read_upload(request)
        mm_raw = form.get("mm_per_pixel")
        mm_source = "request" if mm_raw is not None else "default"
        try:
            mm = float(mm_raw) if mm_raw is not None else state.config.mm_per_pixel
            if mm <= 0:
                raise LesionKitError(f"mm_per_pixel must be > 0, got {mm}")
        except ValueError:
            return _error(400, f"mm_per_pixel is not a number: {mm_raw!r}")
        try:
            img = decode_image(data)
            seg = segment_image(img, state.config.cv)
            features = extract_features(img, seg.mask, mm)
        except LesionKitError as exc:
            return _error(400, exc)
        scores = project_scores(features)
        image_id = _image_id(data)
        cache = state.artifacts
        cache.put(image_id, "original.png", encode_png(img))
        overlays = {
            "segmentation": cache.put(image_id, "segmentation.png", encode_mask_png(seg.mask)),
            "colors": cache.put(
                image_id, "colors.png", encode_png(render_color_regions(img, seg.mask))
            ),
            "asymmetry": cache.put(
                image_id, "asymmetry.png", encode_png(render_asymmetry_axes(img, seg.mask))
            ),
        }
        payload = pipeline.features_payload(features, scores, seg, mm, mm_source)
        payload["image_id"] = image_id
        payload["overlays"] = overlays
        return payload

    @app.post("/classify/confidence")
    async def classify_confidence(request: Request):
        filename, data, form = await _read_upload(request)
        taxonomy_kind = str(form.get("taxonomy", "binary"))
        if taxonomy_kind not in ("binary", "multi8"):
            return _error(400, f"taxonomy must be binary or multi8, got {taxonomy_kind!r}")
        model = state.model_for(taxonomy_kind)
        if model is None:
            return _error(503, f"no model available for taxonomy {taxonomy_kind!r}")
        try:
            img = decode_image(data)
            seg = segment_image(img, state.config.cv)
            features = extract_features(img, seg.mask, state.config.mm_per_pixel)
            pred = classify.predict(model, classify.feature_vector(features))
        except LesionKitError as exc:
            return _error(400, exc)
        payload = pipeline.confidence_payload(pred, classify.confidence(pred))
        payload["filename"] = filename
        payload["model"] = model.model_id
        return payload

    @app.post("/explain/rise")
    async def explain_rise(request: Request):
        _, data, form = await _read_upload(request)
        defaults = state.config.rise_defaults
        try:
            params = RiseParams(
                n_masks=int(form.get("n_masks", defaults.n_masks)),
                grid_cells=int(form.get("grid_cells", defaults.grid_cells)),
                p_on=float(form.get("p_on", defaults.p_on)),
                target_class=(
                    int(form["target_class"]) if form.get("target_class") is not None else None
                ),
                seed=int(form.get("seed", defaults.seed)),
            )
            opacity = float(form.get("opacity", 0.5))
        except ValueError as exc:
            return _error(400, f"invalid parameter: {exc}")
        if params.n_masks > state.config.rise_max_n_masks:
            return _error(
                400,
                f"n_masks {params.n_masks} exceeds the budget",
                limit=state.config.rise_max_n_masks,
            )
        try:
            params.validate()
            img = decode_image(data)
            classifier_fn = state.resolve_provider("classifier")[1]
            saliency = rise(img, classifier_fn, params)
        except LesionKitError as exc:
            return _error(400, exc)
        image_id = _image_id(data)
        bundle = saliency_artifacts(img, saliency, opacity)
        urls = {
            "saliency": state.artifacts.put(image_id, "saliency16.png", bundle["saliency16.png"]),
            "heatmap": state.artifacts.put(image_id, "heatmap.png", bundle["heatmap.png"]),
        }
        used = saliency.params_used
        return {
            "image_id": image_id,
            "params": {
                "n_masks": used.n_masks,
                "grid_cells": used.grid_cells,
                "p_on": used.p_on,
                "target_class": used.target_class,
                "seed": used.seed,
                "opacity": opacity,
            },
            "images": urls,
        }

    def _eval_items_from_zip(data: bytes, label: str):
        items = []
        with zipfile.ZipFile(io.BytesIO(data)) as zf:
            for name in sorted(zf.namelist()):
                if name.endswith("/"):
                    continue
                items.append((f"{label}/{name}", zf.read(name)))
        return items

    @app.post("/evaluate")
    async def evaluate(request: Request):
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("application/json"):
            doc = await request.json()
            benign = [(p, p) for p in doc.get("benign_paths", [])]
            malignant = [(p, p) for p in doc.get("malignant_paths", [])]

            def load(source):
                with open(source, "rb") as fh:
                    return fh.read()

        else:
            form = await request.form()
            uploads = {}
            for fld in ("benign", "malignant"):
                up = form.get(fld)
                if up is None or isinstance(up, str):
                    return _error(400, f"multipart field {fld!r} with a zip of images is required")
                uploads[fld] = await up.read()
            try:
                benign = _eval_items_from_zip(uploads["benign"], "benign")
                malignant = _eval_items_from_zip(uploads["malignant"], "malignant")
            except zipfile.BadZipFile:
                return _error(400, "uploads must be zip archives of images")

            def load(source):
                return source

        if not benign or not malignant:
            return _error(400, "both benign and malignant sets must contain images")

        score_fn = pipeline.malignancy_score_fn(
            state.binary_model, state.config.cv, state.config.mm_per_pixel
        )

        def run():
            def score(source):
                return score_fn(decode_image(load(source)))

            scores, failures = evalharness.score_dataset(benign, malignant, score)
            return evalharness.sweep(scores, failures=failures).to_dict()

        if len(benign) + len(malignant) <= state.config.eval_sync_limit:
            try:
                return run()
            except LesionKitError as exc:
                return _error(400, exc)
        job_id = state.jobs.start(run)
        return {"job_id": job_id, "status": "running", "poll": f"/evaluate/jobs/{job_id}"}

    @app.get("/evaluate/jobs/{job_id}")
    async def evaluate_job(job_id: str):
        job = state.jobs.get(job_id)
        if job is None:
            return _error(404, f"no such job: {job_id}")
        return job

    # ---- feedback -------------------------------------------------------

    def _validate_feedback(doc):
        if not isinstance(doc, dict):
            return "body must be a JSON object"
        if not doc.get("image_id") or not isinstance(doc["image_id"], str):
            return "image_id: required string"
        if doc.get("mask_class") not in FEEDBACK_MASK_CLASSES:
            return f"mask_class: must be one of {sorted(FEEDBACK_MASK_CLASSES)}"
        size = doc.get("image_size")
        if (
            not isinstance(size, (list, tuple))
            or len(size) != 2
            or not all(isinstance(v, (int, float)) and v > 0 for v in size)
        ):
            return "image_size: required [width, height]"
        regions = doc.get("regions")
        if not isinstance(regions, list) or not regions:
            return "regions: at least one region is required"
        w, h = size
        for i, region in enumerate(regions):
            if not isinstance(region, dict):
                return f"regions[{i}]: must be an object"
            if region.get("action") not in ("add", "remove"):
                return f"regions[{i}].action: must be add or remove"
            points = region.get("points")
            if not isinstance(points, list) or len(points) < 3:
                return f"regions[{i}].points: a polygon needs at least 3 vertices"
            for j, pt in enumerate(points):
                if (
                    not isinstance(pt, (list, tuple))
                    or len(pt) != 2
                    or not all(isinstance(v, (int, float)) for v in pt)
                ):
                    return f"regions[{i}].points[{j}]: must be [x, y]"
                x, y = pt
                if not (0 <= x <= w and 0 <= y <= h):
                    return f"regions[{i}].points[{j}]: ({x}, {y}) outside image bounds"
        return None

    @app.post("/feedback")
    async def feedback_post(request: Request):
        try:
            doc = await request.json()
        except Exception:
            return _error(400, "body must be JSON")
        problem = _validate_feedback(doc)
        if problem:
            return _error(400, problem)
        record = {
            "image_id": doc["image_id"],
            "mask_class": doc["mask_class"],
            "image_size": list(doc["image_size"]),
            "regions": doc["regions"],
            "client_timestamp": doc.get("client_timestamp"),
            "received_timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }
        record_id = state.feedback.append(record)
        return {"record_id": record_id}

    @app.get("/feedback/{record_id}")
    async def feedback_get(record_id: str):
        rec = state.feedback.get(record_id)
        if rec is None:
            return _error(404, f"no such feedback record: {record_id}")
        return rec

    # ---- artifacts and admin -------------------------------------------

    @app.get("/artifacts/{image_id}/{name}")
    async def artifact(image_id: str, name: str):
        data = state.artifacts.get(image_id, name)
        if data is None:
            return _error(404, f"no cached artifact {name} for {image_id}")
        return Response(content=data, media_type="image/png")

    @app.post("/admin/reload")
    async def admin_reload():
        try:
            state.reload()
        except (ConfigError, LesionKitError) as exc:
            return _error(400, exc)
        return {
            "status": "reloaded",
            "binary_classification_model": state.binary_model.model_id,
        }

    return app


def run_server(config: ServiceConfig | None = None, host="127.0.0.1"):
    import uvicorn

    config = config or ServiceConfig()
    uvicorn.run(create_app(config), host=host, port=config.port)
