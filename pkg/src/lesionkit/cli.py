"""Command-line front end.

Subcommands: ``analyze`` (single image -> report + artifact files),
``train`` (image manifest -> model file), ``evaluate`` (two labeled
directories -> metrics report), ``explain`` (saliency heatmap for one
image), ``serve`` (run the HTTP service).

Exit codes: 0 success, 1 pipeline error (bad image, degenerate
segmentation, ...), 2 usage error (bad flags, missing files). Reports
stream to stdout when ``--out`` is not given so commands compose in
shells; error details go to stderr as JSON.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import classify, evalharness, pipeline
from .abcd import DEFAULT_MM_PER_PIXEL
from .errors import LesionKitError
from .explain import RiseParams, rise, saliency_artifacts
from .imaging import encode_mask_png, encode_png, load_image
from .segmentation import jaccard  # noqa: F401  (re-export for scripting use)
from .service import ServiceConfig, load_models

USAGE_ERROR = 2
PIPELINE_ERROR = 1

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


def _fail(message, code):
    print(json.dumps({"error": str(message)}), file=sys.stderr)
    return code


def _load_config(path) -> ServiceConfig:
    return ServiceConfig.from_file(path) if path else ServiceConfig()


def _load_model(args, config: ServiceConfig):
    if getattr(args, "model", None):
        return classify.LinearModel.load(args.model)
    binary, _ = load_models(config)
    return binary


def _emit(doc, out_path):
    text = json.dumps(doc, indent=2)
    if out_path:
        Path(out_path).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def cmd_analyze(args) -> int:
    image_path = Path(args.image)
    if not image_path.is_file():
        return _fail(f"image not found: {image_path}", USAGE_ERROR)
    config = _load_config(args.config)
    model = _load_model(args, config)
    try:
        img = load_image(image_path)
        mm = args.mm_per_pixel if args.mm_per_pixel else config.mm_per_pixel
        mm_source = "request" if args.mm_per_pixel else "default"
        result = pipeline.analyze_image(img, model, config.cv, mm)
        report = pipeline.analysis_payload(result, mm, mm_source)
        report["filename"] = image_path.name

        artifacts = {}
        if args.out:
            out_dir = Path(args.out)
            out_dir.mkdir(parents=True, exist_ok=True)
            (out_dir / "segmentation.png").write_bytes(encode_mask_png(result.segmentation.mask))
            from .abcd import render_asymmetry_axes, render_color_regions

            (out_dir / "colors.png").write_bytes(
                encode_png(render_color_regions(img, result.segmentation.mask))
            )
            (out_dir / "asymmetry.png").write_bytes(
                encode_png(render_asymmetry_axes(img, result.segmentation.mask))
            )
            artifacts = {
                "segmentation": str(out_dir / "segmentation.png"),
                "colors": str(out_dir / "colors.png"),
                "asymmetry": str(out_dir / "asymmetry.png"),
            }
            if args.explain:
                params = RiseParams(n_masks=args.n_masks, seed=args.seed)
                smap = rise(img, pipeline.ImageClassifier(model, config.cv, mm), params)
                for name, blob in saliency_artifacts(img, smap).items():
                    (out_dir / name).write_bytes(blob)
                artifacts["heatmap"] = str(out_dir / "heatmap.png")
            report["artifacts"] = artifacts
            (out_dir / "report.json").write_text(json.dumps(report, indent=2) + "\n")
            print(str(out_dir / "report.json"))
        else:
            report["artifacts"] = artifacts
            print(json.dumps(report, indent=2))
    except LesionKitError as exc:
        return _fail(exc, PIPELINE_ERROR)
    return 0


def _read_manifest(path: Path):
    """(image path, label) rows from a CSV or JSON-lines manifest."""
    rows = []
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() in (".jsonl", ".ndjson"):
        for line in text.splitlines():
            if line.strip():
                doc = json.loads(line)
                rows.append((doc["path"], doc["label"]))
    else:
        for line in text.splitlines():
            line = line.strip()
            if not line or line.lower().startswith("path,"):
                continue
            part_path, _, label = line.rpartition(",")
            rows.append((part_path.strip(), label.strip()))
    return rows


def cmd_train(args) -> int:
    manifest = Path(args.manifest)
    if not manifest.is_file():
        return _fail(f"manifest not found: {manifest}", USAGE_ERROR)
    config = _load_config(args.config)
    taxonomy = classify.TAXONOMIES[args.taxonomy]
    rows = _read_manifest(manifest)
    if not rows:
        return _fail("manifest is empty", USAGE_ERROR)
    base = manifest.parent
    features, labels, failures = [], [], []
    from .abcd import extract_features
    from .segmentation import segment_image

    for rel_path, label in rows:
        img_path = Path(rel_path)
        if not img_path.is_absolute():
            img_path = base / img_path
        try:
            img = load_image(img_path)
            seg = segment_image(img, config.cv)
            feats = extract_features(img, seg.mask, config.mm_per_pixel)
            features.append(classify.feature_vector(feats))
            labels.append(label)
        except (LesionKitError, OSError) as exc:
            failures.append({"path": str(img_path), "error": str(exc)})
    try:
        model = classify.train(
            features,
            labels,
            taxonomy,
            classify.TrainConfig(loss=args.loss, max_epochs=args.epochs, seed=args.seed),
        )
    except LesionKitError as exc:
        return _fail(exc, PIPELINE_ERROR)
    model.metadata["model_id"] = args.model_id or f"abcd-linear-{args.taxonomy}-custom"
    model.metadata["n_failures"] = len(failures)
    model.save(args.out)
    print(
        json.dumps(
            {
                "model": args.out,
                "model_id": model.metadata["model_id"],
                "n_samples": model.metadata["n_samples"],
                "final_loss": model.metadata["final_loss"],
                "failures": failures,
            },
            indent=2,
        )
    )
    return 0


def _image_items(directory: Path):
    return [
        (p.name, p)
        for p in sorted(directory.iterdir())
        if p.suffix.lower() in IMAGE_SUFFIXES
    ]


def cmd_evaluate(args) -> int:
    benign_dir = Path(args.benign)
    malignant_dir = Path(args.malignant)
    for d in (benign_dir, malignant_dir):
        if not d.is_dir():
            return _fail(f"not a directory: {d}", USAGE_ERROR)
    benign = _image_items(benign_dir)
    malignant = _image_items(malignant_dir)
    if not benign or not malignant:
        return _fail("both directories must contain images", USAGE_ERROR)
    config = _load_config(args.config)
    model = _load_model(args, config)
    score_image = pipeline.malignancy_score_fn(model, config.cv, config.mm_per_pixel)

    def score_path(path):
        return score_image(load_image(path))

    try:
        if args.jobs > 1:
            # pre-score in parallel; score_dataset then reads the table
            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                paths = [p for _, p in benign + malignant]
                results = dict(zip(paths, pool.map(lambda p: _safe(score_path, p), paths)))

            def lookup(path):
                outcome = results[path]
                if isinstance(outcome, Exception):
                    raise outcome
                return outcome

            scores, failures = evalharness.score_dataset(benign, malignant, lookup)
        else:
            scores, failures = evalharness.score_dataset(benign, malignant, score_path)
        report = evalharness.sweep(scores, failures=failures)
    except LesionKitError as exc:
        return _fail(exc, PIPELINE_ERROR)
    _emit(report.to_dict(), args.out)
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    return 0


def _safe(fn, arg):
    try:
        return fn(arg)
    except Exception as exc:
        return exc


def cmd_explain(args) -> int:
    image_path = Path(args.image)
    if not image_path.is_file():
        return _fail(f"image not found: {image_path}", USAGE_ERROR)
    config = _load_config(args.config)
    model = _load_model(args, config)
    try:
        img = load_image(image_path)
        params = RiseParams(
            n_masks=args.n_masks, grid_cells=args.grid, p_on=args.p_on, seed=args.seed
        )
        smap = rise(img, pipeline.ImageClassifier(model, config.cv, config.mm_per_pixel), params)
    except LesionKitError as exc:
        return _fail(exc, PIPELINE_ERROR)
    out_dir = Path(args.out or f"{image_path.stem}_explanation")
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, blob in saliency_artifacts(img, smap, args.opacity).items():
        (out_dir / name).write_bytes(blob)
    print(str(out_dir / "heatmap.png"))
    return 0


def cmd_serve(args) -> int:
    from .service import run_server

    config = _load_config(args.config)
    if args.port:
        config.port = args.port
    run_server(config, host=args.host)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lesionkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="segment, describe, and classify one image")
    p.add_argument("image")
    p.add_argument("--out", help="directory for report.json and overlay PNGs")
    p.add_argument("--model", help="model JSON (default: packaged binary baseline)")
    p.add_argument("--config", help="service config JSON")
    p.add_argument("--mm-per-pixel", type=float, default=None)
    p.add_argument("--explain", action="store_true", help="also render a saliency heatmap")
    p.add_argument("--n-masks", type=int, default=100)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("train", help="fit a model from an image manifest")
    p.add_argument("manifest", help="CSV (path,label) or JSONL ({path, label})")
    p.add_argument("--taxonomy", choices=("binary", "multi8"), default="binary")
    p.add_argument("--out", required=True, help="output model JSON path")
    p.add_argument("--loss", choices=("logistic", "hinge"), default="logistic")
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--model-id", default=None)
    p.add_argument("--config", help="service config JSON")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("evaluate", help="threshold-sweep metrics over two labeled dirs")
    p.add_argument("--benign", required=True)
    p.add_argument("--malignant", required=True)
    p.add_argument("--model", help="model JSON (default: packaged binary baseline)")
    p.add_argument("--config", help="service config JSON")
    p.add_argument("--out", help="report JSON path (default: stdout)")
    p.add_argument("--csv", help="also write per-threshold rows as CSV")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("explain", help="randomized-occlusion saliency for one image")
    p.add_argument("image")
    p.add_argument("--out", help="output directory (default: <image>_explanation)")
    p.add_argument("--model", help="model JSON")
    p.add_argument("--config", help="service config JSON")
    p.add_argument("--n-masks", type=int, default=100)
    p.add_argument("--grid", type=int, default=7)
    p.add_argument("--p-on", type=float, default=0.5)
    p.add_argument("--opacity", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(fn=cmd_explain)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--config", help="service config JSON")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except LesionKitError as exc:
        return _fail(exc, PIPELINE_ERROR)
    except OSError as exc:
        return _fail(exc, USAGE_ERROR)


if __name__ == "__main__":
    sys.exit(main())
