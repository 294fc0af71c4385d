import json

import numpy as np
import pytest

from conftest import disk_bits, lesion_image, star_bits
from lesionkit.cli import main
from lesionkit.imaging import BinaryMask, decode_mask_png, encode_png, load_image
from lesionkit.segmentation import jaccard


def write_disk(path, size=100, radius=20, seed=7):
    path.write_bytes(encode_png(lesion_image(disk_bits(size, radius), noise=20.0, seed=seed)))
    return path


def write_star(path, seed=9):
    path.write_bytes(
        encode_png(lesion_image(star_bits(120, 36, 14), fg=50.0, noise=15.0, seed=seed))
    )
    return path


def write_constant(path):
    path.write_bytes(encode_png(lesion_image(np.zeros((60, 60), bool), bg=128.0)))
    return path


class TestAnalyze:
    def test_disk_fixture_succeeds_with_quality_mask(self, tmp_path, capsys):
        img = write_disk(tmp_path / "lesion.png")
        out = tmp_path / "out"
        assert main(["analyze", str(img), "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["filename"] == "lesion.png"
        assert "classification" in report
        mask = decode_mask_png((out / "segmentation.png").read_bytes())
        assert jaccard(BinaryMask(disk_bits(100, 20)), mask) >= 0.95

    def test_missing_file_exits_2(self, tmp_path, capsys):
        assert main(["analyze", str(tmp_path / "nope.png")]) == 2
        assert "error" in capsys.readouterr().err

    def test_pipeline_failure_exits_1(self, tmp_path, capsys):
        img = write_constant(tmp_path / "flat.png")
        assert main(["analyze", str(img)]) == 1
        err = json.loads(capsys.readouterr().err)
        assert "error" in err

    def test_report_streams_to_stdout_without_out(self, tmp_path, capsys):
        img = write_disk(tmp_path / "lesion.png")
        assert main(["analyze", str(img)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["display_scores"]["B"] < 2.0

    def test_explain_reproducible_heatmap(self, tmp_path):
        img = write_disk(tmp_path / "lesion.png", size=64, radius=14)
        outs = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            assert (
                main(
                    [
                        "analyze",
                        str(img),
                        "--out",
                        str(out),
                        "--explain",
                        "--n-masks",
                        "40",
                        "--seed",
                        "5",
                    ]
                )
                == 0
            )
            outs.append((out / "heatmap.png").read_bytes())
        assert outs[0] == outs[1]

    def test_schema_matches_service_composition(self, tmp_path, capsys):
        img = write_disk(tmp_path / "lesion.png")
        assert main(["analyze", str(img)]) == 0
        report = json.loads(capsys.readouterr().out)
        for key in ("features", "display_scores", "segmentation", "classification",
                    "mm_per_pixel", "timings_ms"):
            assert key in report
        assert set(report["classification"]) >= {"taxonomy", "labels", "prediction", "confidence"}


class TestTrain:
    def test_train_from_manifest(self, tmp_path, capsys):
        imgdir = tmp_path / "imgs"
        imgdir.mkdir()
        rows = []
        for i in range(5):
            write_disk(imgdir / f"b{i}.png", seed=i)
            rows.append((f"imgs/b{i}.png", "benign"))
            write_star(imgdir / f"m{i}.png", seed=100 + i)
            rows.append((f"imgs/m{i}.png", "malignant"))
        manifest = tmp_path / "train.csv"
        manifest.write_text("\n".join(f"{p},{label}" for p, label in rows))
        model_path = tmp_path / "model.json"
        assert main(["train", str(manifest), "--out", str(model_path)]) == 0
        doc = json.loads(model_path.read_text())
        assert doc["format"] == "lesionkit-model"
        assert doc["metadata"]["n_samples"] == 10

    def test_single_class_manifest_fails(self, tmp_path, capsys):
        imgdir = tmp_path / "imgs"
        imgdir.mkdir()
        rows = []
        for i in range(6):
            write_disk(imgdir / f"b{i}.png", seed=i)
            rows.append((f"imgs/b{i}.png", "benign"))
        manifest = tmp_path / "train.csv"
        manifest.write_text("\n".join(f"{p},{label}" for p, label in rows))
        assert main(["train", str(manifest), "--out", str(tmp_path / "m.json")]) == 1

    def test_jsonl_manifest(self, tmp_path):
        imgdir = tmp_path / "imgs"
        imgdir.mkdir()
        lines = []
        for i in range(5):
            write_disk(imgdir / f"b{i}.png", seed=i)
            lines.append(json.dumps({"path": f"imgs/b{i}.png", "label": "benign"}))
            write_star(imgdir / f"m{i}.png", seed=100 + i)
            lines.append(json.dumps({"path": f"imgs/m{i}.png", "label": "malignant"}))
        manifest = tmp_path / "train.jsonl"
        manifest.write_text("\n".join(lines))
        assert main(["train", str(manifest), "--out", str(tmp_path / "m.json")]) == 0

    def test_missing_manifest_exits_2(self, tmp_path):
        assert main(["train", str(tmp_path / "none.csv"), "--out", str(tmp_path / "m.json")]) == 2


class TestEvaluate:
    def _dirs(self, tmp_path, n=3):
        b = tmp_path / "benign"
        m = tmp_path / "malignant"
        b.mkdir()
        m.mkdir()
        for i in range(n):
            write_disk(b / f"b{i}.png", seed=i)
            write_star(m / f"m{i}.png", seed=100 + i)
        return b, m

    def test_emits_101_rows_and_auc(self, tmp_path, capsys):
        b, m = self._dirs(tmp_path)
        out = tmp_path / "report.json"
        code = main(["evaluate", "--benign", str(b), "--malignant", str(m), "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert len(report["per_threshold"]) == 101
        assert report["roc_auc"] == pytest.approx(1.0)

    def test_csv_export(self, tmp_path):
        b, m = self._dirs(tmp_path, 2)
        csv_path = tmp_path / "rows.csv"
        code = main(
            ["evaluate", "--benign", str(b), "--malignant", str(m),
             "--out", str(tmp_path / "r.json"), "--csv", str(csv_path)]
        )
        assert code == 0
        lines = csv_path.read_text().strip().splitlines()
        assert len(lines) == 102  # header + grid

    def test_parallel_jobs_match_serial(self, tmp_path):
        b, m = self._dirs(tmp_path, 2)
        out1 = tmp_path / "serial.json"
        out2 = tmp_path / "parallel.json"
        assert main(["evaluate", "--benign", str(b), "--malignant", str(m), "--out", str(out1)]) == 0
        assert (
            main(
                ["evaluate", "--benign", str(b), "--malignant", str(m),
                 "--out", str(out2), "--jobs", "4"]
            )
            == 0
        )
        assert json.loads(out1.read_text()) == json.loads(out2.read_text())

    def test_empty_dir_exits_2(self, tmp_path):
        b = tmp_path / "benign"
        m = tmp_path / "malignant"
        b.mkdir()
        m.mkdir()
        write_disk(b / "b0.png")
        assert main(["evaluate", "--benign", str(b), "--malignant", str(m)]) == 2


class TestExplainCommand:
    def test_writes_heatmap_bundle(self, tmp_path, capsys):
        img = write_disk(tmp_path / "lesion.png", size=64, radius=14)
        out = tmp_path / "exp"
        code = main(["explain", str(img), "--out", str(out), "--n-masks", "30"])
        assert code == 0
        assert (out / "heatmap.png").exists()
        assert (out / "saliency16.png").exists()
        assert json.loads((out / "params.json").read_text())["n_masks"] == 30

    def test_missing_image_exits_2(self, tmp_path):
        assert main(["explain", str(tmp_path / "none.png")]) == 2


class TestUsage:
    def test_no_command_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_unknown_command_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2
