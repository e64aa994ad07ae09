"""Dataset preparation: manifest rules, determinism, size thresholds."""

import io
import json

import numpy as np
import pytest
from PIL import Image

from cosmoforge.errors import EmptyInput, InvalidParameter
from cosmoforge.prep import (
    STATUS_DISCARDED_MALFORMED,
    STATUS_DISCARDED_SMALL,
    STATUS_KEPT,
    load_manifest,
    prepare_dataset,
)
from cosmoforge.raster import read_raster


def write_image(path, w, h, seed=0, fmt="PNG"):
    rng = np.random.default_rng(seed)
    arr = rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)
    buf = io.BytesIO()
    Image.fromarray(arr, mode="RGB").save(buf, format=fmt)
    path.write_bytes(buf.getvalue())


def test_single_kept_image(tmp_path):
    src, out = tmp_path / "src", tmp_path / "out"
    src.mkdir()
    write_image(src / "a.png", 640, 480)
    entries = prepare_dataset(src, out, target_side=256, min_side=128)
    assert len(entries) == 1
    entry = entries[0]
    assert entry.status == STATUS_KEPT
    assert entry.output_path == "000000.png"
    assert (entry.original_w, entry.original_h) == (640, 480)
    assert entry.sha256 is not None
    raster = read_raster(out / entry.output_path)
    assert (raster.width, raster.height) == (256, 256)


def test_small_image_discarded(tmp_path):
    src, out = tmp_path / "src", tmp_path / "out"
    src.mkdir()
    write_image(src / "small.png", 100, 90)
    entries = prepare_dataset(src, out, target_side=256, min_side=128)
    assert entries[0].status == STATUS_DISCARDED_SMALL
    assert entries[0].output_path is None
    assert entries[0].sha256 is None


def test_malformed_file_discarded(tmp_path):
    src, out = tmp_path / "src", tmp_path / "out"
    src.mkdir()
    (src / "junk.png").write_bytes(b"not an image")
    write_image(src / "ok.png", 256, 256)
    entries = prepare_dataset(src, out, target_side=64, min_side=64)
    by_source = {e.source_path: e for e in entries}
    assert by_source["junk.png"].status == STATUS_DISCARDED_MALFORMED
    assert by_source["ok.png"].status == STATUS_KEPT


def test_entry_counts_add_up(tmp_path):
    src, out = tmp_path / "src", tmp_path / "out"
    src.mkdir()
    write_image(src / "a.png", 300, 300, seed=1)
    write_image(src / "b.png", 60, 60, seed=2)
    (src / "c.png").write_bytes(b"garbage")
    write_image(src / "d.jpg", 400, 200, seed=3, fmt="JPEG")
    entries = prepare_dataset(src, out, target_side=128, min_side=128)
    assert len(entries) == 4
    statuses = [e.status for e in entries]
    assert statuses.count(STATUS_KEPT) + statuses.count(STATUS_DISCARDED_SMALL) \
        + statuses.count(STATUS_DISCARDED_MALFORMED) == 4


def test_extension_case_gives_distinct_indices(tmp_path):
    src, out = tmp_path / "src", tmp_path / "out"
    src.mkdir()
    write_image(src / "img.PNG", 200, 200, seed=4)
    write_image(src / "img.png", 200, 200, seed=5)
    entries = prepare_dataset(src, out, target_side=64, min_side=64)
    kept = [e for e in entries if e.status == STATUS_KEPT]
    assert len(kept) == 2
    assert {e.output_path for e in kept} == {"000000.png", "000001.png"}
    # lexicographic source order: "img.PNG" sorts before "img.png"
    assert entries[0].source_path == "img.PNG"


def test_outputs_are_exactly_target_side(tmp_path):
    src, out = tmp_path / "src", tmp_path / "out"
    src.mkdir()
    for i, (w, h) in enumerate([(301, 200), (200, 301), (257, 257)]):
        write_image(src / f"im{i}.png", w, h, seed=i)
    entries = prepare_dataset(src, out, target_side=128, min_side=128)
    for e in entries:
        assert e.status == STATUS_KEPT
        r = read_raster(out / e.output_path)
        assert (r.width, r.height) == (128, 128)


def test_determinism_across_runs_and_workers(tmp_path):
    src = tmp_path / "src"
    src.mkdir()
    for i in range(6):
        write_image(src / f"im{i:02d}.png", 150 + i, 140 + i, seed=i)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    prepare_dataset(src, out_a, target_side=64, min_side=64, workers=1)
    prepare_dataset(src, out_b, target_side=64, min_side=64, workers=4)
    files_a = sorted(p.name for p in out_a.iterdir())
    files_b = sorted(p.name for p in out_b.iterdir())
    assert files_a == files_b
    for name in files_a:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_manifest_roundtrip(tmp_path):
    src, out = tmp_path / "src", tmp_path / "out"
    src.mkdir()
    write_image(src / "a.png", 200, 160, seed=9)
    entries = prepare_dataset(src, out, target_side=64, min_side=64)
    loaded = load_manifest(out / "manifest.json")
    assert [e.to_json_dict() for e in loaded] == [e.to_json_dict() for e in entries]
    # stable field order in the file itself
    raw = json.loads((out / "manifest.json").read_text())
    assert list(raw[0].keys()) == [
        "source_path", "output_path", "original_w", "original_h", "status", "sha256"]


def test_empty_input_raises(tmp_path):
    src, out = tmp_path / "src", tmp_path / "out"
    src.mkdir()
    with pytest.raises(EmptyInput):
        prepare_dataset(src, out)


def test_parameter_validation(tmp_path):
    src = tmp_path / "src"
    src.mkdir()
    write_image(src / "a.png", 64, 64)
    with pytest.raises(InvalidParameter):
        prepare_dataset(src, tmp_path / "o", target_side=8)
    with pytest.raises(InvalidParameter):
        prepare_dataset(src, tmp_path / "o", min_side=0)
