"""Turn a raw directory of downloaded images into a uniform square dataset.

Candidate files are processed in lexicographic order of their paths, so two
runs over the same tree (on any machine) produce byte-identical outputs and
manifests. Kept images are center-square-cropped, bilinearly resized and
written as PNG named by a zero-padded index.
"""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyInput, InvalidParameter, PipelineError
from .raster import center_square_crop, decode, encode_png, resize_bilinear

logger = logging.getLogger(__name__)

STATUS_KEPT = "kept"
STATUS_DISCARDED_SMALL = "discarded_small"
STATUS_DISCARDED_MALFORMED = "discarded_malformed"

MANIFEST_NAME = "manifest.json"
DEFAULT_TARGET_SIDE = 256
DEFAULT_MIN_SIDE = 128


@dataclass
class ManifestEntry:
    source_path: str
    output_path: str | None
    original_w: int | None
    original_h: int | None
    status: str
    sha256: str | None

    def to_json_dict(self) -> dict:
        # field order is part of the manifest contract
        return {
            "source_path": self.source_path,
            "output_path": self.output_path,
            "original_w": self.original_w,
            "original_h": self.original_h,
            "status": self.status,
            "sha256": self.sha256,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ManifestEntry":
        return cls(
            source_path=d["source_path"],
            output_path=d["output_path"],
            original_w=d["original_w"],
            original_h=d["original_h"],
            status=d["status"],
            sha256=d["sha256"],
        )


def _candidate_files(input_dir: Path) -> list[Path]:
    return sorted((p for p in input_dir.rglob("*") if p.is_file()),
                  key=lambda p: p.relative_to(input_dir).as_posix())


def _process_one(path: Path, target_side: int, min_side: int):
    """Decode/crop/resize one file; returns (status, dims, png_bytes)."""
    data = path.read_bytes()
    try:
        raster = decode(data)
    except PipelineError:
        return STATUS_DISCARDED_MALFORMED, None, None
    dims = (raster.width, raster.height)
    if min(dims) < min_side:
        return STATUS_DISCARDED_SMALL, dims, None
    square = center_square_crop(raster)
    resized = resize_bilinear(square, target_side, target_side)
    return STATUS_KEPT, dims, encode_png(resized)


def prepare_dataset(input_dir, output_dir, target_side: int = DEFAULT_TARGET_SIDE,
                    min_side: int = DEFAULT_MIN_SIDE, workers: int = 1) -> list[ManifestEntry]:
    """Build the square dataset and its manifest.

    Returns the manifest entries, one per candidate file, and also writes them
    as JSON to ``output_dir/manifest.json``. Output naming and manifest order
    are pure functions of the sorted source paths, independent of ``workers``.
    """
    if target_side < 16:
        raise InvalidParameter(f"target_side must be >= 16, got {target_side}")
    if min_side < 1:
        raise InvalidParameter(f"min_side must be >= 1, got {min_side}")
    input_dir = Path(input_dir)
    output_dir = Path(output_dir)
    if not input_dir.is_dir():
        raise FileNotFoundError(f"input directory does not exist: {input_dir}")

    files = _candidate_files(input_dir)
    if not files:
        raise EmptyInput(f"no candidate files under {input_dir}")
    output_dir.mkdir(parents=True, exist_ok=True)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda p: _process_one(p, target_side, min_side), files))
    else:
        results = [_process_one(p, target_side, min_side) for p in files]

    entries: list[ManifestEntry] = []
    kept_index = 0
    for path, (status, dims, png) in zip(files, results):
        rel = path.relative_to(input_dir).as_posix()
        if status == STATUS_KEPT:
            name = f"{kept_index:06d}.png"
            kept_index += 1
            (output_dir / name).write_bytes(png)
            entry = ManifestEntry(rel, name, dims[0], dims[1], status,
                                  hashlib.sha256(png).hexdigest())
        elif status == STATUS_DISCARDED_SMALL:
            entry = ManifestEntry(rel, None, dims[0], dims[1], status, None)
        else:
            entry = ManifestEntry(rel, None, None, None, status, None)
        entries.append(entry)

    manifest_path = output_dir / MANIFEST_NAME
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump([e.to_json_dict() for e in entries], fh, indent=2)
        fh.write("\n")
    logger.info("prepared %d/%d images into %s", kept_index, len(files), output_dir)
    return entries


def load_manifest(path) -> list[ManifestEntry]:
    with open(path, "r", encoding="utf-8") as fh:
        return [ManifestEntry.from_json_dict(d) for d in json.load(fh)]
