"""Seeded planning and deterministic rendering of wide-field tile mosaics.

A plan is a pure function of (pool, grid, parameters, seed): one PRNG stream
is consumed in a fixed per-cell draw order, so any two implementations of the
same stream produce structurally identical plans. Rendering is a pure
function of the plan plus tile bytes, and its output is byte-identical for
every worker count.
"""

from __future__ import annotations

import json
import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import (
    EmptyPool,
    InvalidParameter,
    InvalidScaleRange,
    MissingTile,
    NonSquareTile,
    NotEnoughBlanks,
    ZeroDimension,
)
from .raster import Raster, Rotation, resize_bilinear, rotate, to_grayscale, write_png
from .rng import Prng

logger = logging.getLogger(__name__)

# ten near-black fillers per ~3000 galaxy tiles
DEFAULT_BLANK_WEIGHT = 10 / 3010
DEFAULT_SCALE_RANGE = (0.5, 1.0)
DEFAULT_TILE_COUNT = 25_000
DEFAULT_STRIP_THRESHOLD = 16_384

STRIP_INDEX_NAME = "index.json"


@dataclass
class TilePool:
    """Sources a mosaic draws from: galaxy tiles plus optional blank tiles."""

    galaxy_tiles: list[str]
    blank_tiles: list[str] = field(default_factory=list)
    blank_weight: float = 0.0

    def __post_init__(self):
        if not self.galaxy_tiles:
            raise EmptyPool("pool has no galaxy tiles")
        if not 0.0 <= self.blank_weight <= 1.0:
            raise InvalidParameter(f"blank_weight must be in [0, 1], got {self.blank_weight}")
        if self.blank_weight > 0.0 and not self.blank_tiles:
            raise EmptyPool("blank_weight > 0 but the pool has no blank tiles")


@dataclass(frozen=True)
class PlanEntry:
    row: int
    col: int
    source: str
    rotation: Rotation
    scale: float


@dataclass
class MosaicPlan:
    seed: int
    rows: int
    cols: int
    tile_side: int
    entries: list[PlanEntry]

    @property
    def width(self) -> int:
        return self.cols * self.tile_side

    @property
    def height(self) -> int:
        return self.rows * self.tile_side

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "rows": self.rows,
            "cols": self.cols,
            "tile_side": self.tile_side,
            "entries": [
                {
                    "row": e.row,
                    "col": e.col,
                    "source": e.source,
                    "rotation": e.rotation.quarter_turns,
                    "scale": e.scale,
                }
                for e in self.entries
            ],
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=1)
            fh.write("\n")

    @classmethod
    def from_json_dict(cls, d: dict) -> "MosaicPlan":
        entries = [
            PlanEntry(e["row"], e["col"], e["source"], Rotation(e["rotation"]), e["scale"])
            for e in d["entries"]
        ]
        return cls(d["seed"], d["rows"], d["cols"], d["tile_side"], entries)

    @classmethod
    def load(cls, path) -> "MosaicPlan":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


def grid_for_count(count: int) -> tuple[int, int]:
    """Smallest near-square grid holding ``count`` tiles: (rows, cols)."""
    if count < 1:
        raise EmptyPool(f"tile count must be >= 1, got {count}")
    cols = math.ceil(math.sqrt(count))
    rows = math.ceil(count / cols)
    return rows, cols


def plan_mosaic(pool: TilePool, rows: int, cols: int, tile_side: int,
                scale_range: tuple[float, float] = DEFAULT_SCALE_RANGE,
                seed: int = 0) -> MosaicPlan:
    """Fill a rows x cols grid from one seeded stream.

    Cells are visited in row-major order. Per cell the stream is consumed in
    this fixed order:

      1. u in [0,1): cell is blank iff u < pool.blank_weight
      2. uniform index into the chosen sub-pool (next_u64 mod pool size)
      3. uniform rotation in {0..3} (next_u64 mod 4)
      4. uniform scale in [lo, hi)

    Blank cells keep their drawn source but use rotation 0 and scale 1; their
    rotation/scale draws are still consumed so streams stay aligned.
    """
    if rows * cols < 1:
        raise EmptyPool(f"mosaic grid has no cells ({rows}x{cols})")
    if tile_side < 1:
        raise ZeroDimension(f"tile_side must be >= 1, got {tile_side}")
    lo, hi = scale_range
    if not 0.0 < lo <= hi <= 1.0:
        raise InvalidScaleRange(f"scale range must satisfy 0 < lo <= hi <= 1, got [{lo}, {hi}]")

    prng = Prng(seed)
    entries: list[PlanEntry] = []
    for row in range(rows):
        for col in range(cols):
            is_blank = prng.random() < pool.blank_weight
            subpool = pool.blank_tiles if is_blank else pool.galaxy_tiles
            source = subpool[prng.below(len(subpool))]
            rotation = Rotation(prng.below(4))
            scale = prng.uniform(lo, hi)
            if is_blank:
                rotation = Rotation(0)
                scale = 1.0
            entries.append(PlanEntry(row, col, source, rotation, scale))
    return MosaicPlan(seed, rows, cols, tile_side, entries)


def select_blanks(candidates: Sequence[tuple[str, Raster]], max_mean_luma: float, k: int) -> list[str]:
    """Pick the k darkest candidates whose mean luma is <= max_mean_luma.

    Ties are broken by candidate order, so passing candidates sorted by id
    gives the documented id-order tie-break.
    """
    if k > len(candidates):
        raise NotEnoughBlanks(f"asked for {k} blanks from {len(candidates)} candidates")
    scored = []
    for position, (tile_id, raster) in enumerate(candidates):
        mean = float(to_grayscale(raster).pixels.mean())
        if mean <= max_mean_luma:
            scored.append((mean, position, tile_id))
    if len(scored) < k:
        raise NotEnoughBlanks(
            f"only {len(scored)} candidates have mean luma <= {max_mean_luma}, need {k}")
    scored.sort(key=lambda t: (t[0], t[1]))
    return [tile_id for _, _, tile_id in scored[:k]]


class _TileCache:
    """Lock-protected id -> Raster cache so each source decodes once."""

    def __init__(self, loader: Callable[[str], Raster]):
        self._loader = loader
        self._lock = threading.Lock()
        self._tiles: dict[str, Raster] = {}

    def get(self, source: str) -> Raster:
        with self._lock:
            tile = self._tiles.get(source)
            if tile is None:
                try:
                    tile = self._loader(source)
                except (KeyError, FileNotFoundError, OSError) as exc:
                    raise MissingTile(f"cannot load tile {source!r}: {exc}") from exc
                self._tiles[source] = tile
        return tile


def _render_cell(tile: Raster, entry: PlanEntry, tile_side: int) -> np.ndarray:
    """Scaled, rotated tile centered on a black tile_side x tile_side cell."""
    if tile.width != tile.height:
        raise NonSquareTile(
            f"tile {entry.source!r} is {tile.width}x{tile.height}, mosaics need square tiles")
    side = max(1, int(math.floor(entry.scale * tile_side + 0.5)))
    content = rotate(resize_bilinear(tile, side, side), entry.rotation)
    cell = np.zeros((tile_side, tile_side, 3), dtype=np.uint8)
    offset = (tile_side - side) // 2
    cell[offset:offset + side, offset:offset + side] = content.pixels
    return cell


def iter_strips(plan: MosaicPlan, loader: Callable[[str], Raster],
                workers: int = 1) -> Iterator[tuple[int, Raster]]:
    """Yield (row_index, strip) in row order; one strip per tile row.

    Strips are rendered from pure per-cell functions and emitted in row order,
    so the assembled bytes do not depend on ``workers``.
    """
    cache = _TileCache(loader)
    by_row: list[list[PlanEntry]] = [[] for _ in range(plan.rows)]
    for entry in plan.entries:
        by_row[entry.row].append(entry)

    def render_row(row: int) -> Raster:
        strip = np.zeros((plan.tile_side, plan.width, 3), dtype=np.uint8)
        for entry in sorted(by_row[row], key=lambda e: e.col):
            x0 = entry.col * plan.tile_side
            strip[:, x0:x0 + plan.tile_side] = _render_cell(
                cache.get(entry.source), entry, plan.tile_side)
        return Raster(strip)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            yield from enumerate(pool.map(render_row, range(plan.rows)))
    else:
        for row in range(plan.rows):
            yield row, render_row(row)


def render_mosaic(plan: MosaicPlan, loader: Callable[[str], Raster], workers: int = 1) -> Raster:
    """Render the full mosaic into one Raster of (cols*side) x (rows*side)."""
    frame = np.zeros((plan.height, plan.width, 3), dtype=np.uint8)
    for row, strip in iter_strips(plan, loader, workers=workers):
        y0 = row * plan.tile_side
        frame[y0:y0 + plan.tile_side] = strip.pixels
    return Raster(frame)


def write_mosaic_strips(plan: MosaicPlan, loader: Callable[[str], Raster], out_dir,
                        workers: int = 1) -> Path:
    """Write one PNG per tile row plus an index JSON; returns the index path.

    Peak memory stays at a single strip, so arbitrarily tall mosaics never
    need a full frame in memory.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    names = []
    for row, strip in iter_strips(plan, loader, workers=workers):
        name = f"strip_{row:04d}.png"
        write_png(strip, out_dir / name)
        names.append(name)
    index = {
        "width": plan.width,
        "height": plan.height,
        "rows": plan.rows,
        "cols": plan.cols,
        "tile_side": plan.tile_side,
        "strip_height": plan.tile_side,
        "strips": names,
    }
    index_path = out_dir / STRIP_INDEX_NAME
    with open(index_path, "w", encoding="utf-8") as fh:
        json.dump(index, fh, indent=2)
        fh.write("\n")
    logger.info("wrote %d strips to %s", len(names), out_dir)
    return index_path


def directory_loader(root) -> Callable[[str], Raster]:
    """Loader resolving plan source ids as paths relative to ``root``."""
    root = Path(root)

    def load(source: str) -> Raster:
        from .raster import read_raster
        return read_raster(root / source)

    return load
