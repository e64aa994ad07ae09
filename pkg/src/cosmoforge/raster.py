"""8-bit RGB rasters and the geometric/photometric primitives built on them.

Every transform is a pure function of its inputs and is bit-deterministic:
fractional channel values are rounded half-up, resampling uses the
half-pixel-center convention, and rotations are restricted to lossless
quarter turns. That makes each operation safe to run from any number of
workers and lets independent runs agree byte-for-byte.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    InvalidParameter,
    MalformedFile,
    UnsupportedFormat,
    ZeroDimension,
)
from .rng import Prng

REC601_WEIGHTS = (0.299, 0.587, 0.114)

_PNG_JPEG = ("PNG", "JPEG")


def _round_half_up(values: np.ndarray) -> np.ndarray:
    # floor(x + 0.5): round-half-up, the single rounding rule used everywhere
    return np.floor(values + 0.5)


def _as_uint8(arr: np.ndarray, expected_ndim: int) -> np.ndarray:
    arr = np.asarray(arr)
    if arr.ndim != expected_ndim:
        raise ValueError(f"expected {expected_ndim}-dimensional pixel array, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError("channel values must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


@dataclass(eq=False)
class Raster:
    """8-bit RGB image; ``pixels`` is a (height, width, 3) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        pixels = _as_uint8(self.pixels, 3)
        if pixels.shape[2] != 3:
            raise ValueError(f"expected 3 channels, got {pixels.shape[2]}")
        if pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise ZeroDimension("raster must be at least 1x1")
        self.pixels = pixels

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def copy(self) -> "Raster":
        return Raster(self.pixels.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Raster):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and np.array_equal(self.pixels, other.pixels)


@dataclass(eq=False)
class GrayRaster:
    """Single-channel 8-bit image; ``pixels`` is a (height, width) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        pixels = _as_uint8(self.pixels, 2)
        if pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise ZeroDimension("raster must be at least 1x1")
        self.pixels = pixels

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def copy(self) -> "GrayRaster":
        return GrayRaster(self.pixels.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, GrayRaster):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True)
class Rotation:
    """Lossless clockwise rotation by ``quarter_turns`` * 90 degrees."""

    quarter_turns: int

    def __post_init__(self):
        if self.quarter_turns not in (0, 1, 2, 3):
            raise InvalidParameter(f"quarter_turns must be in {{0,1,2,3}}, got {self.quarter_turns}")

    def compose(self, other: "Rotation") -> "Rotation":
        return Rotation((self.quarter_turns + other.quarter_turns) % 4)

    def inverse(self) -> "Rotation":
        return Rotation((4 - self.quarter_turns) % 4)


def decode(data: bytes) -> Raster:
    """Decode a PNG or baseline JPEG byte stream into a Raster.

    Raises MalformedFile for undecodable streams, UnsupportedFormat for
    anything that is not PNG/JPEG, ZeroDimension for degenerate headers.
    """
    try:
        img = Image.open(io.BytesIO(data))
    except UnidentifiedImageError as exc:
        raise MalformedFile("cannot identify image stream") from exc
    if img.format not in _PNG_JPEG:
        raise UnsupportedFormat(f"unsupported image format: {img.format}")
    if img.width < 1 or img.height < 1:
        raise ZeroDimension("image header declares a zero dimension")
    try:
        img = img.convert("RGB")  # forces the full decode
    except (OSError, SyntaxError, ValueError) as exc:
        raise MalformedFile(f"broken {img.format} stream: {exc}") from exc
    return Raster(np.asarray(img, dtype=np.uint8))


def encode_png(r: Raster) -> bytes:
    """Encode losslessly as PNG; decode(encode_png(r)) == r pixel-for-pixel."""
    buf = io.BytesIO()
    Image.fromarray(r.pixels, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def read_raster(path) -> Raster:
    with open(path, "rb") as fh:
        return decode(fh.read())


def write_png(r: Raster, path) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_png(r))


def center_square_crop(r: Raster) -> Raster:
    """Crop to the centered square of side min(width, height).

    The crop origin is (floor((w-s)/2), floor((h-s)/2)); pixels are copied,
    never resampled, so the operation is idempotent.
    """
    side = min(r.width, r.height)
    x0 = (r.width - side) // 2
    y0 = (r.height - side) // 2
    return Raster(r.pixels[y0:y0 + side, x0:x0 + side].copy())


def _resize_plane(src: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """Bilinear resize of an (h, w) or (h, w, c) float64 array.

    Half-pixel-center convention: x_src = (x_dst + 0.5) * (w_in / w_out) - 0.5
    clamped to [0, w_in - 1], so resizing to identical dimensions maps the
    grid exactly onto itself.
    """
    in_h, in_w = src.shape[:2]
    xs = (np.arange(out_w, dtype=np.float64) + 0.5) * (in_w / out_w) - 0.5
    ys = (np.arange(out_h, dtype=np.float64) + 0.5) * (in_h / out_h) - 0.5
    np.clip(xs, 0.0, in_w - 1.0, out=xs)
    np.clip(ys, 0.0, in_h - 1.0, out=ys)
    x0 = np.floor(xs).astype(np.intp)
    y0 = np.floor(ys).astype(np.intp)
    x1 = np.minimum(x0 + 1, in_w - 1)
    y1 = np.minimum(y0 + 1, in_h - 1)
    fx = xs - x0
    fy = ys - y0
    if src.ndim == 3:
        fx = fx[None, :, None]
        fy = fy[:, None, None]
        p00 = src[y0[:, None], x0[None, :]]
        p01 = src[y0[:, None], x1[None, :]]
        p10 = src[y1[:, None], x0[None, :]]
        p11 = src[y1[:, None], x1[None, :]]
    else:
        fx = fx[None, :]
        fy = fy[:, None]
        p00 = src[np.ix_(y0, x0)]
        p01 = src[np.ix_(y0, x1)]
        p10 = src[np.ix_(y1, x0)]
        p11 = src[np.ix_(y1, x1)]
    top = p00 * (1.0 - fx) + p01 * fx
    bottom = p10 * (1.0 - fx) + p11 * fx
    return top * (1.0 - fy) + bottom * fy


def resize_bilinear(r: Raster, out_w: int, out_h: int) -> Raster:
    """Bilinear resize with half-pixel centers; channels rounded half-up."""
    if out_w < 1 or out_h < 1:
        raise ZeroDimension(f"target dimensions must be >= 1, got {out_w}x{out_h}")
    out = _resize_plane(r.pixels.astype(np.float64), out_w, out_h)
    return Raster(np.clip(_round_half_up(out), 0, 255).astype(np.uint8))


def resize_bilinear_gray(g: GrayRaster, out_w: int, out_h: int) -> GrayRaster:
    """Single-channel variant of :func:`resize_bilinear`."""
    if out_w < 1 or out_h < 1:
        raise ZeroDimension(f"target dimensions must be >= 1, got {out_w}x{out_h}")
    out = _resize_plane(g.pixels.astype(np.float64), out_w, out_h)
    return GrayRaster(np.clip(_round_half_up(out), 0, 255).astype(np.uint8))


def rotate(r: Raster, rot: Rotation) -> Raster:
    """Lossless clockwise quarter-turn rotation.

    One turn maps source pixel (x, y) to destination (h - 1 - y, x); output
    dimensions swap on odd turns.
    """
    if rot.quarter_turns == 0:
        return r.copy()
    return Raster(np.ascontiguousarray(np.rot90(r.pixels, k=-rot.quarter_turns)))


def to_grayscale(r: Raster) -> GrayRaster:
    """Rec. 601 luma: Y = round(0.299 R + 0.587 G + 0.114 B), half-up."""
    wr, wg, wb = REC601_WEIGHTS
    src = r.pixels.astype(np.float64)
    y = wr * src[..., 0] + wg * src[..., 1] + wb * src[..., 2]
    return GrayRaster(np.clip(_round_half_up(y), 0, 255).astype(np.uint8))


def _rotate_hue(pixels: np.ndarray, shift_deg: float) -> np.ndarray:
    """Rotate hue of an (h, w, 3) uint8 array by shift_deg via RGB->HSV->RGB."""
    rgb = pixels.astype(np.float64) / 255.0
    red, green, blue = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    maxc = rgb.max(axis=-1)
    minc = rgb.min(axis=-1)
    delta = maxc - minc

    # hue in units of 60 degrees, range [0, 6)
    hue = np.zeros_like(maxc)
    chromatic = delta > 0
    with np.errstate(invalid="ignore", divide="ignore"):
        is_r = chromatic & (maxc == red)
        is_g = chromatic & (maxc == green) & ~is_r
        is_b = chromatic & ~is_r & ~is_g
        hue[is_r] = np.mod((green[is_r] - blue[is_r]) / delta[is_r], 6.0)
        hue[is_g] = (blue[is_g] - red[is_g]) / delta[is_g] + 2.0
        hue[is_b] = (red[is_b] - green[is_b]) / delta[is_b] + 4.0

    hue = np.mod(hue + shift_deg / 60.0, 6.0)

    # HSV back to RGB; chroma c equals delta, value and saturation are unchanged
    c = delta
    x = c * (1.0 - np.abs(np.mod(hue, 2.0) - 1.0))
    m = maxc - c
    sector = np.floor(hue).astype(np.intp) % 6
    zero = np.zeros_like(c)
    conds = [sector == i for i in range(6)]
    red_out = np.select(conds, [c, x, zero, zero, x, c]) + m
    green_out = np.select(conds, [x, c, c, x, zero, zero]) + m
    blue_out = np.select(conds, [zero, zero, x, c, c, x]) + m
    out = np.stack([red_out, green_out, blue_out], axis=-1) * 255.0
    return np.clip(_round_half_up(out), 0, 255).astype(np.uint8)


def hue_jitter(r: Raster, seed: int, probability: float = 0.25, max_shift_deg: float = 30.0) -> Raster:
    """Randomly rotate the hue of every pixel, with the given probability.

    Draw order from the seeded stream: (1) u in [0,1); if u >= probability the
    input is returned unchanged; (2) otherwise a shift uniform in
    [-max_shift_deg, +max_shift_deg] is drawn and applied in HSV space.
    Achromatic pixels (R == G == B) are unaffected by any shift.
    """
    if not 0.0 <= probability <= 1.0:
        raise InvalidParameter(f"probability must be in [0, 1], got {probability}")
    if not 0.0 <= max_shift_deg <= 180.0:
        raise InvalidParameter(f"max_shift_deg must be in [0, 180], got {max_shift_deg}")
    prng = Prng(seed)
    if prng.random() >= probability:
        return r.copy()
    shift = prng.uniform(-max_shift_deg, max_shift_deg)
    if shift == 0.0:
        return r.copy()
    return Raster(_rotate_hue(r.pixels, shift))
