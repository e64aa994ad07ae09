"""cosmoforge: seeded mosaic assembly and evaluation of generated galaxy image sets."""

from .errors import PipelineError
from .raster import (
    GrayRaster,
    Raster,
    Rotation,
    center_square_crop,
    decode,
    encode_png,
    hue_jitter,
    read_raster,
    resize_bilinear,
    rotate,
    to_grayscale,
    write_png,
)
from .rng import Prng

__version__ = "0.1.0"
