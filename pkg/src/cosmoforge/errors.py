"""Domain exception types shared by every cosmoforge module."""


class PipelineError(Exception):
    """Base class for every domain error raised by this package."""


# --- raster ----------------------------------------------------------------

class MalformedFile(PipelineError):
    """Encoded image stream cannot be decoded."""


class UnsupportedFormat(PipelineError):
    """Encoded image is neither PNG nor JPEG."""


class ZeroDimension(PipelineError):
    """An image dimension of zero was requested or encountered."""


class InvalidParameter(PipelineError):
    """A numeric parameter is outside its documented range."""


# --- prep ------------------------------------------------------------------

class EmptyInput(PipelineError):
    """An input directory contains no candidate files."""


# --- mosaic ----------------------------------------------------------------

class EmptyPool(PipelineError):
    """A tile pool or mosaic grid has nothing to draw from."""


class InvalidScaleRange(PipelineError):
    """Tile scale range violates 0 < lo <= hi <= 1."""


class MissingTile(PipelineError):
    """A plan references a tile the loader cannot supply."""


class NonSquareTile(PipelineError):
    """A mosaic tile has unequal width and height."""


class NotEnoughBlanks(PipelineError):
    """Fewer candidates qualify as blanks than were requested."""


# --- ssim ------------------------------------------------------------------

class DimensionMismatch(PipelineError):
    """Two images or feature sets have incompatible dimensions."""


class TooSmall(PipelineError):
    """Image side is smaller than the comparison window."""


class EmptyReferences(PipelineError):
    """Similarity search was given no reference images."""


# --- fid -------------------------------------------------------------------

class EmptyFeatureSet(PipelineError):
    """A feature matrix has no rows."""


class NonFiniteFeature(PipelineError):
    """A feature vector contains NaN or infinity."""


class NotSymmetric(PipelineError):
    """Matrix expected to be symmetric is not, beyond tolerance."""


class NoConvergence(PipelineError):
    """Eigendecomposition failed to converge within the sweep limit."""


class BadMagic(PipelineError):
    """Feature file does not start with the expected magic/version."""


class TruncatedFile(PipelineError):
    """Feature file ends before the payload promised by its header."""


class DimMismatch(PipelineError):
    """Feature file header declares an impossible geometry."""


# --- classdist -------------------------------------------------------------

class EmptyLabels(PipelineError):
    """A label list is empty."""


class UnknownClass(PipelineError):
    """A label is outside the {spiral, elliptical, irregular} vocabulary."""


class IncompatibleVocabulary(PipelineError):
    """Two distributions do not share the same class vocabulary."""


class ZeroExpected(PipelineError):
    """Chi-square comparison has a class with zero expected count."""


# --- detect ----------------------------------------------------------------

class MalformedJson(PipelineError):
    """Detections file is not valid JSON of the documented shape."""


class NegativeDimension(PipelineError):
    """A detection box has non-positive width or height."""
