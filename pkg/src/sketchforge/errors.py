"""Exception types shared across sketchforge modules.

Everything a caller can reasonably recover from derives from
:class:`SketchforgeError`; the CLI maps those to exit code 2.
"""


class SketchforgeError(Exception):
    pass


# svgpath
class MalformedDocument(SketchforgeError, ValueError):
    pass


class MalformedPathData(SketchforgeError, ValueError):
    pass


class UnsupportedFeature(SketchforgeError, ValueError):
    pass


class NoStrokes(SketchforgeError, ValueError):
    pass


class DegeneratePath(SketchforgeError, ValueError):
    pass


class ZeroLength(SketchforgeError, ValueError):
    pass


# shapes
class InvalidSizeRange(SketchforgeError, ValueError):
    pass


class PlacementFailure(SketchforgeError, RuntimeError):
    pass


class TooManyOrders(SketchforgeError, ValueError):
    pass


class NotAPermutation(SketchforgeError, ValueError):
    pass


# timeline / raster
class InvalidRenderPlan(SketchforgeError, ValueError):
    pass


class InsufficientFrames(SketchforgeError, ValueError):
    pass


class UnknownStroke(SketchforgeError, KeyError):
    pass


class FrameOutOfRange(SketchforgeError, IndexError):
    pass


class InvalidBrush(SketchforgeError, ValueError):
    pass


# prompts
class LengthMismatch(SketchforgeError, ValueError):
    pass


class EmptySubject(SketchforgeError, ValueError):
    pass


class InvalidDrawPlan(SketchforgeError, ValueError):
    pass


# dataset
class IoFailure(SketchforgeError, OSError):
    pass


class MissingAsset(SketchforgeError, FileNotFoundError):
    pass


class SchemaViolation(SketchforgeError, ValueError):
    pass


class DuplicateId(SketchforgeError, ValueError):
    pass


# evalkit
class DimensionMismatch(SketchforgeError, ValueError):
    pass


class EmptyMask(SketchforgeError, ValueError):
    pass


class BlankVideo(SketchforgeError, ValueError):
    pass


# flowmatch
class ShapeMismatch(SketchforgeError, ValueError):
    pass


class TOutOfRange(SketchforgeError, ValueError):
    pass


class NonFiniteState(SketchforgeError, FloatingPointError):
    pass
