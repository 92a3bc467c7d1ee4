"""Frame rendering for stroke timelines.

Each stroke is rendered as an alpha layer confined to its bounding window and
composited source-over onto a white float canvas in drawing order; frames are
quantized to 8-bit at the end. Pen layers use distance-based coverage (round
caps and joins fall out of the distance to the polyline). Brush layers are
the product of stamp transmittances along the path.

:func:`render_sequence` bakes finished strokes into a base canvas and only
redraws the active one, but runs exactly the same arithmetic as
:func:`render_frame`, so the two agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import FrameOutOfRange, InvalidBrush
from .svgpath import CUBIC, DEFAULT_TOLERANCE, MOVE, RGB, PathCommand, Polyline, SketchDocument, Stroke, flatten, prefix
from .timeline import RenderPlan, Timeline, compile_timeline, reveal_at

WHITE = (255, 255, 255)


@dataclass(frozen=True, eq=False)
class Frame:
    """One RGB frame, ``pixels`` shaped (H, W, 3) uint8."""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if p.dtype != np.uint8 or p.ndim != 3 or p.shape[2] != 3:
            raise ValueError(f"frame pixels must be (H, W, 3) uint8, got {p.shape} {p.dtype}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def tobytes(self) -> bytes:
        return np.ascontiguousarray(self.pixels).tobytes()

    def __eq__(self, other):
        return isinstance(other, Frame) and self.pixels.shape == other.pixels.shape \
            and np.array_equal(self.pixels, other.pixels)

    @classmethod
    def blank(cls, width: int, height: int, color: RGB = WHITE) -> "Frame":
        px = np.empty((height, width, 3), dtype=np.uint8)
        px[:] = color
        return cls(px)


@dataclass(eq=False)
class FrameSequence:
    pixels: np.ndarray  # (K, H, W, 3) uint8
    plan: RenderPlan | None = None
    timeline: Timeline | None = None

    def __post_init__(self):
        if self.pixels.ndim != 4 or self.pixels.shape[3] != 3 or self.pixels.dtype != np.uint8:
            raise ValueError("sequence pixels must be (K, H, W, 3) uint8")

    def __len__(self):
        return self.pixels.shape[0]

    def __getitem__(self, i) -> Frame:
        return Frame(self.pixels[i])

    def __iter__(self) -> Iterator[Frame]:
        return (Frame(p) for p in self.pixels)

    @property
    def frames(self) -> list[Frame]:
        return list(self)

    @classmethod
    def from_frames(cls, frames: Sequence[Frame], plan=None, timeline=None) -> "FrameSequence":
        shapes = {f.pixels.shape for f in frames}
        if len(shapes) != 1:
            raise ValueError(f"frames must share dimensions, got {sorted(shapes)}")
        return cls(np.stack([f.pixels for f in frames]), plan, timeline)


@dataclass(frozen=True, eq=False)
class Brush:
    id: str
    stamp: np.ndarray  # square uint8 alpha bitmap
    diameter: float
    spacing_factor: float = 0.25

    def __post_init__(self):
        s = self.stamp
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.dtype != np.uint8:
            raise InvalidBrush(f"brush {self.id}: stamp must be a square uint8 bitmap")
        if not 16 <= s.shape[0] <= 128:
            raise InvalidBrush(f"brush {self.id}: stamp side {s.shape[0]} outside 16..128")
        if not s.any():
            raise InvalidBrush(f"brush {self.id}: stamp is fully transparent")
        if not 0 < self.spacing_factor <= 1:
            raise InvalidBrush(f"brush {self.id}: spacing_factor must be in (0, 1]")
        if not self.diameter > 0:
            raise InvalidBrush(f"brush {self.id}: diameter must be positive")

    @property
    def spacing(self) -> float:
        return self.spacing_factor * self.diameter


@dataclass(frozen=True)
class Style:
    """Pen when ``brush`` is None (``color`` overrides the stroke colors if set)."""

    brush: Brush | None = None
    color: RGB | None = None

    @property
    def is_pen(self) -> bool:
        return self.brush is None


PEN = Style()


# ---------------------------------------------------------------------------
# layers

def _window(bounds_lo, bounds_hi, margin: float, width: int, height: int):
    x0 = max(0, math.floor(bounds_lo[0] - margin))
    y0 = max(0, math.floor(bounds_lo[1] - margin))
    x1 = min(width, math.ceil(bounds_hi[0] + margin) + 1)
    y1 = min(height, math.ceil(bounds_hi[1] + margin) + 1)
    return x0, y0, max(x0, x1), max(y0, y1)


def segment_distance(px: np.ndarray, py: np.ndarray, p, q) -> np.ndarray:
    """Euclidean distance from points (px, py) to segment pq."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    len2 = dx * dx + dy * dy
    ax, ay = px - p[0], py - p[1]
    if len2 > 0:
        t = np.clip((ax * dx + ay * dy) / len2, 0.0, 1.0)
        ax = ax - t * dx
        ay = ay - t * dy
    return np.sqrt(ax * ax + ay * ay)


class _PenLayer:
    """Distance field of a stroke prefix; full segments are committed once."""

    def __init__(self, poly: Polyline, width_px: float, W: int, H: int):
        self.poly = poly
        self.half = width_px / 2
        self.reach = self.half + 1.0
        pts = poly.points
        self.win = _window(pts.min(axis=0), pts.max(axis=0), self.reach, W, H)
        x0, y0, x1, y1 = self.win
        self.dist = np.full((y1 - y0, x1 - x0), np.inf)
        self.done = 0  # number of committed vertices (segments done - 1)

    def _add(self, buf, p, q):
        x0, y0, x1, y1 = self.win
        wx0, wy0, wx1, wy1 = _window((min(p[0], q[0]), min(p[1], q[1])),
                                     (max(p[0], q[0]), max(p[1], q[1])), self.reach, x1, y1)
        wx0, wy0 = max(wx0, x0), max(wy0, y0)
        if wx1 <= wx0 or wy1 <= wy0:
            return
        cols = np.arange(wx0, wx1) + 0.5
        rows = np.arange(wy0, wy1) + 0.5
        d = segment_distance(cols[None, :], rows[:, None], p, q)
        sub = buf[wy0 - y0:wy1 - y0, wx0 - x0:wx1 - x0]
        np.minimum(sub, d, out=sub)

    def alpha(self, r: float) -> np.ndarray:
        pts = self.poly.points
        if r >= 1.0:
            n_full, tail = len(pts), None
        else:
            pre = prefix(self.poly, r)
            n_full, tail = len(pre.points) - 1, tuple(pre.points[-1])
        if n_full < 1:
            n_full = 1
        start = max(self.done, 1)
        for i in range(start, n_full):
            self._add(self.dist, pts[i - 1], pts[i])
        self.done = max(self.done, n_full)
        d = self.dist
        if tail is not None:
            d = d.copy()
            self._add(d, pts[n_full - 1], tail)
        return np.clip(self.half + 0.5 - d, 0.0, 1.0)


def stamp_positions(length: float, r: float, spacing: float, include_end: bool = True) -> np.ndarray:
    """Arc-length stamp positions from 0 to ``r * length`` every ``spacing`` px."""
    end = r * length
    n = math.floor(end / spacing + 1e-9)
    pos = np.arange(n + 1) * spacing
    pos = pos[pos <= end + 1e-9]
    if include_end and end - pos[-1] > 1e-9:
        pos = np.append(pos, end)
    return pos


def _path_points(poly: Polyline, arc: np.ndarray) -> np.ndarray:
    cum = poly.cumulative_lengths
    if poly.length == 0:
        return np.repeat(poly.points[:1], len(arc), axis=0)
    return np.column_stack([np.interp(arc, cum, poly.points[:, 0]), np.interp(arc, cum, poly.points[:, 1])])


class _BrushLayer:
    """Transmittance of the stamps laid so far; stamps are appended in path order."""

    def __init__(self, poly: Polyline, brush: Brush, W: int, H: int):
        self.poly = poly
        self.brush = brush
        self.radius = brush.diameter / 2
        pts = poly.points
        self.win = _window(pts.min(axis=0), pts.max(axis=0), self.radius + 1, W, H)
        x0, y0, x1, y1 = self.win
        self.trans = np.ones((y1 - y0, x1 - x0))
        self.laid = 0
        self.closed = False

    def stamp(self, cx: float, cy: float):
        x0, y0, x1, y1 = self.win
        b = self.brush
        side = b.stamp.shape[0]
        scale = side / b.diameter
        wx0, wy0, wx1, wy1 = _window((cx, cy), (cx, cy), self.radius + 1, x1, y1)
        wx0, wy0 = max(wx0, x0), max(wy0, y0)
        if wx1 <= wx0 or wy1 <= wy0:
            return
        u = np.floor((np.arange(wx0, wx1) + 0.5 - cx) * scale + side / 2).astype(np.int64)
        v = np.floor((np.arange(wy0, wy1) + 0.5 - cy) * scale + side / 2).astype(np.int64)
        okx = (u >= 0) & (u < side)
        oky = (v >= 0) & (v < side)
        a = np.zeros((len(v), len(u)))
        a[np.ix_(oky, okx)] = b.stamp[np.ix_(v[oky], u[okx])] / 255.0
        sub = self.trans[wy0 - y0:wy1 - y0, wx0 - x0:wx1 - x0]
        sub *= 1.0 - a

    def alpha(self, r: float) -> np.ndarray:
        L = self.poly.length
        # partial reveals stamp only the regular grid so later frames are supersets;
        # the exact endpoint stamp is laid once the stroke completes
        grid = stamp_positions(L, min(r, 1.0), self.brush.spacing, include_end=False)
        new = grid[self.laid:]
        for cx, cy in _path_points(self.poly, new):
            self.stamp(cx, cy)
        self.laid = len(grid)
        if r >= 1.0 and not self.closed:
            if L - grid[-1] > 1e-9:
                ex, ey = self.poly.points[-1]
                self.stamp(ex, ey)
            self.closed = True
        return 1.0 - self.trans


def _layer(stroke: Stroke, style: Style, W: int, H: int, tolerance: float):
    poly = flatten(stroke, tolerance)
    if style.is_pen:
        return _PenLayer(poly, stroke.width, W, H)
    return _BrushLayer(poly, style.brush, W, H)


def _composite(canvas: np.ndarray, win, alpha: np.ndarray, color) -> None:
    x0, y0, x1, y1 = win
    if x1 <= x0 or y1 <= y0:
        return
    sub = canvas[y0:y1, x0:x1]
    a = alpha[:, :, None]
    sub[...] = sub * (1.0 - a) + np.asarray(color, dtype=np.float64) * a


def _quantize(canvas: np.ndarray) -> np.ndarray:
    return np.floor(np.clip(canvas, 0.0, 255.0) + 0.5).astype(np.uint8)


def _color(stroke: Stroke, style: Style):
    return style.color if style.color is not None else stroke.color


# ---------------------------------------------------------------------------
# public API

def render_frame(doc: SketchDocument, tl: Timeline, frame: int, style: Style = PEN,
                 size: tuple[int, int] | None = None, tolerance: float = DEFAULT_TOLERANCE) -> Frame:
    """Render one frame: every stroke with reveal r > 0, prefix up to r, in drawing order.

    ``size`` is (width, height); defaults to the document canvas rounded to
    whole pixels.
    """
    if not 0 <= frame < tl.K:
        raise FrameOutOfRange(f"frame {frame} outside 0..{tl.K - 1}")
    W, H = size if size is not None else (round(doc.canvas_w), round(doc.canvas_h))
    canvas = np.full((H, W, 3), 255.0)
    for e in tl.entries:
        r = reveal_at(tl, e.stroke_id, frame)
        if r <= 0:
            continue
        stroke = doc.strokes[e.stroke_id]
        layer = _layer(stroke, style, W, H, tolerance)
        _composite(canvas, layer.win, layer.alpha(r), _color(stroke, style))
    return Frame(_quantize(canvas))


def render_timeline(doc: SketchDocument, tl: Timeline, style: Style = PEN,
                    size: tuple[int, int] | None = None,
                    tolerance: float = DEFAULT_TOLERANCE) -> np.ndarray:
    """All K frames of a timeline as a (K, H, W, 3) array."""
    W, H = size if size is not None else (round(doc.canvas_w), round(doc.canvas_h))
    base = np.full((H, W, 3), 255.0)
    base_u8 = _quantize(base)
    out = np.empty((tl.K, H, W, 3), dtype=np.uint8)
    entries = list(tl.entries)
    active = None  # (entry, layer)
    k = 0  # index of the next stroke to introduce
    for f in range(tl.K):
        if active is None and k < len(entries) and entries[k].intro_frame <= f:
            e = entries[k]
            active = (e, _layer(doc.strokes[e.stroke_id], style, W, H, tolerance))
            k += 1
        if active is None:
            out[f] = base_u8
            continue
        e, layer = active
        r = reveal_at(tl, e.stroke_id, f)
        color = _color(doc.strokes[e.stroke_id], style)
        x0, y0, x1, y1 = layer.win
        if r >= 1.0:
            _composite(base, layer.win, layer.alpha(1.0), color)
            base_u8[y0:y1, x0:x1] = _quantize(base[y0:y1, x0:x1])
            out[f] = base_u8
            active = None
        else:
            sub = base[y0:y1, x0:x1].copy()
            _composite(sub, (0, 0, x1 - x0, y1 - y0), layer.alpha(r), color)
            out[f] = base_u8
            out[f, y0:y1, x0:x1] = _quantize(sub)
    return out


def render_sequence(doc: SketchDocument, order: Sequence[int], plan: RenderPlan,
                    style: Style = PEN, tolerance: float = DEFAULT_TOLERANCE) -> FrameSequence:
    """Compile the timeline for ``order`` and render all of its frames.

    The document is rendered on a ``plan.width`` x ``plan.height`` raster
    without rescaling; map SVG input onto that canvas when parsing.
    """
    tl = compile_timeline(doc, order, plan, tolerance)
    pixels = render_timeline(doc, tl, style, (plan.width, plan.height), tolerance)
    return FrameSequence(pixels, plan, tl)


def render_static(doc: SketchDocument, style: Style = PEN, size: tuple[int, int] | None = None,
                  tolerance: float = DEFAULT_TOLERANCE) -> Frame:
    """The finished drawing, strokes composited in document order."""
    W, H = size if size is not None else (round(doc.canvas_w), round(doc.canvas_h))
    canvas = np.full((H, W, 3), 255.0)
    for s in doc.strokes:
        layer = _layer(s, style, W, H, tolerance)
        _composite(canvas, layer.win, layer.alpha(1.0), _color(s, style))
    return Frame(_quantize(canvas))


def stamp_stroke(frame: Frame, brush: Brush, color: RGB, poly: Polyline, r: float) -> None:
    """Stamp ``brush`` along the first ``r`` of ``poly``, compositing into ``frame`` in place.

    Stamps sit every ``brush.spacing`` px of arc length from 0 to r*L, both
    ends included; each is source-over with alpha = stamp value / 255.
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"r must lie in [0, 1], got {r}")
    H, W = frame.pixels.shape[:2]
    layer = _BrushLayer(poly, brush, W, H)
    positions = stamp_positions(poly.length, r, brush.spacing, include_end=True)
    for cx, cy in _path_points(poly, positions):
        layer.stamp(cx, cy)
    x0, y0, x1, y1 = layer.win
    sub = frame.pixels[y0:y1, x0:x1].astype(np.float64)
    _composite(sub, (0, 0, x1 - x0, y1 - y0), 1.0 - layer.trans, color)
    frame.pixels[y0:y1, x0:x1] = _quantize(sub)


def exemplar_box(plan: RenderPlan) -> tuple[float, float, float, float]:
    """(x, y, width, height) of the brush exemplar in the top-left corner."""
    bw = 0.12 * plan.width
    return 0.03 * plan.width, 0.03 * plan.height, bw, 0.6 * bw


def exemplar_path(brush: Brush, plan: RenderPlan) -> tuple[Polyline, float]:
    """S-curve inside the exemplar box, inset so stamps stay inside it."""
    x, y, bw, bh = exemplar_box(plan)
    diameter = min(brush.diameter, bh / 3)
    m = diameter / 2 + 1.5
    xa, xb, ya, yb = x + m, x + bw - m, y + m, y + bh - m
    ww = xb - xa
    s = Stroke(0, (PathCommand(MOVE, ((xa, yb),)),
                   PathCommand(CUBIC, ((xa + 0.75 * ww, yb), (xa + 0.25 * ww, ya), (xb, ya)))))
    return flatten(s), diameter


def conditioning_frame(brush: Brush, color: RGB, plan: RenderPlan) -> Frame:
    """Blank canvas with a short S-curve stamped by ``brush`` in the top-left corner."""
    poly, diameter = exemplar_path(brush, plan)
    sized = brush if diameter == brush.diameter else \
        Brush(brush.id, brush.stamp, diameter, brush.spacing_factor)
    frame = Frame.blank(plan.width, plan.height)
    stamp_stroke(frame, sized, color, poly, 1.0)
    return frame
