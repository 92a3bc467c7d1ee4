"""SVG path parsing and stroke geometry.

Parses a strict subset of SVG (``svg``/``g``/``path``) into an ordered
:class:`SketchDocument`, and flattens strokes into :class:`Polyline` objects
that the timeline and raster modules consume.

Document order is drawing order: the n-th ``path`` element in the source
becomes stroke ``n``.
"""

from __future__ import annotations

import math
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    DegeneratePath,
    MalformedDocument,
    MalformedPathData,
    NoStrokes,
    UnsupportedFeature,
    ZeroLength,
)

DEFAULT_TOLERANCE = 0.25
DEFAULT_STROKE_WIDTH = 3.0
DEFAULT_COLOR = (0, 0, 0)

MOVE, LINE, CUBIC, QUAD, ARC, CLOSE = "MoveTo", "LineTo", "CubicTo", "QuadTo", "ArcTo", "ClosePath"

Point = tuple[float, float]
RGB = tuple[int, int, int]


@dataclass(frozen=True)
class PathCommand:
    """One absolute path command.

    ``points`` holds 1 pair for MoveTo/LineTo/ArcTo (the endpoint), 2 for
    QuadTo, 3 for CubicTo and none for ClosePath. Arc parameters live in the
    dedicated fields and are ``None`` for every other kind.
    """

    kind: str
    points: tuple[Point, ...] = ()
    radii: Point | None = None
    rotation: float | None = None
    large_arc: bool | None = None
    sweep: bool | None = None

    def __post_init__(self):
        expected = {MOVE: 1, LINE: 1, CUBIC: 3, QUAD: 2, ARC: 1, CLOSE: 0}
        if self.kind not in expected:
            raise ValueError(f"unknown command kind {self.kind!r}")
        if len(self.points) != expected[self.kind]:
            raise ValueError(f"{self.kind} takes {expected[self.kind]} point(s), got {len(self.points)}")
        if self.kind == ARC and (self.radii is None or self.radii[0] <= 0 or self.radii[1] <= 0):
            raise ValueError("ArcTo radii must be strictly positive")

    @property
    def end(self) -> Point | None:
        return self.points[-1] if self.points else None


@dataclass(frozen=True)
class Stroke:
    id: int
    commands: tuple[PathCommand, ...]
    width: float = DEFAULT_STROKE_WIDTH
    color: RGB = DEFAULT_COLOR
    brush_id: str | None = None

    def __post_init__(self):
        if not self.commands or self.commands[0].kind != MOVE:
            raise MalformedPathData(f"stroke {self.id}: first command must be MoveTo")
        if not any(c.kind != MOVE for c in self.commands[1:]):
            raise MalformedPathData(f"stroke {self.id}: no drawing command after MoveTo")
        if not self.width > 0:
            raise ValueError(f"stroke {self.id}: width must be positive")


@dataclass(frozen=True)
class SketchDocument:
    canvas_w: float
    canvas_h: float
    strokes: tuple[Stroke, ...]
    name: str = "sketch"
    warnings: int = field(default=0, compare=False)

    def __post_init__(self):
        if not self.strokes:
            raise NoStrokes("document has no strokes")
        for i, s in enumerate(self.strokes):
            if s.id != i:
                raise ValueError(f"stroke ids must be contiguous 0..S-1; position {i} has id {s.id}")

    def __len__(self):
        return len(self.strokes)

    def out_of_canvas(self, tolerance: float = DEFAULT_TOLERANCE, slack: float = 0.5) -> list[int]:
        """Ids of strokes with flattened points outside the canvas (beyond ``slack`` px)."""
        bad = []
        for s in self.strokes:
            pts = flatten(s, tolerance).points
            if (pts.min(axis=0) < -slack).any() or pts[:, 0].max() > self.canvas_w + slack \
                    or pts[:, 1].max() > self.canvas_h + slack:
                bad.append(s.id)
        return bad


class Polyline:
    """Flattened stroke: ordered vertices plus cumulative arc length."""

    __slots__ = ("points", "cumulative_lengths")

    def __init__(self, points):
        pts = np.array(points, dtype=np.float64).reshape(-1, 2)
        if len(pts) == 0:
            raise ValueError("polyline needs at least one point")
        seg = np.hypot(*np.diff(pts, axis=0).T) if len(pts) > 1 else np.zeros(0)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        pts.setflags(write=False)
        cum.setflags(write=False)
        self.points = pts
        self.cumulative_lengths = cum

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        return f"Polyline(n={len(self.points)}, length={self.length:.3f})"

    @property
    def length(self) -> float:
        return float(self.cumulative_lengths[-1])


# ---------------------------------------------------------------------------
# path data

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_ARGC = {"M": 2, "L": 2, "H": 1, "V": 1, "C": 6, "S": 4, "Q": 4, "T": 2, "A": 7, "Z": 0}


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip(self, comma=True):
        t = self.text
        while self.pos < len(t) and (t[self.pos].isspace() or (comma and t[self.pos] == ",")):
            self.pos += 1

    def at_end(self) -> bool:
        self._skip()
        return self.pos >= len(self.text)

    def peek_command(self) -> str | None:
        self._skip()
        if self.pos < len(self.text) and self.text[self.pos].upper() in _ARGC:
            return self.text[self.pos]
        return None

    def command(self) -> str:
        c = self.peek_command()
        if c is None:
            raise MalformedPathData(f"expected a command letter at offset {self.pos}: {self.text[self.pos:self.pos + 12]!r}")
        self.pos += 1
        return c

    def number(self) -> float:
        self._skip()
        m = _NUMBER.match(self.text, self.pos)
        if not m:
            raise MalformedPathData(f"expected a number at offset {self.pos}: {self.text[self.pos:self.pos + 12]!r}")
        self.pos = m.end()
        return float(m.group())

    def flag(self) -> bool:
        # arc flags may be packed without separators, e.g. "a1 1 0 1010 10"
        self._skip()
        if self.pos < len(self.text) and self.text[self.pos] in "01":
            self.pos += 1
            return self.text[self.pos - 1] == "1"
        raise MalformedPathData(f"expected an arc flag at offset {self.pos}")

    def has_number(self) -> bool:
        self._skip()
        return bool(_NUMBER.match(self.text, self.pos))


def parse_path_data(d: str) -> list[list[PathCommand]]:
    """Parse ``d`` into absolute commands, one list per subpath.

    S/T shorthands are expanded into C/Q; H/V become LineTo; zero-radius arcs
    become LineTo, as the SVG implementation notes prescribe.
    """
    sc = _Scanner(d)
    subpaths: list[list[PathCommand]] = []
    cur: list[PathCommand] | None = None
    x = y = 0.0
    start = (0.0, 0.0)
    prev_kind = None
    prev_ctrl: Point | None = None

    if sc.at_end():
        raise MalformedPathData("empty path data")

    while not sc.at_end():
        letter = sc.command()
        op, rel = letter.upper(), letter.islower()
        if cur is None and op != "M":
            raise MalformedPathData("path data must begin with a moveto")
        first = True
        while first or (op != "Z" and sc.has_number()):
            ox, oy = (x, y) if rel else (0.0, 0.0)
            if op == "M":
                px, py = sc.number() + ox, sc.number() + oy
                if first:
                    cur = [PathCommand(MOVE, ((px, py),))]
                    subpaths.append(cur)
                    start = (px, py)
                    op_kind = MOVE
                else:
                    cur.append(PathCommand(LINE, ((px, py),)))
                    op_kind = LINE
                x, y = px, py
                prev_ctrl = None
            elif op == "Z":
                cur.append(PathCommand(CLOSE))
                x, y = start
                op_kind = CLOSE
                prev_ctrl = None
            else:
                if cur is None or (prev_kind == CLOSE):
                    # drawing after closepath restarts at the subpath start
                    cur = [PathCommand(MOVE, (start,))]
                    subpaths.append(cur)
                if op == "L":
                    x, y = sc.number() + ox, sc.number() + oy
                    cur.append(PathCommand(LINE, ((x, y),)))
                    op_kind, prev_ctrl = LINE, None
                elif op == "H":
                    x = sc.number() + ox
                    cur.append(PathCommand(LINE, ((x, y),)))
                    op_kind, prev_ctrl = LINE, None
                elif op == "V":
                    y = sc.number() + oy
                    cur.append(PathCommand(LINE, ((x, y),)))
                    op_kind, prev_ctrl = LINE, None
                elif op in "CS":
                    if op == "C":
                        c1 = (sc.number() + ox, sc.number() + oy)
                    else:
                        c1 = (2 * x - prev_ctrl[0], 2 * y - prev_ctrl[1]) \
                            if prev_kind == CUBIC and prev_ctrl else (x, y)
                    c2 = (sc.number() + ox, sc.number() + oy)
                    x, y = sc.number() + ox, sc.number() + oy
                    cur.append(PathCommand(CUBIC, (c1, c2, (x, y))))
                    op_kind, prev_ctrl = CUBIC, c2
                elif op in "QT":
                    if op == "Q":
                        c1 = (sc.number() + ox, sc.number() + oy)
                    else:
                        c1 = (2 * x - prev_ctrl[0], 2 * y - prev_ctrl[1]) \
                            if prev_kind == QUAD and prev_ctrl else (x, y)
                    x, y = sc.number() + ox, sc.number() + oy
                    cur.append(PathCommand(QUAD, (c1, (x, y))))
                    op_kind, prev_ctrl = QUAD, c1
                elif op == "A":
                    rx, ry, rot = abs(sc.number()), abs(sc.number()), sc.number()
                    large, sweep = sc.flag(), sc.flag()
                    x, y = sc.number() + ox, sc.number() + oy
                    if rx == 0 or ry == 0:
                        cur.append(PathCommand(LINE, ((x, y),)))
                        op_kind = LINE
                    else:
                        cur.append(PathCommand(ARC, ((x, y),), radii=(rx, ry), rotation=rot,
                                               large_arc=large, sweep=sweep))
                        op_kind = ARC
                    prev_ctrl = None
            prev_kind = op_kind
            first = False
    return subpaths


# ---------------------------------------------------------------------------
# document parsing

_NAMED_COLORS = {
    "black": (0, 0, 0), "white": (255, 255, 255), "red": (255, 0, 0), "green": (0, 128, 0),
    "lime": (0, 255, 0), "blue": (0, 0, 255), "gray": (128, 128, 128), "grey": (128, 128, 128),
    "yellow": (255, 255, 0), "orange": (255, 165, 0), "purple": (128, 0, 128), "brown": (165, 42, 42),
}
_SKIPPABLE = {"title", "desc", "metadata", "defs", "style"}
_LENGTH = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(px)?\s*$")


def parse_color(value: str) -> RGB | None:
    """Parse an SVG paint value. Returns None for ``none``; raises ValueError if unknown."""
    v = value.strip().lower()
    if v == "none":
        return None
    if v in _NAMED_COLORS:
        return _NAMED_COLORS[v]
    if re.fullmatch(r"#[0-9a-f]{3}", v):
        return tuple(int(c * 2, 16) for c in v[1:])
    if re.fullmatch(r"#[0-9a-f]{6}", v):
        return tuple(int(v[i:i + 2], 16) for i in (1, 3, 5))
    m = re.fullmatch(r"rgb\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)", v)
    if m:
        return tuple(min(255, int(g)) for g in m.groups())
    raise ValueError(f"unsupported color {value!r}")


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _length(value: str | None) -> float | None:
    if value is None:
        return None
    m = _LENGTH.match(value)
    if not m:
        raise MalformedDocument(f"unsupported length {value!r} (only unitless or px)")
    return float(m.group(1))


def _presentation(el: ET.Element, inherited: dict) -> dict:
    attrs = dict(inherited)
    for key in ("stroke", "stroke-width"):
        if key in el.attrib:
            attrs[key] = el.attrib[key]
    style = el.attrib.get("style")
    if style:
        for decl in style.split(";"):
            if ":" in decl:
                k, v = (s.strip() for s in decl.split(":", 1))
                if k in ("stroke", "stroke-width"):
                    attrs[k] = v
    return attrs


def _walk(el: ET.Element, inherited: dict) -> Iterator[tuple[str, ET.Element, dict]]:
    for child in el:
        tag = _local(child.tag)
        attrs = _presentation(child, inherited)
        if tag == "g":
            yield "group", child, attrs
            yield from _walk(child, attrs)
        else:
            yield tag, child, attrs


def _map_command(cmd: PathCommand, scale: float, tx: float, ty: float) -> PathCommand:
    pts = tuple((scale * px + tx, scale * py + ty) for px, py in cmd.points)
    if cmd.kind == ARC:
        return PathCommand(ARC, pts, radii=(cmd.radii[0] * scale, cmd.radii[1] * scale),
                           rotation=cmd.rotation, large_arc=cmd.large_arc, sweep=cmd.sweep)
    return PathCommand(cmd.kind, pts)


def parse_svg(text: str, strict: bool = True, canvas: tuple[float, float] | None = None,
              name: str = "sketch") -> SketchDocument:
    """Parse SVG text into a :class:`SketchDocument`.

    ``canvas`` (width, height) overrides the document's own size; the viewBox
    (or width/height box) is then scaled uniformly to fit and centered.
    Unsupported elements raise :class:`UnsupportedFeature` when ``strict``;
    otherwise they are skipped and counted in ``SketchDocument.warnings``.
    """
    try:
        root = ET.fromstring(text)
    except ET.ParseError as e:
        raise MalformedDocument(f"unparseable markup: {e}") from e
    if _local(root.tag) != "svg":
        raise MalformedDocument(f"root element is <{_local(root.tag)}>, expected <svg>")

    vb = root.attrib.get("viewBox")
    if vb is not None:
        try:
            minx, miny, vw, vh = (float(v) for v in re.split(r"[\s,]+", vb.strip()))
        except ValueError as e:
            raise MalformedDocument(f"bad viewBox {vb!r}") from e
        if vw <= 0 or vh <= 0:
            raise MalformedDocument(f"viewBox must have positive size: {vb!r}")
        try:
            doc_w, doc_h = _length(root.attrib.get("width")), _length(root.attrib.get("height"))
        except MalformedDocument:
            doc_w = doc_h = None
        doc_w = doc_w if doc_w else vw
        doc_h = doc_h if doc_h else vh
    else:
        doc_w, doc_h = _length(root.attrib.get("width")), _length(root.attrib.get("height"))
        if not doc_w or not doc_h:
            raise MalformedDocument("svg root needs width/height or a viewBox")
        minx, miny, vw, vh = 0.0, 0.0, doc_w, doc_h

    cw, ch = canvas if canvas is not None else (doc_w, doc_h)
    scale = min(cw / vw, ch / vh)
    tx = (cw - scale * vw) / 2 - scale * minx
    ty = (ch - scale * vh) / 2 - scale * miny

    warnings = 0
    strokes: list[Stroke] = []

    def reject(msg: str):
        nonlocal warnings
        if strict:
            raise UnsupportedFeature(msg)
        warnings += 1

    for tag, el, attrs in _walk(root, {}):
        if tag == "group" or tag in _SKIPPABLE:
            if "transform" in el.attrib:
                reject(f"transform on <{_local(el.tag)}> is not supported")
            continue
        if tag != "path":
            reject(f"unsupported element <{tag}>")
            continue
        if "transform" in el.attrib:
            reject("transform on <path> is not supported")
            continue
        d = el.attrib.get("d")
        if d is None or not d.strip():
            reject("<path> without d data")
            continue
        subpaths = parse_path_data(d)
        drawn = [sp for sp in subpaths if len(sp) > 1]
        if len(drawn) < len(subpaths):
            reject("moveto-only subpath")
        if not drawn:
            continue
        if len(drawn) > 1:
            reject("path with multiple subpaths")
        try:
            color = parse_color(attrs.get("stroke", "black"))
        except ValueError as e:
            reject(str(e))
            color = DEFAULT_COLOR
        if color is None:
            reject("path with stroke=none")
            continue
        width = DEFAULT_STROKE_WIDTH
        if "stroke-width" in attrs:
            w = _length(attrs["stroke-width"])
            if w is None or w <= 0:
                raise MalformedDocument(f"bad stroke-width {attrs['stroke-width']!r}")
            width = w * scale
        for sp in drawn:
            cmds = tuple(_map_command(c, scale, tx, ty) for c in sp)
            strokes.append(Stroke(len(strokes), cmds, width=width, color=color))

    if not strokes:
        raise NoStrokes("document contains no stroked paths")
    doc = SketchDocument(cw, ch, tuple(strokes), name=name, warnings=warnings)
    outside = doc.out_of_canvas()
    if outside and strict:
        raise MalformedDocument(f"strokes {outside} extend beyond the canvas")
    return doc


# ---------------------------------------------------------------------------
# flattening

def _bezier_points(ctrl: np.ndarray, tolerance: float) -> np.ndarray:
    """Uniformly subdivide a Bezier with a segment count from Wang's bound.

    For a degree-n curve, chord error of uniform subdivision into k pieces is
    at most n(n-1)/8 * max|second difference| / k^2.
    """
    n = len(ctrl) - 1
    second = ctrl[2:] - 2 * ctrl[1:-1] + ctrl[:-2]
    m = n * (n - 1) * float(np.hypot(second[:, 0], second[:, 1]).max())
    k = max(1, math.ceil(math.sqrt(m / (8 * tolerance)))) if m > 0 else 1
    t = np.linspace(0.0, 1.0, k + 1)[1:, None]
    s = 1 - t
    if n == 3:
        pts = s**3 * ctrl[0] + 3 * s * s * t * ctrl[1] + 3 * s * t * t * ctrl[2] + t**3 * ctrl[3]
    else:
        pts = s * s * ctrl[0] + 2 * s * t * ctrl[1] + t * t * ctrl[2]
    pts[-1] = ctrl[-1]
    return pts


def arc_center(p0: Point, cmd: PathCommand):
    """Endpoint-to-center conversion for an ArcTo.

    Returns (cx, cy, rx, ry, phi, theta1, dtheta) with radii scaled up when
    too small to span the endpoints.
    """
    x1, y1 = p0
    x2, y2 = cmd.points[0]
    rx, ry = cmd.radii
    phi = math.radians(cmd.rotation % 360.0)
    cp, sp = math.cos(phi), math.sin(phi)
    dx, dy = (x1 - x2) / 2, (y1 - y2) / 2
    x1p, y1p = cp * dx + sp * dy, -sp * dx + cp * dy
    lam = (x1p / rx) ** 2 + (y1p / ry) ** 2
    if lam > 1:
        rx, ry = rx * math.sqrt(lam), ry * math.sqrt(lam)
    num = rx * rx * ry * ry - rx * rx * y1p * y1p - ry * ry * x1p * x1p
    den = rx * rx * y1p * y1p + ry * ry * x1p * x1p
    coef = math.sqrt(max(0.0, num / den)) if den > 0 else 0.0
    if cmd.large_arc == cmd.sweep:
        coef = -coef
    cxp, cyp = coef * rx * y1p / ry, -coef * ry * x1p / rx
    cx = cp * cxp - sp * cyp + (x1 + x2) / 2
    cy = sp * cxp + cp * cyp + (y1 + y2) / 2

    def angle(ux, uy, vx, vy):
        a = math.atan2(ux * vy - uy * vx, ux * vx + uy * vy)
        return a

    ux, uy = (x1p - cxp) / rx, (y1p - cyp) / ry
    vx, vy = (-x1p - cxp) / rx, (-y1p - cyp) / ry
    theta1 = math.atan2(uy, ux)
    dtheta = angle(ux, uy, vx, vy)
    if not cmd.sweep and dtheta > 0:
        dtheta -= 2 * math.pi
    elif cmd.sweep and dtheta < 0:
        dtheta += 2 * math.pi
    return cx, cy, rx, ry, phi, theta1, dtheta


def _arc_points(p0: Point, cmd: PathCommand, tolerance: float) -> np.ndarray:
    end = cmd.points[0]
    if p0 == end:
        return np.empty((0, 2))
    cx, cy, rx, ry, phi, th1, dth = arc_center(p0, cmd)
    # |p''(theta)| <= max(rx, ry), so chord error <= max(rx, ry) * h^2 / 8
    step = math.sqrt(8 * tolerance / max(rx, ry))
    k = max(1, math.ceil(abs(dth) / step))
    th = th1 + dth * np.linspace(0.0, 1.0, k + 1)[1:]
    ex, ey = rx * np.cos(th), ry * np.sin(th)
    pts = np.column_stack([cx + math.cos(phi) * ex - math.sin(phi) * ey,
                           cy + math.sin(phi) * ex + math.cos(phi) * ey])
    pts[-1] = end
    return pts


@lru_cache(maxsize=8192)
def flatten(stroke: Stroke, tolerance: float = DEFAULT_TOLERANCE) -> Polyline:
    """Flatten a stroke to a polyline whose chordal error is at most ``tolerance``.

    Vertices always lie on the true curve and command endpoints are kept
    exactly; straight segments pass through unchanged.
    """
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    chunks: list[np.ndarray] = []
    cur = start = None
    for cmd in stroke.commands:
        if cmd.kind == MOVE:
            cur = start = cmd.points[0]
            chunks.append(np.array([cur]))
            continue
        if cmd.kind == LINE:
            pts = np.array([cmd.points[0]])
        elif cmd.kind == CLOSE:
            pts = np.array([start])
        elif cmd.kind in (CUBIC, QUAD):
            pts = _bezier_points(np.array((cur,) + cmd.points), tolerance)
        else:
            pts = _arc_points(cur, cmd, tolerance)
        if len(pts):
            chunks.append(pts)
            cur = tuple(pts[-1])
    pts = np.concatenate(chunks)
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = (pts[1:] != pts[:-1]).any(axis=1)
    pts = pts[keep]
    if len(pts) < 2:
        raise DegeneratePath(f"stroke {stroke.id}: all points coincide")
    return Polyline(pts)


def arc_length(poly: Polyline) -> float:
    return poly.length


def point_at(poly: Polyline, s: float) -> Point:
    """Point at arc-length fraction ``s`` of the polyline."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    total = poly.length
    if total <= 0:
        raise ZeroLength("polyline has zero length")
    pts, cum = poly.points, poly.cumulative_lengths
    if s == 0.0:
        return float(pts[0, 0]), float(pts[0, 1])
    if s == 1.0:
        return float(pts[-1, 0]), float(pts[-1, 1])
    target = s * total
    i = int(np.searchsorted(cum, target, side="right")) - 1
    i = min(max(i, 0), len(pts) - 2)
    seg = cum[i + 1] - cum[i]
    u = (target - cum[i]) / seg if seg > 0 else 0.0
    p = pts[i] + u * (pts[i + 1] - pts[i])
    return float(p[0]), float(p[1])


def prefix(poly: Polyline, s: float) -> Polyline:
    """Leading part of ``poly`` up to arc-length fraction ``s``."""
    if s >= 1.0:
        return poly
    if s <= 0.0 or poly.length <= 0:
        return Polyline(poly.points[:1])
    target = s * poly.length
    i = int(np.searchsorted(poly.cumulative_lengths, target, side="right"))
    end = point_at(poly, s)
    pts = np.vstack([poly.points[:i], [end]])
    return Polyline(pts)


def concat(a: Polyline, b: Polyline) -> Polyline:
    """Join two polylines sharing an endpoint (a's last == b's first)."""
    return Polyline(np.vstack([a.points, b.points[1:]]))


def stroke_from_points(stroke_id: int, points: Sequence[Point], closed: bool = False,
                       width: float = DEFAULT_STROKE_WIDTH, color: RGB = DEFAULT_COLOR) -> Stroke:
    """Build a MoveTo/LineTo stroke through ``points``."""
    cmds = [PathCommand(MOVE, (tuple(map(float, points[0])),))]
    cmds += [PathCommand(LINE, (tuple(map(float, p)),)) for p in points[1:]]
    if closed:
        cmds.append(PathCommand(CLOSE))
    return Stroke(stroke_id, tuple(cmds), width=width, color=color)


def path_data(stroke: Stroke, precision: int = 3) -> str:
    """Serialize a stroke back to absolute SVG path data."""
    f = lambda v: f"{round(v, precision):g}"
    out = []
    for c in stroke.commands:
        if c.kind == CLOSE:
            out.append("Z")
        elif c.kind == ARC:
            (x, y), = c.points
            out.append(f"A{f(c.radii[0])} {f(c.radii[1])} {f(c.rotation)} "
                       f"{int(c.large_arc)} {int(c.sweep)} {f(x)} {f(y)}")
        else:
            letter = {MOVE: "M", LINE: "L", CUBIC: "C", QUAD: "Q"}[c.kind]
            out.append(letter + " ".join(f"{f(x)} {f(y)}" for x, y in c.points))
    return " ".join(out)


def document_to_json(doc: SketchDocument) -> dict:
    """Lossless JSON form (floats round-trip exactly through ``json``)."""
    def cmd(c: PathCommand) -> dict:
        d = {"kind": c.kind, "points": [list(p) for p in c.points]}
        if c.kind == ARC:
            d.update(radii=list(c.radii), rotation=c.rotation, large_arc=c.large_arc, sweep=c.sweep)
        return d

    return {
        "canvas": [doc.canvas_w, doc.canvas_h],
        "name": doc.name,
        "strokes": [{"id": s.id, "width": s.width, "color": list(s.color), "brush_id": s.brush_id,
                     "commands": [cmd(c) for c in s.commands]} for s in doc.strokes],
    }


def document_from_json(data: dict) -> SketchDocument:
    def cmd(d: dict) -> PathCommand:
        pts = tuple(tuple(p) for p in d["points"])
        if d["kind"] == ARC:
            return PathCommand(ARC, pts, tuple(d["radii"]), d["rotation"], d["large_arc"], d["sweep"])
        return PathCommand(d["kind"], pts)

    try:
        strokes = tuple(Stroke(s["id"], tuple(cmd(c) for c in s["commands"]), s["width"], tuple(s["color"]),
                               s.get("brush_id")) for s in data["strokes"])
        return SketchDocument(data["canvas"][0], data["canvas"][1], strokes, data.get("name", "sketch"))
    except (KeyError, IndexError, TypeError) as exc:
        raise MalformedDocument(f"not a sketch document: {exc!r}") from exc
