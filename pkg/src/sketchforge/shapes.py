"""Procedural primitive compositions for ordering-focused training data.

A composition is a handful of outline primitives arranged by one of four
spatial relations (containment, adjacency, overlap, grouping), with a
bounding region per stroke and a short name/description per stroke for
prompt building.

Layouts are rejection-sampled. Besides the relation predicate, every
accepted layout satisfies two rendering constraints:

* no stroke crosses another stroke (overlap is drawn as occlusion: the
  shape behind stops just short of the front outline), so a frame's new ink
  never gets cut in two by older ink;
* each stroke's region is *separable*: the stroke alone inks well over the
  activation share of its region, while all other strokes together ink well
  under it. That keeps region-based order extraction exact for any order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import InvalidSizeRange, PlacementFailure, TooManyOrders
from .svgpath import (
    ARC, CLOSE, CUBIC, LINE, MOVE, DEFAULT_TOLERANCE, PathCommand, Polyline, SketchDocument, Stroke,
    flatten, stroke_from_points,
)

KINDS = ("circle", "ellipse", "triangle", "rectangle", "polygon", "curve", "line")
CLOSED_KINDS = ("circle", "ellipse", "triangle", "rectangle", "polygon")
DEFAULT_CANVAS = (832, 480)
STROKE_WIDTH = 3.0
ATTEMPTS = 1000
ACTIVATION_FRACTION = 0.05

Box = tuple[float, float, float, float]


class Relation(str, Enum):
    CONTAINMENT = "containment"
    ADJACENCY = "adjacency"
    OVERLAP = "overlap"
    GROUPING = "grouping"


@dataclass(frozen=True)
class Primitive:
    kind: str
    params: dict
    center: tuple[float, float]
    rotation: float
    semantic_name: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": self.params, "center": list(self.center),
                "rotation": self.rotation, "semantic_name": self.semantic_name}

    @classmethod
    def from_json(cls, d: dict) -> "Primitive":
        params = {k: ([tuple(p) for p in v] if isinstance(v, list) else v) for k, v in d["params"].items()}
        return cls(d["kind"], params, tuple(d["center"]), d["rotation"], d["semantic_name"])


@dataclass(frozen=True)
class Composition:
    document: SketchDocument
    relation: Relation | None
    regions: tuple[Box, ...]
    steps: tuple[tuple[str, str], ...]
    seed: int
    primitives: tuple[Primitive, ...] = field(default=(), compare=False)

    @property
    def n(self) -> int:
        return len(self.document.strokes)


# ---------------------------------------------------------------------------
# geometry helpers

def _rot(points: np.ndarray, deg: float) -> np.ndarray:
    a = math.radians(deg)
    c, s = math.cos(a), math.sin(a)
    return points @ np.array([[c, s], [-s, c]])


def stroke_region(stroke: Stroke, tolerance: float = DEFAULT_TOLERANCE) -> Box:
    """Bounding box of the flattened stroke, grown by half the stroke width."""
    pts = flatten(stroke, tolerance).points
    h = stroke.width / 2
    x0, y0 = pts.min(axis=0)
    x1, y1 = pts.max(axis=0)
    return (float(x0 - h), float(y0 - h), float(x1 + h), float(y1 + h))


def box_area(b: Box) -> float:
    return max(0.0, b[2] - b[0]) * max(0.0, b[3] - b[1])


def box_intersection(a: Box, b: Box) -> float:
    return max(0.0, min(a[2], b[2]) - max(a[0], b[0])) * max(0.0, min(a[3], b[3]) - max(a[1], b[1]))


def box_gap(a: Box, b: Box) -> float:
    dx = max(0.0, b[0] - a[2], a[0] - b[2])
    dy = max(0.0, b[1] - a[3], a[1] - b[3])
    return math.hypot(dx, dy)


def box_contains(outer: Box, inner: Box, strict: bool = False) -> bool:
    if strict:
        return outer[0] < inner[0] and outer[1] < inner[1] and inner[2] < outer[2] and inner[3] < outer[3]
    return outer[0] <= inner[0] and outer[1] <= inner[1] and inner[2] <= outer[2] and inner[3] <= outer[3]


def box_centroid(b: Box) -> tuple[float, float]:
    return (b[0] + b[2]) / 2, (b[1] + b[3]) / 2


def relation_holds(relation: Relation | str, regions: Sequence[Box], canvas=DEFAULT_CANVAS) -> bool:
    """Geometric predicate of a relation, evaluated on stroke regions.

    containment: regions 1.. strictly inside region 0.
    adjacency:   no two regions intersect; consecutive regions 4..40 px apart.
    overlap:     some pair intersects with neither containing the other.
    grouping:    n >= 3, no two regions intersect, all centroids within
                 0.2 * min(canvas) of their mean.
    """
    relation = Relation(relation)
    n = len(regions)
    pairs = list(itertools.combinations(range(n), 2))
    if relation is Relation.CONTAINMENT:
        return n >= 2 and all(box_contains(regions[0], r, strict=True) for r in regions[1:])
    if relation is Relation.ADJACENCY:
        return n >= 2 and all(box_intersection(regions[i], regions[j]) == 0 for i, j in pairs) \
            and all(4 <= box_gap(regions[i], regions[i + 1]) <= 40 for i in range(n - 1))
    if relation is Relation.OVERLAP:
        return any(box_intersection(regions[i], regions[j]) > 0
                   and not box_contains(regions[i], regions[j]) and not box_contains(regions[j], regions[i])
                   for i, j in pairs)
    if n < 3 or any(box_intersection(regions[i], regions[j]) > 0 for i, j in pairs):
        return False
    cents = np.array([box_centroid(r) for r in regions])
    radius = 0.2 * min(canvas)
    return bool(np.hypot(*(cents - cents.mean(axis=0)).T).max() <= radius)


def clipped_length(points: np.ndarray, box: Box) -> float:
    """Length of the polyline inside an axis-aligned box (Liang-Barsky per segment)."""
    p, q = points[:-1], points[1:]
    d = q - p
    lo = np.zeros(len(p))
    hi = np.ones(len(p))
    for ax, (b0, b1) in enumerate(((box[0], box[2]), (box[1], box[3]))):
        dd, pp = d[:, ax], p[:, ax]
        flat = dd == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = (b0 - pp) / dd
            t2 = (b1 - pp) / dd
        tmin = np.where(flat, np.where((pp >= b0) & (pp <= b1), 0.0, 2.0), np.minimum(t1, t2))
        tmax = np.where(flat, np.where((pp >= b0) & (pp <= b1), 1.0, -1.0), np.maximum(t1, t2))
        lo = np.maximum(lo, tmin)
        hi = np.minimum(hi, tmax)
    return float((np.clip(hi - lo, 0.0, None) * np.hypot(d[:, 0], d[:, 1])).sum())


def separable(strokes: Sequence[Stroke], regions: Sequence[Box], fraction: float = ACTIVATION_FRACTION,
              own_margin: float = 1.1, cross_margin: float = 0.8) -> bool:
    """Conservative ink estimate: each region is activated by its own stroke only."""
    polys = [flatten(s) for s in strokes]
    for i, box in enumerate(regions):
        need = fraction * box_area(box)
        if strokes[i].width * polys[i].length < own_margin * need:
            return False
        cross = 0.0
        for j, s in enumerate(strokes):
            if j == i:
                continue
            g = s.width / 2 + 0.5
            grown = (box[0] - g, box[1] - g, box[2] + g, box[3] + g)
            inside = clipped_length(polys[j].points, grown)
            if inside > 0:
                cross += (s.width + 1) * inside + (s.width + 1) ** 2
        if cross > cross_margin * need:
            return False
    return True


def _point_in_polygon(pts: np.ndarray, poly: np.ndarray) -> np.ndarray:
    x, y = pts[:, 0:1], pts[:, 1:2]
    a, b = poly[None, :-1], poly[None, 1:]
    cond = (a[..., 1] > y) != (b[..., 1] > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = a[..., 0] + (y - a[..., 1]) * (b[..., 0] - a[..., 0]) / (b[..., 1] - a[..., 1])
    return (cond & (x < xint)).sum(axis=1) % 2 == 1


def _distance_to_polyline(pts: np.ndarray, poly: np.ndarray) -> np.ndarray:
    p, q = poly[:-1], poly[1:]
    d = q - p
    len2 = (d * d).sum(axis=1)
    len2[len2 == 0] = 1.0
    rel = pts[:, None, :] - p[None, :, :]
    t = np.clip((rel * d[None]).sum(axis=2) / len2[None], 0.0, 1.0)
    off = rel - t[..., None] * d[None]
    return np.sqrt((off ** 2).sum(axis=2)).min(axis=1)


# ---------------------------------------------------------------------------
# primitives

_POLY_NAMES = {5: "pentagon", 6: "hexagon", 7: "heptagon", 8: "octagon"}


def _size_word(size: float, canvas) -> str:
    rel = size / min(canvas)
    return "small" if rel < 0.18 else "medium" if rel < 0.32 else "large"


def _sample_params(kind: str, size: float, rng: np.random.Generator) -> dict:
    """Kind-specific dimensions for a primitive whose extent is about ``size`` px."""
    if kind == "circle":
        return {"radius": size / 2}
    if kind == "ellipse":
        return {"rx": size / 2, "ry": size / 2 * rng.uniform(0.45, 0.75)}
    if kind == "rectangle":
        return {"width": size, "height": size * rng.uniform(0.5, 1.0)}
    if kind == "triangle":
        ang = 90 + np.arange(3) * 120 + rng.uniform(-15, 15, 3)
        r = size / 2
        return {"vertices": [(float(r * math.cos(math.radians(a))), float(-r * math.sin(math.radians(a))))
                             for a in ang]}
    if kind == "polygon":
        m = int(rng.integers(5, 9))
        ang = np.arange(m) * 360 / m + rng.uniform(-8, 8, m)
        rad = size / 2 * rng.uniform(0.85, 1.0, m)
        return {"vertices": [(float(r * math.cos(math.radians(a))), float(r * math.sin(math.radians(a))))
                             for r, a in zip(rad, ang)]}
    if kind == "curve":
        s = rng.choice([-1.0, 1.0])
        return {"length": size, "bend1": float(s * size * rng.uniform(0.15, 0.35)),
                "bend2": float(s * rng.choice([-1.0, 1.0]) * size * rng.uniform(0.15, 0.35))}
    if kind == "line":
        return {"length": size}
    raise ValueError(f"unknown primitive kind {kind!r}")


def _scale_params(params: dict, factor: float) -> dict:
    return {k: ([(x * factor, y * factor) for x, y in v] if isinstance(v, list) else v * factor)
            for k, v in params.items()}


def _semantic_name(kind: str, params: dict, size: float, canvas) -> str:
    word = _size_word(size, canvas)
    if kind == "circle":
        noun = "circle"
    elif kind == "ellipse":
        noun = "oval"
    elif kind == "rectangle":
        noun = "square" if params["height"] / params["width"] > 0.92 else "rectangle"
    elif kind == "polygon":
        noun = _POLY_NAMES[len(params["vertices"])]
    elif kind == "curve":
        noun = "curved line"
    elif kind == "line":
        noun = "straight line"
    else:
        noun = kind
    return f"{word} {noun}"


def _commands(kind: str, params: dict, center, rotation: float) -> tuple[PathCommand, ...]:
    cx, cy = center

    def place(local):
        pts = _rot(np.asarray(local, dtype=float).reshape(-1, 2), rotation) + (cx, cy)
        return [tuple(map(float, p)) for p in pts]

    if kind in ("circle", "ellipse"):
        rx = params.get("radius", params.get("rx"))
        ry = params.get("radius", params.get("ry"))
        quads = place([(rx, 0), (0, ry), (-rx, 0), (0, -ry)])
        cmds = [PathCommand(MOVE, (quads[0],))]
        for p in quads[1:] + quads[:1]:
            cmds.append(PathCommand(ARC, (p,), radii=(rx, ry), rotation=float(rotation),
                                    large_arc=False, sweep=True))
        return tuple(cmds)
    if kind == "rectangle":
        w, h = params["width"] / 2, params["height"] / 2
        pts = place([(-w, -h), (w, -h), (w, h), (-w, h)])
    elif kind in ("triangle", "polygon"):
        pts = place(params["vertices"])
    elif kind == "curve":
        L = params["length"] / 2
        p0, c1, c2, p1 = place([(-L, 0), (-L / 3, params["bend1"]), (L / 3, params["bend2"]), (L, 0)])
        return (PathCommand(MOVE, (p0,)), PathCommand(CUBIC, (c1, c2, p1)))
    elif kind == "line":
        L = params["length"] / 2
        p0, p1 = place([(-L, 0), (L, 0)])
        return (PathCommand(MOVE, (p0,)), PathCommand(LINE, (p1,)))
    else:
        raise ValueError(f"unknown primitive kind {kind!r}")
    return (PathCommand(MOVE, (pts[0],)),) + tuple(PathCommand(LINE, (p,)) for p in pts[1:]) \
        + (PathCommand(CLOSE),)


def _build(kind, params, center, rotation, name, stroke_id, width) -> tuple[Primitive, Stroke]:
    prim = Primitive(kind, params, (float(center[0]), float(center[1])), float(rotation), name)
    return prim, Stroke(stroke_id, _commands(kind, params, center, rotation), width=width)


def _random_shape(kind: str, size: float, rng: np.random.Generator, canvas, rotation: float | None = None):
    params = _sample_params(kind, size, rng)
    if rotation is None:
        rotation = 0.0 if kind == "circle" else float(rng.uniform(0, 360))
    name = _semantic_name(kind, params, size, canvas)
    return params, rotation, name


def _local_box(kind, params, rotation, width) -> Box:
    return stroke_region(Stroke(0, _commands(kind, params, (0.0, 0.0), rotation), width=width))


def gen_primitive(kind: str, seed: int, canvas=DEFAULT_CANVAS, size_range=(0.1, 0.3),
                  width: float = STROKE_WIDTH) -> tuple[Primitive, Stroke]:
    """One primitive placed at random inside the canvas; deterministic per (kind, seed).

    ``size_range`` is a fraction of the smaller canvas side.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown primitive kind {kind!r}; choose from {KINDS}")
    lo, hi = size_range
    if not (0 < lo <= hi <= 1):
        raise InvalidSizeRange(f"size_range must satisfy 0 < lo <= hi <= 1, got {size_range}")
    W, H = canvas
    if W <= 0 or H <= 0:
        raise ValueError("canvas must be positive")
    rng = np.random.default_rng([seed, KINDS.index(kind)])
    size = rng.uniform(lo, hi) * min(W, H)
    params, rotation, name = _random_shape(kind, size, rng, canvas)
    margin = width
    box = _local_box(kind, params, rotation, width)
    # the half-width border does not scale with the outline
    bw, bh = box[2] - box[0] - width, box[3] - box[1] - width
    shrink = min(1.0, (W - 2 * margin - width) / bw, (H - 2 * margin - width) / bh)
    if shrink < 1.0:
        # rotated shapes can outgrow the canvas at the top of the size range
        shrink *= 0.999
        size *= shrink
        params = _scale_params(params, shrink)
        name = _semantic_name(kind, params, size, canvas)
        box = _local_box(kind, params, rotation, width)
    cx = rng.uniform(margin - box[0], W - margin - box[2])
    cy = rng.uniform(margin - box[1], H - margin - box[3])
    return _build(kind, params, (cx, cy), rotation, name, 0, width)


# ---------------------------------------------------------------------------
# compositions

def _pick(rng, options):
    return options[int(rng.integers(len(options)))]


class _Reject(Exception):
    pass


def _shape_at(kind, size, rng, canvas, width, place_box, rotation=None):
    """Sample a shape and a center so its region lands inside ``place_box``."""
    params, rot, name = _random_shape(kind, size, rng, canvas, rotation)
    box = _local_box(kind, params, rot, width)
    lo_x, hi_x = place_box[0] - box[0], place_box[2] - box[2]
    lo_y, hi_y = place_box[1] - box[1], place_box[3] - box[3]
    if hi_x < lo_x or hi_y < lo_y:
        raise _Reject
    return kind, params, rot, name, (rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y))


def _layout_containment(n, rng, canvas, width):
    W, H = canvas
    m = min(W, H)
    outer_kind = _pick(rng, ("rectangle", "circle", "ellipse"))
    size = rng.uniform(0.3, 0.6) * m
    canvas_box = (width, width, W - width, H - width)
    shapes = [_shape_at(outer_kind, size, rng, canvas, width, canvas_box, rotation=0.0)]
    _, params, _, _, (cx, cy) = shapes[0]
    gap = width + 8
    if outer_kind == "rectangle":
        hx, hy = params["width"] / 2 - gap, params["height"] / 2 - gap
    elif outer_kind == "circle":
        hx = hy = params["radius"] / math.sqrt(2) - gap
    else:
        hx, hy = params["rx"] / math.sqrt(2) - gap, params["ry"] / math.sqrt(2) - gap
    if hx <= 0 or hy <= 0:
        raise _Reject
    safe = (cx - hx, cy - hy, cx + hx, cy + hy)
    inner_regions = []
    for _ in range(n - 1):
        kind = _pick(rng, KINDS)
        for _try in range(30):
            inner_size = rng.uniform(0.2, 0.45) * 2 * min(hx, hy)
            try:
                s = _shape_at(kind, inner_size, rng, canvas, width, safe)
            except _Reject:
                continue
            reg = _region_of(s, width)
            if all(box_gap(reg, r) >= 6 for r in inner_regions):
                shapes.append(s)
                inner_regions.append(reg)
                break
        else:
            raise _Reject
    return shapes


def _region_of(shape, width) -> Box:
    kind, params, rot, _, center = shape
    return stroke_region(Stroke(0, _commands(kind, params, center, rot), width=width))


def _layout_adjacency(n, rng, canvas, width):
    W, H = canvas
    m = min(W, H)
    margin = 2 * width
    hi = min(0.32 * m, (W - 2 * margin - (n - 1) * 40) / n)
    lo = min(0.18 * m, 0.7 * hi)
    if hi <= 8:
        raise _Reject
    row = []
    cursor = 0.0
    for i in range(n):
        kind = _pick(rng, KINDS)
        params, rot, name = _random_shape(kind, rng.uniform(lo, hi), rng, canvas)
        box = _local_box(kind, params, rot, width)
        if i:
            cursor += rng.uniform(6, 36)
        dy = rng.uniform(-0.08, 0.08) * m
        row.append([kind, params, rot, name, (cursor - box[0], dy)])
        cursor += box[2] - box[0]
    boxes = [_region_of(s, width) for s in row]
    x0, x1 = min(b[0] for b in boxes), max(b[2] for b in boxes)
    y0, y1 = min(b[1] for b in boxes), max(b[3] for b in boxes)
    if x1 - x0 > W - 2 * margin or y1 - y0 > H - 2 * margin:
        raise _Reject
    ox = rng.uniform(margin - x0, W - margin - x1)
    oy = rng.uniform(margin - y0, H - margin - y1)
    return [(k, p, r, nm, (c[0] + ox, c[1] + oy)) for k, p, r, nm, c in row]


def _occluded_run(back: Stroke, front: Stroke, gap: float) -> np.ndarray | None:
    """Part of ``back``'s closed outline visible around ``front``, as a point array.

    Visible means outside the front shape and at least ``gap`` px from its
    outline. Returns None unless exactly one such run exists and a real part
    of the outline is hidden.
    """
    fpoly = flatten(front).points
    bpoly = flatten(back)
    L = bpoly.length
    step = 0.5
    s = np.arange(0.0, L, step)
    cum, pts = bpoly.cumulative_lengths, bpoly.points
    samples = np.column_stack([np.interp(s, cum, pts[:, 0]), np.interp(s, cum, pts[:, 1])])
    visible = ~_point_in_polygon(samples, fpoly) & (_distance_to_polyline(samples, fpoly) >= gap)
    frac = visible.mean()
    if not 0.3 <= frac <= 0.85:
        return None
    # exactly one visible run on the cyclic outline
    starts = np.flatnonzero(visible & ~np.roll(visible, 1))
    if len(starts) != 1:
        return None
    i0 = starts[0]
    n_vis = int(visible.sum())
    s0 = s[i0]
    s1 = s0 + (n_vis - 1) * step
    if s1 - s0 < 20:
        return None
    # unroll the closed outline twice so the run never wraps
    cum2 = np.concatenate([cum, cum[1:] + L])
    pts2 = np.vstack([pts, pts[1:]])
    inner = (cum2 > s0) & (cum2 < s1)
    run_s = np.concatenate([[s0], cum2[inner], [s1]])
    return np.column_stack([np.interp(run_s, cum2, pts2[:, 0]), np.interp(run_s, cum2, pts2[:, 1])])


def _layout_overlap(n, rng, canvas, width):
    W, H = canvas
    m = min(W, H)
    margin = 2 * width
    canvas_box = (margin, margin, W - margin, H - margin)
    front = _shape_at(_pick(rng, CLOSED_KINDS), rng.uniform(0.25, 0.36) * m, rng, canvas, width, canvas_box)
    fkind, fparams, frot, fname, fc = front
    front_stroke = Stroke(0, _commands(fkind, fparams, fc, frot), width=width)
    fbox = stroke_region(front_stroke)
    freach = max(fbox[2] - fbox[0], fbox[3] - fbox[1]) / 2
    scale = math.sqrt(3 / max(n, 3))
    out = [front + (None,)]
    regions = []
    strokes, all_regions = [front_stroke], [fbox]
    for i in range(1, n):
        for _try in range(30):
            kind = _pick(rng, CLOSED_KINDS)
            size = rng.uniform(0.18, 0.32) * m * scale
            params, rot, name = _random_shape(kind, size, rng, canvas)
            ang = rng.uniform(0, 2 * math.pi)
            dist = freach + size / 2 * rng.uniform(-0.4, 0.5)
            center = (fc[0] + dist * math.cos(ang), fc[1] + dist * math.sin(ang))
            full = (kind, params, rot, name, center)
            reg = _region_of(full, width)
            if not box_contains(canvas_box, reg):
                continue
            if any(box_gap(reg, r) < 6 for r in regions):
                continue
            if box_intersection(reg, fbox) == 0:
                continue
            run = _occluded_run(Stroke(i, _commands(kind, params, center, rot), width=width),
                                front_stroke, width + 1.5)
            if run is None:
                continue
            visible = stroke_from_points(i, run, width=width)
            vreg = stroke_region(visible)
            if not separable(strokes + [visible], all_regions + [vreg]):
                continue
            out.append(full + (run,))
            regions.append(reg)
            strokes.append(visible)
            all_regions.append(vreg)
            break
        else:
            raise _Reject
    return out


def _layout_grouping(n, rng, canvas, width):
    W, H = canvas
    m = min(W, H)
    radius = 0.2 * m
    margin = 2 * width
    hi = 0.2 * m * math.sqrt(3 / n)
    center = (rng.uniform(0.3 * W, 0.7 * W), rng.uniform(0.35 * H, 0.65 * H))
    out, regions = [], []
    for _ in range(n):
        for _try in range(40):
            kind = _pick(rng, KINDS)
            params, rot, name = _random_shape(kind, rng.uniform(0.55, 1.0) * hi, rng, canvas)
            ang, rad = rng.uniform(0, 2 * math.pi), 0.8 * radius * math.sqrt(rng.uniform())
            c = (center[0] + rad * math.cos(ang), center[1] + rad * math.sin(ang))
            box = _local_box(kind, params, rot, width)
            # place the region centroid (not the shape origin) at c
            c = (c[0] - (box[0] + box[2]) / 2, c[1] - (box[1] + box[3]) / 2)
            shape = (kind, params, rot, name, c)
            reg = _region_of(shape, width)
            if reg[0] < margin or reg[1] < margin or reg[2] > W - margin or reg[3] > H - margin:
                continue
            if any(box_gap(reg, r) < 4 for r in regions):
                continue
            out.append(shape)
            regions.append(reg)
            break
        else:
            raise _Reject
    return out


_LAYOUTS = {
    Relation.CONTAINMENT: _layout_containment,
    Relation.ADJACENCY: _layout_adjacency,
    Relation.OVERLAP: _layout_overlap,
    Relation.GROUPING: _layout_grouping,
}

_ORDINALS = ("", "Second", "Third", "Fourth", "Fifth", "Sixth", "Seventh", "Eighth")


def _unique_names(names: Sequence[str]) -> list[str]:
    seen: dict[str, int] = {}
    out = []
    for nm in names:
        k = seen.get(nm, 0)
        seen[nm] = k + 1
        out.append(nm.capitalize() if k == 0 else f"{_ORDINALS[k]} {nm}")
    return out


def _descriptions(relation: Relation, names: Sequence[str]) -> list[str]:
    n = len(names)
    first = names[0].lower()
    if relation is Relation.CONTAINMENT:
        others = "the other shape" if n == 2 else "the others"
        return [f"the outer shape that encloses {others}"] + [f"placed inside the {first}"] * (n - 1)
    if relation is Relation.ADJACENCY:
        return ["the first shape in the row"] + [f"placed beside the {names[i - 1].lower()}" for i in range(1, n)]
    if relation is Relation.OVERLAP:
        return ["the shape in front"] + [f"partly hidden behind the {first}"] * (n - 1)
    return ["part of a tight cluster"] + ["grouped close to the other shapes"] * (n - 1)


def gen_composition(relation: Relation | str, n: int, seed: int, canvas=DEFAULT_CANVAS,
                    width: float = STROKE_WIDTH, attempts: int = ATTEMPTS) -> Composition:
    """Rejection-sample a layout of ``n`` primitives satisfying ``relation``.

    Raises PlacementFailure when no valid layout turns up within ``attempts``.
    """
    relation = Relation(relation)
    min_n = 3 if relation is Relation.GROUPING else 2
    if not min_n <= n <= 8:
        raise ValueError(f"{relation.value} needs {min_n} <= n <= 8, got {n}")
    rng = np.random.default_rng([seed, list(Relation).index(relation), n])
    for _ in range(attempts):
        try:
            shapes = _LAYOUTS[relation](n, rng, canvas, width)
        except _Reject:
            continue
        prims, strokes = [], []
        for i, (kind, params, rot, name, center, *visible) in enumerate(shapes):
            prim, stroke = _build(kind, params, center, rot, name, i, width)
            if visible and visible[0] is not None:
                # occluded outline: only the part outside the front shape is drawn
                stroke = stroke_from_points(i, visible[0], width=width)
            prims.append(prim)
            strokes.append(stroke)
        regions = [stroke_region(s) for s in strokes]
        if not relation_holds(relation, regions, canvas):
            continue
        if not separable(strokes, regions):
            continue
        doc = SketchDocument(float(canvas[0]), float(canvas[1]), tuple(strokes),
                             name=f"{relation.value}-n{n}-s{seed}")
        names = _unique_names([p.semantic_name for p in prims])
        steps = tuple(zip(names, _descriptions(relation, names)))
        return Composition(doc, relation, tuple(regions), steps, seed, tuple(prims))
    raise PlacementFailure(f"no valid {relation.value} layout for n={n}, seed={seed} in {attempts} attempts")


def single_composition(kind: str, seed: int, canvas=DEFAULT_CANVAS, size_range=(0.1, 0.3)) -> Composition:
    prim, stroke = gen_primitive(kind, seed, canvas, size_range)
    doc = SketchDocument(float(canvas[0]), float(canvas[1]), (stroke,), name=f"{kind}-s{seed}")
    name = _unique_names([prim.semantic_name])[0]
    return Composition(doc, None, (stroke_region(stroke),), ((name, "a single shape"),), seed, (prim,))


def enumerate_orders(comp: Composition | int, count: int, seed: int) -> list[tuple[int, ...]]:
    """``count`` distinct drawing orders; the identity always comes first."""
    n = comp if isinstance(comp, int) else comp.n
    total = math.factorial(n)
    if not 1 <= count:
        raise ValueError("count must be >= 1")
    if count > total:
        raise TooManyOrders(f"{count} orders requested but only {total} exist for n={n}")
    identity = tuple(range(n))
    rng = np.random.default_rng(seed)
    out = [identity]
    if count == 1:
        return out
    if total <= 5040:
        rest = [p for p in itertools.permutations(range(n)) if p != identity]
        pick = rng.choice(len(rest), size=count - 1, replace=False)
        return out + [rest[i] for i in pick]
    seen = {identity}
    while len(out) < count:
        p = tuple(int(i) for i in rng.permutation(n))
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# serialization

def composition_to_json(comp: Composition) -> dict:
    from .svgpath import document_to_json
    return {
        "relation": comp.relation.value if comp.relation else None,
        "seed": comp.seed,
        "regions": [list(r) for r in comp.regions],
        "steps": [list(s) for s in comp.steps],
        "primitives": [p.to_json() for p in comp.primitives],
        "document": document_to_json(comp.document),
    }


def composition_from_json(data: dict) -> Composition:
    from .svgpath import document_from_json
    rel = Relation(data["relation"]) if data.get("relation") else None
    return Composition(
        document_from_json(data["document"]), rel,
        tuple(tuple(r) for r in data["regions"]),
        tuple(tuple(s) for s in data["steps"]),
        int(data["seed"]),
        tuple(Primitive.from_json(p) for p in data.get("primitives", [])),
    )
