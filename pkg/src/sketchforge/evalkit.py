"""Sequential-sketching metrics over rendered or generated frame sequences.

* multi-stroke frame ratio: share of frame transitions whose newly added ink
  splits into two or more connected components;
* accumulation curve: cumulative newly-added ink normalized to end at 1;
* drawing-order extraction from per-stroke regions, scored with Kendall tau;
* Gram-matrix style distance over externally supplied feature maps.
"""

from __future__ import annotations

import csv
import html
import io
import json
import struct
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from .errors import BlankVideo, DimensionMismatch, EmptyMask, LengthMismatch, NotAPermutation
from .raster import Frame, FrameSequence

Box = tuple[float, float, float, float]  # x0, y0, x1, y1 in px

_STRUCTURE = {
    4: ndimage.generate_binary_structure(2, 1),
    8: ndimage.generate_binary_structure(2, 2),
}


@dataclass(frozen=True)
class EvalParams:
    canvas_color: tuple[int, int, int] = (255, 255, 255)
    threshold: int = 40
    connectivity: int = 8
    min_area: int = 12
    activation_fraction: float = 0.05

    def __post_init__(self):
        if self.threshold < 1:
            raise ValueError("threshold must be >= 1")
        if self.connectivity not in (4, 8):
            raise ValueError("connectivity must be 4 or 8")
        if self.min_area < 1:
            raise ValueError("min_area must be >= 1")
        if not 0 < self.activation_fraction <= 1:
            raise ValueError("activation_fraction must be in (0, 1]")


@dataclass(frozen=True)
class DeltaStats:
    frame: int
    new_pixels: int
    new_components: int


@dataclass
class OrderResult:
    order: tuple[int, ...]
    activation: dict[int, int]
    inactive: tuple[int, ...]


@dataclass
class EvalReport:
    multi_stroke_ratio: float
    multi_stroke_frames: int
    considered_frames: int
    accumulation: list[float]
    per_frame: list[DeltaStats] = field(default_factory=list)
    order: list[int] | None = None
    inactive: list[int] | None = None
    tau: float | None = None

    def to_json(self) -> dict:
        d = asdict(self)
        d["per_frame"] = [asdict(s) for s in self.per_frame]
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# pixel front end

def _pixels(x) -> np.ndarray:
    if isinstance(x, Frame):
        return x.pixels
    return np.asarray(x)


def _stack(seq) -> np.ndarray:
    if isinstance(seq, FrameSequence):
        return seq.pixels
    if isinstance(seq, np.ndarray):
        return seq
    return np.stack([_pixels(f) for f in seq])


def ink_mask(frame, canvas_color=(255, 255, 255), threshold: int = 40) -> np.ndarray:
    """Boolean (H, W) mask: max per-channel |pixel - canvas| > threshold.

    Works on a single frame or a stack of frames (leading axes preserved).
    """
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    px = _pixels(frame)
    if px.dtype != np.uint8:
        px = px.astype(np.int16)
    out = None
    # per-channel band test on the raw bytes; avoids an int16 copy of the frame
    for k, c in enumerate(canvas_color):
        ch = px[..., k]
        m = None
        if c + threshold < 255:
            m = ch > c + threshold
        if c - threshold > 0:
            lo = ch < c - threshold
            m = lo if m is None else m | lo
        if m is not None:
            out = m if out is None else out | m
    if out is None:
        return np.zeros(px.shape[:-1], dtype=bool)
    return out


def new_ink(prev: np.ndarray, cur: np.ndarray) -> np.ndarray:
    if prev.shape != cur.shape:
        raise DimensionMismatch(f"mask shapes differ: {prev.shape} vs {cur.shape}")
    return cur & ~prev


def count_components(mask: np.ndarray, connectivity: int = 8, min_area: int = 12) -> int:
    """Connected components of ``mask`` with at least ``min_area`` pixels."""
    if min_area < 1:
        raise ValueError("min_area must be >= 1")
    if connectivity not in _STRUCTURE:
        raise ValueError("connectivity must be 4 or 8")
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        return 0
    # crop to the occupied box: labeling cost scales with the array size
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    crop = mask[rows[0]:rows[-1] + 1, cols[0]:cols[-1] + 1]
    labels, n = ndimage.label(crop, structure=_STRUCTURE[connectivity])
    if n == 0:
        return 0
    if min_area == 1:
        return int(n)
    sizes = np.bincount(labels.ravel())[1:]
    return int((sizes >= min_area).sum())


def _delta_masks(stack: np.ndarray, params: EvalParams) -> Iterable[tuple[int, np.ndarray]]:
    """Yield (frame, newly inked mask); frame 0 counts against a blank canvas."""
    prev = None
    for f in range(stack.shape[0]):
        cur = ink_mask(stack[f], params.canvas_color, params.threshold)
        yield f, (cur if prev is None else new_ink(prev, cur))
        prev = cur


# ---------------------------------------------------------------------------
# metrics

def ratio_from_counts(multi_frames: int, considered_frames: int) -> float:
    if considered_frames <= 0:
        raise ValueError("considered_frames must be positive")
    if not 0 <= multi_frames <= considered_frames:
        raise ValueError("multi_frames must lie in 0..considered_frames")
    return multi_frames / considered_frames


def frame_deltas(seq, params: EvalParams = EvalParams()) -> list[DeltaStats]:
    stack = _stack(seq)
    out = []
    for f, delta in _delta_masks(stack, params):
        n_px = int(delta.sum())
        n_cc = count_components(delta, params.connectivity, params.min_area) if n_px >= params.min_area else 0
        out.append(DeltaStats(f, n_px, n_cc))
    return out


def multi_stroke_ratio(seq, params: EvalParams = EvalParams(), deltas: list[DeltaStats] | None = None):
    """Returns (ratio, multi_frames, considered_frames, per_frame stats).

    Considered frames are the K-1 transitions f = 1..K-1; a transition is
    multi-stroke when its new ink has at least two components.
    """
    if deltas is None:
        if len(_stack(seq)) < 2:
            raise ValueError("need at least two frames")
        deltas = frame_deltas(seq, params)
    considered = len(deltas) - 1
    multi = sum(1 for d in deltas[1:] if d.new_components >= 2)
    return ratio_from_counts(multi, considered), multi, considered, deltas


def accumulation_from_counts(counts: Sequence[int]) -> list[float]:
    counts = np.asarray(counts, dtype=np.int64)
    total = int(counts.sum())
    if total == 0:
        raise BlankVideo("no ink in any frame")
    curve = np.cumsum(counts) / total
    curve[-1] = 1.0
    return [float(v) for v in curve]


def accumulation_curve(seq, params: EvalParams = EvalParams(),
                       deltas: list[DeltaStats] | None = None) -> list[float]:
    """c[f] = new ink through frame f / new ink through the last frame."""
    if deltas is None:
        deltas = frame_deltas(seq, params)
    return accumulation_from_counts([d.new_pixels for d in deltas])


def _region_slices(box: Box, W: int, H: int):
    x0, y0, x1, y1 = box
    c0, c1 = max(0, int(np.ceil(x0 - 0.5))), min(W, int(np.floor(x1 - 0.5)) + 1)
    r0, r1 = max(0, int(np.ceil(y0 - 0.5))), min(H, int(np.floor(y1 - 0.5)) + 1)
    return r0, r1, c0, c1


def extract_order(seq, regions: Sequence[Box], params: EvalParams = EvalParams()) -> OrderResult:
    """Order in which regions first collect ``activation_fraction`` of their area in new ink.

    A region covers the pixels whose centers fall inside its box. Regions
    that never activate are left out of ``order`` and listed in ``inactive``.
    """
    stack = _stack(seq)
    if not len(regions):
        raise ValueError("regions must not be empty")
    H, W = stack.shape[1:3]
    slices = [_region_slices(b, W, H) for b in regions]
    for i, (r0, r1, c0, c1) in enumerate(slices):
        if r1 <= r0 or c1 <= c0:
            raise DimensionMismatch(f"region {i} {regions[i]} lies outside the {W}x{H} frame")
    cum = np.zeros(len(regions), dtype=np.int64)
    need = [params.activation_fraction * (r1 - r0) * (c1 - c0) for r0, r1, c0, c1 in slices]
    activation: dict[int, int] = {}
    for f, delta in _delta_masks(stack, params):
        if not delta.any():
            continue
        for i, (r0, r1, c0, c1) in enumerate(slices):
            if i in activation:
                continue
            cum[i] += int(delta[r0:r1, c0:c1].sum())
            if cum[i] >= need[i]:
                activation[i] = f
    order = tuple(sorted(activation, key=lambda i: (activation[i], i)))
    inactive = tuple(i for i in range(len(regions)) if i not in activation)
    return OrderResult(order, activation, inactive)


def _inversions(seq: list[int]) -> int:
    if len(seq) < 2:
        return 0
    mid = len(seq) // 2
    left, right = seq[:mid], seq[mid:]
    inv = _inversions(left) + _inversions(right)
    left.sort()
    right.sort()
    j = 0
    for x in left:
        while j < len(right) and right[j] < x:
            j += 1
        inv += j
    return inv


def kendall_tau(a: Sequence[int], b: Sequence[int]) -> float:
    """Kendall tau-a between two orderings of the same items."""
    a, b = list(a), list(b)
    if len(a) != len(b):
        raise LengthMismatch(f"orderings differ in length: {len(a)} vs {len(b)}")
    if len(set(a)) != len(a) or set(a) != set(b) or len(set(b)) != len(b):
        raise NotAPermutation("a and b must be permutations of the same items")
    n = len(a)
    if n < 2:
        raise LengthMismatch("kendall_tau needs at least two items")
    pos = {x: i for i, x in enumerate(b)}
    inv = _inversions([pos[x] for x in a])
    return 1.0 - 4.0 * inv / (n * (n - 1))


# ---------------------------------------------------------------------------
# style distance

@dataclass(frozen=True, eq=False)
class FeatureMap:
    values: np.ndarray  # (C, h, w) float64

    def __post_init__(self):
        if self.values.ndim != 3:
            raise DimensionMismatch(f"feature map must be (C, h, w), got {self.values.shape}")
        if not np.isfinite(self.values).all():
            raise ValueError("feature map contains non-finite values")

    @property
    def shape(self):
        return self.values.shape


def gram_matrix(fm: FeatureMap, mask: np.ndarray | None = None) -> np.ndarray:
    """G = F F^T / M over the (masked) spatial positions."""
    C, h, w = fm.shape
    F = fm.values.reshape(C, h * w)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (h, w):
            raise DimensionMismatch(f"mask {mask.shape} does not match feature map {(h, w)}")
        if not mask.any():
            raise EmptyMask("mask selects no positions")
        F = F[:, mask.ravel()]
    return F @ F.T / F.shape[1]


def gram_distance(a: Sequence[FeatureMap], b: Sequence[FeatureMap],
                  masks: Sequence[np.ndarray | None] | None = None) -> float:
    """Mean over layers of the Frobenius distance between Gram matrices."""
    if len(a) != len(b) or not len(a):
        raise DimensionMismatch(f"layer counts differ or are zero: {len(a)} vs {len(b)}")
    if masks is not None and len(masks) != len(a):
        raise DimensionMismatch("one mask (or None) per layer is required")
    dists = []
    for i, (fa, fb) in enumerate(zip(a, b)):
        if fa.shape != fb.shape:
            raise DimensionMismatch(f"layer {i}: {fa.shape} vs {fb.shape}")
        m = masks[i] if masks is not None else None
        dists.append(float(np.linalg.norm(gram_matrix(fa, m) - gram_matrix(fb, m))))
    return float(np.mean(dists))


def write_feature_maps(path: str | Path, maps: Sequence[FeatureMap]) -> None:
    """Little-endian int32 (C, h, w) header + float32 values per map, concatenated."""
    with open(path, "wb") as fh:
        for fm in maps:
            fh.write(struct.pack("<3i", *fm.shape))
            fh.write(np.ascontiguousarray(fm.values, dtype="<f4").tobytes())


def read_feature_maps(path: str | Path) -> list[FeatureMap]:
    data = Path(path).read_bytes()
    maps, pos = [], 0
    while pos < len(data):
        if len(data) - pos < 12:
            raise DimensionMismatch(f"{path}: truncated header at byte {pos}")
        C, h, w = struct.unpack_from("<3i", data, pos)
        pos += 12
        n = C * h * w
        if C <= 0 or h <= 0 or w <= 0 or len(data) - pos < 4 * n:
            raise DimensionMismatch(f"{path}: bad map header {(C, h, w)} at byte {pos - 12}")
        vals = np.frombuffer(data, dtype="<f4", count=n, offset=pos).astype(np.float64)
        maps.append(FeatureMap(vals.reshape(C, h, w)))
        pos += 4 * n
    if not maps:
        raise DimensionMismatch(f"{path}: no feature maps")
    return maps


# ---------------------------------------------------------------------------
# reports

def evaluate(seq, params: EvalParams = EvalParams(), regions: Sequence[Box] | None = None,
             target_order: Sequence[int] | None = None) -> EvalReport:
    deltas = frame_deltas(seq, params)
    ratio, multi, considered, _ = multi_stroke_ratio(seq, params, deltas)
    report = EvalReport(ratio, multi, considered, accumulation_curve(seq, params, deltas), deltas)
    if regions is not None:
        res = extract_order(seq, regions, params)
        report.order, report.inactive = list(res.order), list(res.inactive)
        if target_order is not None:
            if len(res.order) == len(target_order):
                report.tau = kendall_tau(res.order, target_order)
            else:
                # inactive regions make the extracted order partial; score the shared items
                shared = [i for i in target_order if i in res.activation]
                report.tau = kendall_tau(res.order, shared) if len(shared) >= 2 else None
    return report


def curve_csv(curve: Sequence[float]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["frame_index", "value"])
    for i, v in enumerate(curve):
        w.writerow([i, repr(float(v))])
    return buf.getvalue()


def curve_svg(curve: Sequence[float], width: int = 480, height: int = 300, title: str = "") -> str:
    """Minimal standalone SVG line chart of an accumulation curve."""
    ml, mr, mt, mb = 48, 16, 24, 36
    pw, ph = width - ml - mr, height - mt - mb
    n = max(len(curve) - 1, 1)
    pts = " ".join(f"{ml + pw * i / n:.2f},{mt + ph * (1 - v):.2f}" for i, v in enumerate(curve))
    ticks = "".join(
        f'<line x1="{ml - 4}" y1="{mt + ph * (1 - t):.2f}" x2="{ml}" y2="{mt + ph * (1 - t):.2f}" stroke="black"/>'
        f'<text x="{ml - 8}" y="{mt + ph * (1 - t) + 4:.2f}" font-size="10" text-anchor="end">{t:.1f}</text>'
        for t in (0.0, 0.5, 1.0))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
        f'<text x="{ml}" y="16" font-size="12">{html.escape(title)}</text>\n'
        f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" stroke="black"/>\n'
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" stroke="black"/>\n'
        f'{ticks}\n'
        f'<text x="{ml + pw / 2}" y="{height - 8}" font-size="11" text-anchor="middle">frame</text>\n'
        f'<polyline fill="none" stroke="#1f5fbf" stroke-width="2" points="{pts}"/>\n'
        f'</svg>\n'
    )
