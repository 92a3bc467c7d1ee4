"""Per-frame stroke schedule: one new stroke per frame, progressive reveal."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import FrameOutOfRange, InsufficientFrames, InvalidRenderPlan, NotAPermutation, UnknownStroke
from .svgpath import DEFAULT_TOLERANCE, SketchDocument, flatten


@dataclass(frozen=True)
class RenderPlan:
    frames: int = 81
    width: int = 832
    height: int = 480
    blank_lead: int = 1
    hold_tail: int = 4
    fps: int = 16

    def __post_init__(self):
        if self.blank_lead < 0 or self.hold_tail < 0:
            raise InvalidRenderPlan("blank_lead and hold_tail must be non-negative")
        if self.frames < self.blank_lead + self.hold_tail + 1:
            raise InvalidRenderPlan(
                f"frames={self.frames} leaves no drawing frame after lead={self.blank_lead}, tail={self.hold_tail}")
        if self.width < 16 or self.height < 16:
            raise InvalidRenderPlan("width and height must be at least 16 px")

    @property
    def budget(self) -> int:
        return self.frames - self.blank_lead - self.hold_tail


@dataclass(frozen=True)
class TimelineEntry:
    stroke_id: int
    intro_frame: int
    complete_frame: int

    @property
    def frames(self) -> int:
        return self.complete_frame - self.intro_frame + 1


@dataclass(frozen=True)
class Timeline:
    K: int
    entries: tuple[TimelineEntry, ...]  # in drawing order
    order: tuple[int, ...]
    blank_lead: int = 0
    hold_tail: int = 0

    def entry(self, stroke_id: int) -> TimelineEntry:
        for e in self.entries:
            if e.stroke_id == stroke_id:
                return e
        raise UnknownStroke(stroke_id)

    def to_json(self) -> dict:
        return {
            "K": self.K,
            "blank_lead": self.blank_lead,
            "hold_tail": self.hold_tail,
            "order": list(self.order),
            "entries": [
                {"stroke_id": e.stroke_id, "intro_frame": e.intro_frame, "complete_frame": e.complete_frame}
                for e in self.entries
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Timeline":
        entries = tuple(TimelineEntry(e["stroke_id"], e["intro_frame"], e["complete_frame"])
                        for e in data["entries"])
        return cls(data["K"], entries, tuple(data["order"]), data["blank_lead"], data["hold_tail"])


def check_permutation(order: Sequence[int], n: int) -> tuple[int, ...]:
    order = tuple(int(i) for i in order)
    if sorted(order) != list(range(n)):
        raise NotAPermutation(f"{order} is not a permutation of 0..{n - 1}")
    return order


def allocate_frames(lengths: Sequence[float], budget: int) -> list[int]:
    """Split ``budget`` frames among strokes proportionally to their lengths.

    Every stroke gets at least one frame. Quotas are rounded by largest
    remainder (ties: longer stroke, then lower id). If the one-frame floor
    overshoots the budget, frames are taken back from the largest
    allocations (ties: smaller remainder, then higher id).
    """
    n = len(lengths)
    if n > budget:
        raise InsufficientFrames(f"{n} strokes need at least {n} frames, budget is {budget}")
    total = float(sum(lengths))
    if total > 0:
        quotas = [budget * L / total for L in lengths]
    else:
        quotas = [budget / n] * n
    alloc = [max(1, math.floor(q)) for q in quotas]
    rem = [q - math.floor(q) for q in quotas]
    left = budget - sum(alloc)
    if left > 0:
        rank = sorted(range(n), key=lambda i: (-rem[i], -lengths[i], i))
        for i in rank[:left]:
            alloc[i] += 1
    while left < 0:
        i = min((j for j in range(n) if alloc[j] > 1), key=lambda j: (-alloc[j], rem[j], -j))
        alloc[i] -= 1
        left += 1
    return alloc


def compile_timeline(doc: SketchDocument, order: Sequence[int], plan: RenderPlan,
                     tolerance: float = DEFAULT_TOLERANCE) -> Timeline:
    """Schedule strokes back to back in ``order`` within the plan's drawing budget."""
    order = check_permutation(order, len(doc.strokes))
    lengths = [flatten(s, tolerance).length for s in doc.strokes]
    alloc = allocate_frames(lengths, plan.budget)
    entries = []
    f = plan.blank_lead
    for sid in order:
        entries.append(TimelineEntry(sid, f, f + alloc[sid] - 1))
        f += alloc[sid]
    return Timeline(plan.frames, tuple(entries), order, plan.blank_lead, plan.hold_tail)


def reveal_at(tl: Timeline, stroke_id: int, frame: int) -> float:
    """Fraction of the stroke's arc length visible at ``frame``."""
    if not 0 <= frame < tl.K:
        raise FrameOutOfRange(f"frame {frame} outside 0..{tl.K - 1}")
    e = tl.entry(stroke_id)
    if frame < e.intro_frame:
        return 0.0
    if frame >= e.complete_frame:
        return 1.0
    return (frame - e.intro_frame + 1) / (e.complete_frame - e.intro_frame + 1)
