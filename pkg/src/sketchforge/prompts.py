"""Numbered drawing-order prompts.

A prompt is a header line naming the subject followed by one numbered line
per step, in the order the strokes are drawn::

    Step-by-step sketch process of a house, following this drawing order:
    1. Walls – a large square resting on the ground line.
    2. Roof – a triangle sitting on top of the walls.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .errors import EmptySubject, InvalidDrawPlan, LengthMismatch
from .shapes import Composition, Relation
from .timeline import check_permutation

SEPARATOR = " – "  # en dash
HEADER = "Step-by-step sketch process of {subject}, following this drawing order"
BRUSH_SUFFIX = ", using the color and style of the brush shown in the top-left corner"

_COUNT_WORDS = ("zero", "one", "two", "three", "four", "five", "six", "seven", "eight")
_STEP_LINE = re.compile(r"^(\d+)\. (.*)$")


@dataclass(frozen=True)
class DrawPlan:
    subject: str
    steps: tuple[tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple((str(n), str(d)) for n, d in self.steps))
        if not self.steps:
            raise InvalidDrawPlan("a draw plan needs at least one step")
        names = [n for n, _ in self.steps]
        if len(set(names)) != len(names):
            raise InvalidDrawPlan(f"step names must be unique: {names}")
        if any(not n.strip() for n in names):
            raise InvalidDrawPlan("step names must be non-empty")

    def to_json(self) -> dict:
        return {"subject": self.subject, "steps": [list(s) for s in self.steps]}

    @classmethod
    def from_json(cls, data: dict) -> "DrawPlan":
        return cls(data["subject"], tuple(tuple(s) for s in data["steps"]))


def _step_line(k: int, name: str, description: str) -> str:
    # a step without a description is just the numbered name
    return f"{k}. {name}{SEPARATOR}{description}" if description else f"{k}. {name}"


def _render(plan: DrawPlan, perm: Sequence[int], suffix: str) -> str:
    if not plan.subject.strip():
        raise EmptySubject("plan subject is empty")
    if len(perm) != len(plan.steps):
        raise LengthMismatch(f"permutation has {len(perm)} entries, plan has {len(plan.steps)} steps")
    perm = check_permutation(perm, len(plan.steps))
    lines = [HEADER.format(subject=plan.subject) + suffix + ":"]
    lines += [_step_line(k, *plan.steps[i]) for k, i in enumerate(perm, start=1)]
    return "\n".join(lines) + "\n"


def build_prompt(plan: DrawPlan, perm: Sequence[int]) -> str:
    """Header plus the plan's steps listed in ``perm`` order, renumbered from 1."""
    return _render(plan, perm, "")


def brush_prompt(plan: DrawPlan, perm: Sequence[int]) -> str:
    """Variant for brush-styled samples; the header also points at the exemplar."""
    return _render(plan, perm, BRUSH_SUFFIX)


def parse_prompt(text: str, plan: DrawPlan | None = None) -> tuple[list[str], tuple[int, ...] | None]:
    """Recover step names from a prompt and, given the plan, the permutation used."""
    lines = text.rstrip("\n").split("\n")
    names = []
    for k, line in enumerate(lines[1:], start=1):
        m = _STEP_LINE.match(line)
        if not m or int(m.group(1)) != k:
            raise ValueError(f"line {k + 1} is not step {k}: {line!r}")
        names.append(m.group(2).split(SEPARATOR, 1)[0])
    if plan is None:
        return names, None
    index = {n: i for i, (n, _) in enumerate(plan.steps)}
    return names, tuple(index[n] for n in names)


def _count(n: int) -> str:
    return _COUNT_WORDS[n] if n < len(_COUNT_WORDS) else str(n)


def _article(phrase: str) -> str:
    return ("an " if phrase[0].lower() in "aeiou" else "a ") + phrase


def shape_steps(comp: Composition) -> DrawPlan:
    """Draw plan for a generated composition: one step per stroke, base order."""
    n = comp.n
    rel = comp.relation
    first = comp.steps[0][0].lower()
    if rel is None or n == 1:
        subject = _article(first)
    elif rel is Relation.CONTAINMENT:
        inner = "shape" if n == 2 else "shapes"
        subject = f"{_article(first)} with {_count(n - 1)} {inner} inside"
    elif rel is Relation.ADJACENCY:
        subject = f"{_count(n)} shapes side by side"
    elif rel is Relation.OVERLAP:
        subject = f"{_count(n)} overlapping shapes"
    else:
        subject = f"a group of {_count(n)} shapes"
    return DrawPlan(subject, comp.steps)

