"""Built-in brush stamps, color palette, and brush file I/O.

The six stamps are procedural stand-ins named after common brush families
(dots, vertical calligraphy nib, bubbles, soft/hard round, splatter). Brush
directories hold 8-bit grayscale square images plus an optional
``brushes.json`` giving per-brush diameter and spacing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import MissingAsset
from .raster import Brush
from .svgpath import RGB

BRUSH_INDEX = "brushes.json"
DEFAULT_DIAMETER = 10.0


@dataclass(frozen=True)
class Palette:
    colors: tuple[tuple[str, RGB], ...]

    def __post_init__(self):
        if not self.colors:
            raise ValueError("palette must not be empty")
        names = [n for n, _ in self.colors]
        if len(set(names)) != len(names):
            raise ValueError("palette color names must be unique")

    def __len__(self):
        return len(self.colors)

    def __iter__(self):
        return iter(self.colors)

    def get(self, name: str) -> RGB:
        for n, c in self.colors:
            if n == name:
                return c
        raise KeyError(f"unknown color {name!r}; palette has {[n for n, _ in self.colors]}")

    @classmethod
    def from_json(cls, data) -> "Palette":
        if isinstance(data, dict):
            data = list(data.items())
        return cls(tuple((str(n), tuple(int(v) for v in c)) for n, c in data))


DEFAULT_PALETTE = Palette((
    ("black", (0, 0, 0)),
    ("crimson-red", (196, 30, 58)),
    ("indigo-blue", (63, 72, 204)),
    ("forest-green", (34, 110, 52)),
    ("mocha-brown", (111, 78, 55)),
    ("mustard-olive", (160, 140, 30)),
    ("pink", (231, 84, 128)),
    ("teal", (0, 128, 128)),
))


def _grid(side: int):
    c = (side - 1) / 2
    y, x = np.mgrid[0:side, 0:side]
    return (x - c) / (side / 2), (y - c) / (side / 2)


def _to_u8(a: np.ndarray) -> np.ndarray:
    return np.floor(np.clip(a, 0.0, 1.0) * 255 + 0.5).astype(np.uint8)


def _wash(x, y, radius, alpha=0.45):
    """Translucent disc under a textured stamp.

    Keeps the inked footprint convex, so the ink a stamp adds beyond the
    previous stamps stays in one piece. The alpha clears the ink threshold
    for every palette color.
    """
    return (x * x + y * y <= radius ** 2) * alpha


def _hard_round(side=32):
    x, y = _grid(side)
    return _to_u8((x * x + y * y <= 0.9 ** 2).astype(float))


def _soft_round(side=32):
    x, y = _grid(side)
    r2 = x * x + y * y
    return _to_u8(np.where(r2 <= 1.0, np.exp(-3.0 * r2), 0.0))


def _dots(side=32):
    # large hard dots; at the default spacing neighbours overlap into a bead chain
    x, y = _grid(side)
    return _to_u8((x * x + y * y <= 0.9 ** 2).astype(float))


def _calligraphy_vertical(side=32):
    x, y = _grid(side)
    return _to_u8(((x / 0.3) ** 2 + (y / 0.95) ** 2 <= 1.0).astype(float))


def _bubbles(side=48):
    x, y = _grid(side)
    out = np.zeros((side, side))
    for cx, cy, r in ((-0.35, -0.3, 0.4), (0.4, 0.1, 0.45), (-0.1, 0.5, 0.3)):
        d = np.sqrt((x - cx) ** 2 + (y - cy) ** 2)
        out = np.maximum(out, np.clip(1.0 - np.abs(d - r) / 0.08, 0.0, 1.0) * 0.9)
    return _to_u8(np.maximum(out, _wash(x, y, 0.95)))


def _splatter(side=64, seed=7):
    # droplets of varying opacity around a solid core
    rng = np.random.default_rng(seed)
    x, y = _grid(side)
    core = 0.4
    out = (x * x + y * y <= core ** 2).astype(float)
    for _ in range(14):
        r = rng.uniform(0.08, 0.18)
        ang, rad = rng.uniform(0, 2 * np.pi), rng.uniform(core, core + r * 0.9)
        cx, cy = rad * np.cos(ang), rad * np.sin(ang)
        out = np.maximum(out, ((x - cx) ** 2 + (y - cy) ** 2 <= r * r) * rng.uniform(0.6, 1.0))
    return _to_u8(np.maximum(out, _wash(x, y, 0.8)))


_BUILTIN = {
    # id: (stamp factory, diameter px, spacing factor)
    "dots": (_dots, 12.0, 0.5),
    "calligraphy-vertical": (_calligraphy_vertical, 12.0, 0.25),
    "bubbles": (_bubbles, 16.0, 0.3),
    "soft-round": (_soft_round, 10.0, 0.25),
    "hard-round": (_hard_round, 8.0, 0.25),
    "splatter": (_splatter, 18.0, 0.3),
}


def builtin_brushes() -> list[Brush]:
    return [Brush(bid, make(), d, sp) for bid, (make, d, sp) in _BUILTIN.items()]


def builtin_brush(brush_id: str) -> Brush:
    if brush_id not in _BUILTIN:
        raise KeyError(f"unknown builtin brush {brush_id!r}; choose from {sorted(_BUILTIN)}")
    make, d, sp = _BUILTIN[brush_id]
    return Brush(brush_id, make(), d, sp)


def load_brush(path: str | Path, diameter: float = DEFAULT_DIAMETER, spacing_factor: float = 0.25,
               brush_id: str | None = None) -> Brush:
    path = Path(path)
    if not path.is_file():
        raise MissingAsset(f"brush image {path} not found")
    with Image.open(path) as im:
        if im.mode not in ("L", "1", "P", "I;16"):
            im = im.convert("L")
        stamp = np.asarray(im.convert("L"), dtype=np.uint8).copy()
    return Brush(brush_id or path.stem, stamp, diameter, spacing_factor)


def save_brushes(brushes: list[Brush], directory: str | Path) -> Path:
    """Write stamps as PNGs plus a ``brushes.json`` index."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    index = []
    for b in brushes:
        Image.fromarray(b.stamp, mode="L").save(directory / f"{b.id}.png")
        index.append({"id": b.id, "file": f"{b.id}.png", "diameter": b.diameter,
                      "spacing_factor": b.spacing_factor})
    (directory / BRUSH_INDEX).write_text(json.dumps(index, indent=2) + "\n")
    return directory


def load_brushes(directory: str | Path) -> list[Brush]:
    """Load every brush in ``directory`` (index order if ``brushes.json`` exists, else by name)."""
    directory = Path(directory)
    if not directory.is_dir():
        raise MissingAsset(f"brush directory {directory} not found")
    index = directory / BRUSH_INDEX
    if index.is_file():
        entries = json.loads(index.read_text())
        return [load_brush(directory / e["file"], float(e.get("diameter", DEFAULT_DIAMETER)),
                           float(e.get("spacing_factor", 0.25)), e.get("id")) for e in entries]
    files = sorted(p for p in directory.iterdir() if p.suffix.lower() in (".png", ".pgm"))
    if not files:
        raise MissingAsset(f"no brush images in {directory}")
    return [load_brush(p) for p in files]
