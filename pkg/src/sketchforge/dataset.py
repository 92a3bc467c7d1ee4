"""Frame I/O, brush/color augmentation and the line-delimited JSON manifest.

Layout of a dataset root::

    manifest.jsonl                  header line, then one sample per line
    <sample-id>/frame_00000.ppm     K frames per sample
    <sample-id>_conditioning.ppm    only for brush-augmented samples

Paths inside the manifest are relative to the manifest's directory.
"""

from __future__ import annotations

import datetime as _dt
import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from PIL import Image

from .brushes import Palette
from .errors import DuplicateId, IoFailure, MissingAsset, SchemaViolation
from .prompts import DrawPlan, brush_prompt, build_prompt
from .raster import Brush, Frame, FrameSequence, Style, conditioning_frame, render_sequence
from .svgpath import SketchDocument
from .timeline import RenderPlan

MANIFEST_VERSION = 1
FORMATS = ("ppm", "png")
SOURCES = ("shapes", "svg")


def frame_name(index: int, fmt: str) -> str:
    return f"frame_{index:05d}.{fmt}"


def ppm_bytes(frame: Frame) -> bytes:
    h, w = frame.pixels.shape[:2]
    return f"P6\n{w} {h}\n255\n".encode("ascii") + frame.tobytes()


def _read_ppm(data: bytes) -> Frame:
    # header: magic, width, height, maxval separated by single whitespace runs
    tokens, pos = [], 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while end < len(data) and not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end])
        pos = end
    magic, w, h, maxval = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
    if magic != b"P6" or maxval != 255:
        raise ValueError("only binary 8-bit PPM (P6, maxval 255) is supported")
    body = data[pos + 1:pos + 1 + 3 * w * h]
    if len(body) != 3 * w * h:
        raise ValueError("truncated PPM body")
    return Frame(np.frombuffer(body, dtype=np.uint8).reshape(h, w, 3).copy())


def read_frame(path: str | Path) -> Frame:
    path = Path(path)
    if not path.is_file():
        raise MissingAsset(f"frame {path} not found")
    if path.suffix.lower() == ".ppm":
        return _read_ppm(path.read_bytes())
    with Image.open(path) as im:
        return Frame(np.asarray(im.convert("RGB"), dtype=np.uint8).copy())


def write_frame(frame: Frame, path: str | Path) -> Path:
    path = Path(path)
    try:
        if path.suffix.lower() == ".ppm":
            path.write_bytes(ppm_bytes(frame))
        else:
            Image.fromarray(frame.pixels, mode="RGB").save(path, format="PNG", optimize=False)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return path


def write_frames(seq: FrameSequence | Sequence[Frame], directory: str | Path, fmt: str = "ppm") -> list[Path]:
    """Write every frame as ``frame_%05d.<fmt>``; PPM output is byte-exact."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create {directory}: {exc}") from exc
    return [write_frame(f, directory / frame_name(i, fmt)) for i, f in enumerate(seq)]


# ---------------------------------------------------------------------------
# records

@dataclass(frozen=True)
class SampleRecord:
    id: str
    prompt: str
    frames_dir: str
    frame_format: str
    K: int
    W: int
    H: int
    order: tuple[int, ...]
    brush_id: str | None = None
    color_name: str | None = None
    conditioning_frame: str | None = None
    seed: int = 0
    source: str = "shapes"

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(i) for i in self.order))
        if self.frame_format not in FORMATS:
            raise SchemaViolation(f"{self.id}: frame_format must be one of {FORMATS}")
        if self.source not in SOURCES:
            raise SchemaViolation(f"{self.id}: source must be one of {SOURCES}")
        if (self.brush_id is None) != (self.color_name is None):
            raise SchemaViolation(f"{self.id}: brush_id and color_name must be both set or both absent")
        if sorted(self.order) != list(range(len(self.order))):
            raise SchemaViolation(f"{self.id}: order {self.order} is not a permutation")

    def to_json(self) -> dict:
        d = asdict(self)
        d["order"] = list(self.order)
        return d


_FIELD_TYPES = {
    "id": str, "prompt": str, "frames_dir": str, "frame_format": str, "K": int, "W": int, "H": int,
    "order": list, "brush_id": (str, type(None)), "color_name": (str, type(None)),
    "conditioning_frame": (str, type(None)), "seed": int, "source": str,
}


def _record_from_json(d: dict, line: int) -> SampleRecord:
    if not isinstance(d, dict):
        raise SchemaViolation(f"line {line}: sample must be a JSON object")
    missing = set(_FIELD_TYPES) - set(d)
    extra = set(d) - set(_FIELD_TYPES)
    if missing or extra:
        raise SchemaViolation(f"line {line}: missing {sorted(missing)}, unexpected {sorted(extra)}")
    for k, t in _FIELD_TYPES.items():
        if not isinstance(d[k], t) or (t is int and isinstance(d[k], bool)):
            raise SchemaViolation(f"line {line}: field {k!r} has the wrong type")
    try:
        return SampleRecord(**d)
    except (TypeError, ValueError) as exc:
        raise SchemaViolation(f"line {line}: {exc}") from exc


def _created() -> str:
    # SOURCE_DATE_EPOCH pins the timestamp so repeated builds are byte-identical
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = _dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc) if epoch else _dt.datetime.now(_dt.timezone.utc)
    return when.replace(microsecond=0).isoformat().replace("+00:00", "Z")


@dataclass(frozen=True)
class Manifest:
    samples: tuple[SampleRecord, ...]
    render_defaults: RenderPlan = field(default_factory=RenderPlan)
    created: str = field(default_factory=_created)
    version: int = MANIFEST_VERSION

    def __post_init__(self):
        seen = set()
        for s in self.samples:
            if s.id in seen:
                raise DuplicateId(f"duplicate sample id {s.id!r}")
            seen.add(s.id)

    def dumps(self) -> str:
        header = {"version": self.version, "created": self.created,
                  "render_defaults": asdict(self.render_defaults)}
        lines = [json.dumps(header, sort_keys=True)]
        lines += [json.dumps(s.to_json(), sort_keys=True, ensure_ascii=False) for s in self.samples]
        return "\n".join(lines) + "\n"


def _check_files(rec: SampleRecord, root: Path) -> None:
    fdir = root / rec.frames_dir
    if not fdir.is_dir():
        raise MissingAsset(f"{rec.id}: frames_dir {fdir} not found")
    expected = {frame_name(i, rec.frame_format) for i in range(rec.K)}
    present = {p.name for p in fdir.iterdir() if p.name.startswith("frame_")}
    if present != expected:
        raise MissingAsset(f"{rec.id}: {fdir} must hold exactly frames 0..{rec.K - 1} as .{rec.frame_format}")
    if rec.conditioning_frame is not None and not (root / rec.conditioning_frame).is_file():
        raise MissingAsset(f"{rec.id}: conditioning frame {rec.conditioning_frame} not found")


def assemble(records: Iterable[SampleRecord], manifest_path: str | Path,
             render_defaults: RenderPlan = RenderPlan(), created: str | None = None) -> Manifest:
    """Verify every referenced file, then write ``manifest_path`` (JSONL)."""
    manifest_path = Path(manifest_path)
    records = tuple(records)
    root = manifest_path.parent
    for rec in records:
        _check_files(rec, root)
    kw = {"created": created} if created is not None else {}
    manifest = Manifest(records, render_defaults, **kw)
    try:
        manifest_path.write_text(manifest.dumps(), encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {manifest_path}: {exc}") from exc
    return manifest


def load_manifest(path: str | Path, verify_files: bool = True) -> Manifest:
    path = Path(path)
    if not path.is_file():
        raise MissingAsset(f"manifest {path} not found")
    lines = [ln for ln in path.read_text(encoding="utf-8").split("\n") if ln.strip()]
    if not lines:
        raise SchemaViolation("manifest is empty")
    try:
        rows = [json.loads(ln) for ln in lines]
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"invalid JSON: {exc}") from exc
    header = rows[0]
    if not isinstance(header, dict) or {"version", "created", "render_defaults"} - set(header):
        raise SchemaViolation("line 1 must be the manifest header")
    if header["version"] != MANIFEST_VERSION:
        raise SchemaViolation(f"unsupported manifest version {header['version']}")
    try:
        plan = RenderPlan(**header["render_defaults"])
    except (TypeError, ValueError) as exc:
        raise SchemaViolation(f"bad render_defaults: {exc}") from exc
    records = tuple(_record_from_json(d, i) for i, d in enumerate(rows[1:], start=2))
    manifest = Manifest(records, plan, header["created"], header["version"])
    if verify_files:
        for rec in records:
            _check_files(rec, path.parent)
    return manifest


# ---------------------------------------------------------------------------
# samples and augmentation

@dataclass(frozen=True)
class BaseSample:
    id: str
    document: SketchDocument
    order: tuple[int, ...]
    plan: RenderPlan
    draw_plan: DrawPlan
    seed: int = 0
    source: str = "shapes"


@dataclass(frozen=True, eq=False)
class AugmentSpec:
    id: str
    base: BaseSample
    brush: Brush
    color_name: str
    color: tuple[int, int, int]
    conditioning: Frame

    @property
    def prompt(self) -> str:
        return brush_prompt(self.base.draw_plan, self.base.order)

    @property
    def style(self) -> Style:
        return Style(self.brush, self.color)


def augment_brushes(bases: Sequence[BaseSample], brushes: Sequence[Brush], palette: Palette) -> list[AugmentSpec]:
    """Full bases x brushes x colors grid, ids ``{base}-{brush}-{color}``."""
    if not bases or not brushes or not len(palette):
        raise ValueError("bases, brushes and palette must all be non-empty")
    cache: dict[tuple, Frame] = {}
    specs = []
    for base in bases:
        for brush in brushes:
            for cname, rgb in palette:
                key = (brush.id, cname, base.plan)
                if key not in cache:
                    cache[key] = conditioning_frame(brush, rgb, base.plan)
                specs.append(AugmentSpec(f"{base.id}-{brush.id}-{cname}", base, brush, cname, rgb, cache[key]))
    return specs


def write_sample(base: BaseSample, root: str | Path, fmt: str = "ppm",
                 spec: AugmentSpec | None = None) -> SampleRecord:
    """Render one sample (plain pen, or brush-augmented when ``spec`` is given) under ``root``."""
    root = Path(root)
    sid = spec.id if spec else base.id
    style = spec.style if spec else Style()
    seq = render_sequence(base.document, base.order, base.plan, style)
    write_frames(seq, root / sid, fmt)
    cond = None
    if spec is not None:
        cond = f"{sid}_conditioning.{fmt}"
        write_frame(spec.conditioning, root / cond)
    prompt = spec.prompt if spec else build_prompt(base.draw_plan, base.order)
    return SampleRecord(
        id=sid, prompt=prompt, frames_dir=sid, frame_format=fmt, K=base.plan.frames,
        W=base.plan.width, H=base.plan.height, order=base.order,
        brush_id=spec.brush.id if spec else None, color_name=spec.color_name if spec else None,
        conditioning_frame=cond, seed=base.seed, source=base.source,
    )
