"""Synthetic sequential-sketch data: shapes, stroke timelines, rendering, metrics."""

__version__ = "0.1.0"

from .errors import SketchforgeError
from .evalkit import EvalParams, evaluate, extract_order, kendall_tau, multi_stroke_ratio
from .prompts import DrawPlan, brush_prompt, build_prompt, shape_steps
from .raster import Brush, Frame, FrameSequence, Style, conditioning_frame, render_frame, render_sequence
from .shapes import Relation, enumerate_orders, gen_composition, gen_primitive
from .svgpath import SketchDocument, Stroke, flatten, parse_svg
from .timeline import RenderPlan, Timeline, compile_timeline, reveal_at

__all__ = [
    "Brush", "DrawPlan", "EvalParams", "Frame", "FrameSequence", "Relation", "RenderPlan",
    "SketchDocument", "SketchforgeError", "Stroke", "Style", "Timeline", "brush_prompt", "build_prompt",
    "compile_timeline", "conditioning_frame", "enumerate_orders", "evaluate", "extract_order", "flatten",
    "gen_composition", "gen_primitive", "kendall_tau", "multi_stroke_ratio", "parse_svg", "render_frame",
    "render_sequence", "reveal_at", "shape_steps",
]
