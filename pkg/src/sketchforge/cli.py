"""``sketchforge`` command line.

Exit codes: 0 success, 1 failed verification (flow-demo), 2 domain error,
64 usage error.

Seeds: gen-shapes derives each composition's seed from the run's master seed
(``--seed``) and the composition counter given by ``--seeds`` as
``derive_seed(master, counter)``: the first 32-bit word of
``numpy.random.SeedSequence([master, counter])``. The same seed drives the
layout and the choice of drawing orders.

Every subcommand with an output directory writes ``run.json`` holding the
fully resolved configuration and the tool version (no timestamps, so reruns
are byte-identical).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .brushes import DEFAULT_PALETTE, Palette, builtin_brushes, load_brushes, save_brushes
from .dataset import (
    BaseSample, SampleRecord, assemble, augment_brushes, load_manifest, read_frame, write_frames, write_sample,
)
from .errors import MissingAsset, SketchforgeError
from .evalkit import EvalParams, curve_csv, curve_svg, evaluate, gram_distance, read_feature_maps
from .flowmatch import euler_sample, exact_velocity
from .prompts import DrawPlan, build_prompt, shape_steps
from .raster import FrameSequence, Style, render_sequence
from .shapes import Relation, composition_from_json, composition_to_json, enumerate_orders, gen_composition
from .svgpath import document_from_json, document_to_json, parse_color, parse_svg
from .timeline import RenderPlan, check_permutation, compile_timeline

EXIT_OK, EXIT_FAIL, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2, 64
FLOW_TOL = 1e-12
DEFAULT_ORDERS = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def derive_seed(master: int, counter: int) -> int:
    return int(np.random.SeedSequence([master, counter]).generate_state(1)[0])


def workers() -> int:
    try:
        return max(1, int(os.environ.get("SKETCHFORGE_WORKERS", "1")))
    except ValueError:
        return 1


def _pool_map(fn: Callable, jobs: Sequence) -> list:
    # results come back in job order whatever the pool size
    n = min(workers(), len(jobs))
    if n <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, jobs))


def parse_int_list(text: str) -> list[int]:
    """``"0..4"`` (inclusive range), ``"2,0,1"`` or a mix such as ``"0..2,7"``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise UsageError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    return out


def _int_list(text: str) -> list[int]:
    try:
        return parse_int_list(text)
    except (ValueError, UsageError) as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}: {exc}")


def _write_json(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _run_meta(out: Path, args: argparse.Namespace) -> None:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    _write_json(out / "run.json", {"tool": "sketchforge", "version": __version__, "config": config,
                                   "workers_env": "SKETCHFORGE_WORKERS"})


def _plan(args) -> RenderPlan:
    return RenderPlan(args.frames, args.width, args.height, args.blank_lead, args.hold_tail, args.fps)


def _add_plan_flags(p):
    d = RenderPlan()
    p.add_argument("--frames", type=int, default=d.frames)
    p.add_argument("--width", type=int, default=d.width)
    p.add_argument("--height", type=int, default=d.height)
    p.add_argument("--blank-lead", type=int, default=d.blank_lead)
    p.add_argument("--hold-tail", type=int, default=d.hold_tail)
    p.add_argument("--fps", type=int, default=d.fps)
    p.add_argument("--format", choices=("ppm", "png"), default="ppm")


def _add_eval_flags(p):
    d = EvalParams()
    p.add_argument("--threshold", type=int, default=d.threshold)
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=d.connectivity)
    p.add_argument("--min-area", type=int, default=d.min_area)
    p.add_argument("--activation-fraction", type=float, default=d.activation_fraction)


def _eval_params(args) -> EvalParams:
    return EvalParams(threshold=args.threshold, connectivity=args.connectivity, min_area=args.min_area,
                      activation_fraction=args.activation_fraction)


def _select_brushes(args):
    brushes = load_brushes(args.brushes_dir) if args.brushes_dir else builtin_brushes()
    if args.brushes is not None:
        wanted = [b for b in args.brushes.split(",") if b]
        by_id = {b.id: b for b in brushes}
        unknown = [b for b in wanted if b not in by_id]
        if unknown:
            raise UsageError(f"unknown brush id(s) {unknown}; available {sorted(by_id)}")
        brushes = [by_id[b] for b in wanted]
    if not brushes:
        raise UsageError("no brushes selected")
    return brushes


def _palette(args) -> Palette:
    palette = DEFAULT_PALETTE
    if args.palette:
        palette = Palette.from_json(json.loads(Path(args.palette).read_text()))
    if args.colors is not None:
        wanted = [c for c in args.colors.split(",") if c]
        try:
            palette = Palette(tuple((c, palette.get(c)) for c in wanted)) if wanted else None
        except KeyError as exc:
            raise UsageError(str(exc.args[0]))
        if palette is None:
            raise UsageError("no colors selected")
    return palette


# ---------------------------------------------------------------------------
# gen-shapes

def _gen_job(job):
    relation, n, count, counter, master, plan, fmt, out = job
    seed = derive_seed(master, counter)
    comp = gen_composition(relation, n, seed, canvas=(plan.width, plan.height))
    draw_plan = shape_steps(comp)
    orders = enumerate_orders(comp, count, seed)
    cid = f"{relation}-n{n}-c{counter}"
    out = Path(out)
    data = composition_to_json(comp)
    data.update(id=cid, counter=counter, orders=[list(o) for o in orders], draw_plan=draw_plan.to_json())
    _write_json(out / "compositions" / f"{cid}.json", data)
    records = []
    for k, order in enumerate(orders):
        base = BaseSample(f"{cid}-o{k}", comp.document, order, plan, draw_plan, seed, "shapes")
        rec = write_sample(base, out, fmt)
        fdir = out / rec.frames_dir
        (fdir / "prompt.txt").write_text(rec.prompt, encoding="utf-8")
        _write_json(fdir / "timeline.json", _timeline_json(base))
        _write_sidecars(fdir, comp.document, draw_plan, comp.regions)
        records.append(rec)
    return records


def _timeline_json(base: BaseSample) -> dict:
    return compile_timeline(base.document, base.order, base.plan).to_json()


def _write_sidecars(fdir: Path, doc, draw_plan: DrawPlan | None, regions) -> None:
    _write_json(fdir / "document.json", document_to_json(doc))
    if draw_plan is not None:
        _write_json(fdir / "steps.json", draw_plan.to_json())
    if regions is not None:
        _write_json(fdir / "regions.json", [list(r) for r in regions])


def cmd_gen_shapes(args) -> int:
    out = Path(args.out)
    plan = _plan(args)
    out.mkdir(parents=True, exist_ok=True)
    if args.count is None:
        args.count = min(DEFAULT_ORDERS, math.factorial(args.n))
    jobs = [(args.relation, args.n, args.count, c, args.seed, plan, args.format, str(out)) for c in args.seeds]
    records = [r for batch in _pool_map(_gen_job, jobs) for r in batch]
    assemble(records, out / "manifest.jsonl", plan)
    _run_meta(out, args)
    print(f"{len(args.seeds)} compositions x {args.count} orders = {len(records)} samples -> {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# render

def _load_input(path: Path, plan: RenderPlan, strict: bool):
    """(document, draw plan or None, regions or None) from an SVG or composition JSON."""
    if path.suffix.lower() == ".svg":
        doc = parse_svg(path.read_text(encoding="utf-8"), strict=strict, canvas=(plan.width, plan.height),
                        name=path.stem)
        return doc, None, None
    data = json.loads(path.read_text(encoding="utf-8"))
    if "relation" in data:
        comp = composition_from_json(data)
        return comp.document, shape_steps(comp), comp.regions
    return document_from_json(data), None, None


def _style(args) -> Style:
    color = None
    if args.color:
        try:
            color = DEFAULT_PALETTE.get(args.color)
        except KeyError:
            try:
                color = parse_color(args.color)
            except ValueError:
                color = None
            if color is None:
                raise UsageError(f"unknown color {args.color!r}")
    if not args.brush:
        return Style(None, color)
    brushes = load_brushes(args.brushes_dir) if args.brushes_dir else builtin_brushes()
    by_id = {b.id: b for b in brushes}
    if args.brush not in by_id:
        raise UsageError(f"unknown brush {args.brush!r}; available {sorted(by_id)}")
    return Style(by_id[args.brush], color or (0, 0, 0))


def cmd_render(args) -> int:
    plan = _plan(args)
    doc, draw_plan, regions = _load_input(Path(args.input), plan, args.strict)
    order = check_permutation(args.order if args.order is not None else range(len(doc.strokes)),
                              len(doc.strokes))
    style = _style(args)
    seq = render_sequence(doc, order, plan, style)
    out = Path(args.out)
    write_frames(seq, out, args.format)
    _write_json(out / "timeline.json", seq.timeline.to_json())
    _write_sidecars(out, doc, draw_plan, regions)
    if draw_plan is not None:
        (out / "prompt.txt").write_text(build_prompt(draw_plan, order), encoding="utf-8")
    _run_meta(out, args)
    print(f"{len(seq)} frames {plan.width}x{plan.height} -> {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# augment

def _base_from_record(rec: SampleRecord, root: Path, lead: int, tail: int) -> BaseSample:
    fdir = root / rec.frames_dir
    doc_path, steps_path = fdir / "document.json", fdir / "steps.json"
    if not doc_path.is_file() or not steps_path.is_file():
        raise MissingAsset(f"{rec.id}: augmentation needs document.json and steps.json in {fdir}")
    doc = document_from_json(json.loads(doc_path.read_text()))
    draw_plan = DrawPlan.from_json(json.loads(steps_path.read_text()))
    plan = RenderPlan(rec.K, rec.W, rec.H, lead, tail)
    return BaseSample(rec.id, doc, rec.order, plan, draw_plan, rec.seed, rec.source)


def _augment_job(job):
    spec, out, fmt = job
    rec = write_sample(spec.base, out, fmt, spec)
    fdir = Path(out) / rec.frames_dir
    _write_sidecars(fdir, spec.base.document, spec.base.draw_plan, None)
    return rec


def cmd_augment(args) -> int:
    src = Path(args.manifest)
    brushes = _select_brushes(args)
    palette = _palette(args)
    manifest = load_manifest(src)
    d = manifest.render_defaults
    bases = [_base_from_record(r, src.parent, d.blank_lead, d.hold_tail) for r in manifest.samples]
    total = len(bases) * len(brushes) * len(palette)
    print(f"{len(bases)} bases x {len(brushes)} brushes x {len(palette)} colors = {total} samples")
    if args.dry_run:
        return EXIT_OK
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    specs = augment_brushes(bases, brushes, palette)
    records = _pool_map(_augment_job, [(s, str(out), args.format) for s in specs])
    assemble(records, out / "manifest.jsonl", d)
    _run_meta(out, args)
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval

def _read_sequence(fdir: Path) -> FrameSequence:
    files = sorted(p for p in fdir.glob("frame_*") if p.suffix in (".ppm", ".png"))
    if len(files) < 2:
        raise MissingAsset(f"{fdir}: need at least two frame files")
    return FrameSequence.from_frames([read_frame(p) for p in files])


def _eval_one(fdir: Path, params: EvalParams, regions_path: Path | None, target, out: Path, title: str):
    seq = _read_sequence(fdir)
    regions = None
    if regions_path is not None:
        data = json.loads(regions_path.read_text())
        regions = [tuple(r) for r in (data["regions"] if isinstance(data, dict) else data)]
    report = evaluate(seq, params, regions, target)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.dumps(), encoding="utf-8")
    (out / "curve.csv").write_text(curve_csv(report.accumulation), encoding="utf-8")
    (out / "curve.svg").write_text(curve_svg(report.accumulation, title=title), encoding="utf-8")
    return report


def _eval_job(job):
    fdir, params, regions, target, out, title = job
    r = _eval_one(Path(fdir), params, Path(regions) if regions else None, target, Path(out), title)
    return r.multi_stroke_frames, r.considered_frames, r.tau


def cmd_eval(args) -> int:
    params = _eval_params(args)
    src = Path(args.input)
    out = Path(args.out)
    if src.is_file():
        manifest = load_manifest(src)
        jobs = []
        for rec in manifest.samples:
            fdir = src.parent / rec.frames_dir
            reg = fdir / "regions.json"
            reg = str(reg) if reg.is_file() else None
            jobs.append((str(fdir), params, reg, list(rec.order) if reg else None, str(out / rec.id), rec.id))
        results = _pool_map(_eval_job, jobs)
        multi = sum(m for m, _, _ in results)
        considered = sum(c for _, c, _ in results)
        taus = [t for _, _, t in results if t is not None]
        summary = {
            "samples": len(results),
            "multi_stroke_frames": multi,
            "considered_frames": considered,
            "multi_stroke_ratio": multi / considered if considered else 0.0,
            "mean_tau": float(np.mean(taus)) if taus else None,
        }
        _write_json(out / "summary.json", summary)
        print(json.dumps(summary, sort_keys=True))
    else:
        if not src.is_dir():
            raise UsageError(f"{src} is neither a manifest nor a frame directory")
        regions = Path(args.regions) if args.regions else None
        if args.target_order is not None and regions is None:
            raise UsageError("--target-order needs --regions")
        report = _eval_one(src, params, regions, args.target_order, out, src.name)
        print(f"multi_stroke_ratio={report.multi_stroke_ratio} final={report.accumulation[-1]}"
              + (f" order={report.order} tau={report.tau}" if report.order is not None else ""))
    _run_meta(out, args)
    return EXIT_OK


# ---------------------------------------------------------------------------
# flow-demo, export-brushes, style-distance

def cmd_flow_demo(args) -> int:
    shape = tuple(args.shape)
    rng = np.random.default_rng(args.seed)
    x0 = rng.standard_normal(shape)
    eps = rng.standard_normal(shape)
    vfn = exact_velocity(x0, eps)
    worst = 0.0
    print(f"shape={shape or 'scalar'} seed={args.seed}")
    print(f"{'steps':>6}  {'max_abs_error':>14}")
    for steps in args.steps:
        err = float(np.max(np.abs(euler_sample(vfn, eps, steps) - x0))) if x0.size else 0.0
        worst = max(worst, err)
        print(f"{steps:>6}  {err:>14.3e}")
    ok = worst <= FLOW_TOL
    print(f"{'PASS' if ok else 'FAIL'} (tolerance {FLOW_TOL:g})")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_export_brushes(args) -> int:
    out = Path(args.out)
    save_brushes(builtin_brushes(), out)
    _write_json(out / "palette.json", [[n, list(c)] for n, c in DEFAULT_PALETTE])
    print(f"{len(builtin_brushes())} brushes, {len(DEFAULT_PALETTE)} colors -> {out}")
    return EXIT_OK


def cmd_style_distance(args) -> int:
    a, b = read_feature_maps(args.a), read_feature_maps(args.b)
    print(repr(gram_distance(a, b)))
    return EXIT_OK


def _shape(text: str) -> list[int]:
    if text.strip() in ("", "scalar"):
        return []
    try:
        dims = [int(v) for v in text.replace("x", ",").split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad shape {text!r}")
    if any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError("dimensions must be positive")
    return dims


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sketchforge", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"sketchforge {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen-shapes", help="generate shape compositions and render every order")
    g.add_argument("--relation", required=True, choices=[r.value for r in Relation])
    g.add_argument("--n", type=int, default=3, help="shapes per composition")
    g.add_argument("--count", type=int, default=None,
                   help="drawing orders per composition (default: 3, or n! when fewer exist)")
    g.add_argument("--seeds", type=_int_list, default=[0], help='composition counters, e.g. "0..4"')
    g.add_argument("--seed", type=int, default=0, help="master seed")
    g.add_argument("--out", required=True)
    _add_plan_flags(g)
    g.set_defaults(func=cmd_gen_shapes)

    r = sub.add_parser("render", help="render an SVG or composition JSON into frames")
    r.add_argument("input")
    r.add_argument("--order", type=_int_list, default=None, help='e.g. "2,0,1"; identity by default')
    r.add_argument("--brush", default=None)
    r.add_argument("--brushes-dir", default=None)
    r.add_argument("--color", default=None, help="palette name or #rrggbb")
    r.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True)
    r.add_argument("--out", required=True)
    _add_plan_flags(r)
    r.set_defaults(func=cmd_render)

    a = sub.add_parser("augment", help="brush x color augmentation of a manifest")
    a.add_argument("--manifest", required=True)
    a.add_argument("--brushes-dir", default=None, help="defaults to the built-in brushes")
    a.add_argument("--brushes", default=None, help="comma-separated brush ids to use")
    a.add_argument("--palette", default=None, help="JSON palette file")
    a.add_argument("--colors", default=None, help="comma-separated palette names to use")
    a.add_argument("--format", choices=("ppm", "png"), default="ppm")
    a.add_argument("--dry-run", action="store_true")
    a.add_argument("--out", default=None)
    a.set_defaults(func=cmd_augment)

    e = sub.add_parser("eval", help="metrics for a frame directory or a whole manifest")
    e.add_argument("input", help="frame directory or manifest.jsonl")
    e.add_argument("--regions", default=None, help="JSON list of [x0, y0, x1, y1] boxes")
    e.add_argument("--target-order", type=_int_list, default=None)
    e.add_argument("--out", required=True)
    _add_eval_flags(e)
    e.set_defaults(func=cmd_eval)

    f = sub.add_parser("flow-demo", help="check Euler sampling against the exact velocity")
    f.add_argument("--shape", type=_shape, default=[4, 8, 8], help='e.g. "4,8,8" or "scalar"')
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--steps", type=_int_list, default=[1, 7, 50])
    f.set_defaults(func=cmd_flow_demo)

    x = sub.add_parser("export-brushes", help="write the built-in brushes and palette")
    x.add_argument("--out", required=True)
    x.set_defaults(func=cmd_export_brushes)

    s = sub.add_parser("style-distance", help="Gram distance between two feature-map files")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_style_distance)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "augment" and not args.dry_run and not args.out:
        parser.error("augment needs --out unless --dry-run is given")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sketchforge: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SketchforgeError, ValueError, OSError) as exc:
        print(f"sketchforge: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
