import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sketchforge.errors import InvalidSizeRange, TooManyOrders
from sketchforge.shapes import (
    KINDS, Relation, composition_from_json, composition_to_json, enumerate_orders, gen_composition,
    gen_primitive, single_composition,
)
from sketchforge.svgpath import flatten


def _bbox(stroke):
    # independent region oracle: flatten, take extremes, grow by half width
    pts = flatten(stroke).points
    h = stroke.width / 2
    return pts[:, 0].min() - h, pts[:, 1].min() - h, pts[:, 0].max() + h, pts[:, 1].max() + h


def _inter(a, b):
    w = min(a[2], b[2]) - max(a[0], b[0])
    h = min(a[3], b[3]) - max(a[1], b[1])
    return w * h if w > 0 and h > 0 else 0.0


def _inside(o, i):
    return o[0] < i[0] and o[1] < i[1] and i[2] < o[2] and i[3] < o[3]


def _gap(a, b):
    dx = max(0.0, b[0] - a[2], a[0] - b[2])
    dy = max(0.0, b[1] - a[3], a[1] - b[3])
    return math.hypot(dx, dy)


def test_rectangle_is_closed_four_segment_loop_and_deterministic():
    prim, stroke = gen_primitive("rectangle", 1, canvas=(480, 832))
    ops = [c.kind for c in stroke.commands]
    assert ops == ["MoveTo", "LineTo", "LineTo", "LineTo", "ClosePath"]
    assert gen_primitive("rectangle", 1, canvas=(480, 832)) == (prim, stroke)


@pytest.mark.parametrize("seed", [0, 1, 17, 123])
def test_line_has_one_lineto(seed):
    _, stroke = gen_primitive("line", seed)
    assert [c.kind for c in stroke.commands] == ["MoveTo", "LineTo"]
    assert flatten(stroke).length > 0


def test_circle_points_on_radius():
    prim, stroke = gen_primitive("circle", 5)
    tol = 0.25
    pts = flatten(stroke, tol).points
    r = np.hypot(*(pts - prim.center).T)
    R = prim.params["radius"]
    assert np.all(np.abs(r - R) <= tol + 1e-9)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("seed", range(8))
def test_primitive_fits_canvas(kind, seed):
    W, H = 832, 480
    _, stroke = gen_primitive(kind, seed, (W, H), (0.1, 1.0))
    x0, y0, x1, y1 = _bbox(stroke)
    assert x0 >= 0 and y0 >= 0 and x1 <= W and y1 <= H


def test_invalid_size_range():
    for bad in [(0.0, 0.2), (0.3, 0.2), (0.5, 1.5)]:
        with pytest.raises(InvalidSizeRange):
            gen_primitive("circle", 0, size_range=bad)


def test_spec_relation_examples():
    c = gen_composition("containment", 2, 7)
    outer, inner = (_bbox(s) for s in c.document.strokes)
    assert _inside(outer, inner)
    a = gen_composition("adjacency", 2, 3)
    assert _inter(*(_bbox(s) for s in a.document.strokes)) == 0
    o = gen_composition("overlap", 2, 9)
    p, q = (_bbox(s) for s in o.document.strokes)
    assert _inter(p, q) > 0
    assert _inter(p, q) < (p[2] - p[0]) * (p[3] - p[1]) and _inter(p, q) < (q[2] - q[0]) * (q[3] - q[1])


def _predicate(rel, boxes, canvas=(832, 480)):
    n = len(boxes)
    pairs = list(itertools.combinations(range(n), 2))
    if rel == "containment":
        return all(_inside(boxes[0], b) for b in boxes[1:])
    if rel == "adjacency":
        return all(_inter(boxes[i], boxes[j]) == 0 for i, j in pairs) and \
            all(4 <= _gap(boxes[i], boxes[i + 1]) <= 40 for i in range(n - 1))
    if rel == "overlap":
        return any(_inter(boxes[i], boxes[j]) > 0 and not _inside(boxes[i], boxes[j])
                   and not _inside(boxes[j], boxes[i]) for i, j in pairs)
    cx = [(b[0] + b[2]) / 2 for b in boxes]
    cy = [(b[1] + b[3]) / 2 for b in boxes]
    mx, my = sum(cx) / n, sum(cy) / n
    return all(_inter(boxes[i], boxes[j]) == 0 for i, j in pairs) and \
        all(math.hypot(x - mx, y - my) <= 0.2 * min(canvas) for x, y in zip(cx, cy))


@pytest.mark.parametrize("relation", [r.value for r in Relation])
def test_predicate_audit(relation):
    for seed in range(100):
        n = 3 + seed % 2
        comp = gen_composition(relation, n, 1000 + seed)
        boxes = [_bbox(s) for s in comp.document.strokes]
        assert _predicate(relation, boxes), (relation, seed)
        np.testing.assert_allclose(boxes, comp.regions, atol=1e-9)


def test_composition_determinism_and_json_round_trip():
    a = gen_composition("overlap", 4, 11)
    b = gen_composition("overlap", 4, 11)
    assert a == b
    assert composition_from_json(composition_to_json(a)) == a
    assert a != gen_composition("overlap", 4, 12)


def test_steps_and_names():
    comp = gen_composition("containment", 3, 2)
    names = [n for n, _ in comp.steps]
    assert len(set(names)) == 3 and all(n[0].isupper() for n in names)
    assert all(d for _, d in comp.steps)
    assert comp.n == 3 and len(comp.regions) == 3


def test_single_composition():
    comp = single_composition("triangle", 4)
    assert comp.n == 1 and comp.relation is None


def test_bad_counts():
    with pytest.raises(ValueError):
        gen_composition("grouping", 2, 0)
    with pytest.raises(ValueError):
        gen_composition("adjacency", 9, 0)


def test_enumerate_orders_examples():
    orders = enumerate_orders(3, 3, 0)
    assert orders[0] == (0, 1, 2) and len(set(orders)) == 3
    assert all(sorted(o) == [0, 1, 2] for o in orders)
    assert enumerate_orders(1, 1, 0) == [(0,)]
    with pytest.raises(TooManyOrders):
        enumerate_orders(2, 3, 0)
    assert enumerate_orders(4, 5, 9) == enumerate_orders(4, 5, 9)


@settings(max_examples=40)
@given(st.integers(1, 9), st.integers(1, 30), st.integers(0, 2**31))
def test_orders_distinct(n, count, seed):
    count = min(count, math.factorial(n))
    orders = enumerate_orders(n, count, seed)
    assert len(orders) == count and len(set(orders)) == count
    assert orders[0] == tuple(range(n))
    assert all(sorted(o) == list(range(n)) for o in orders)
