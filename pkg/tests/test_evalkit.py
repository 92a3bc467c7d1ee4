import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from conftest import flood_fill_count
from sketchforge.brushes import builtin_brush
from sketchforge.errors import BlankVideo, DimensionMismatch, EmptyMask, LengthMismatch, NotAPermutation
from sketchforge.evalkit import (
    EvalParams, FeatureMap, accumulation_curve, accumulation_from_counts, count_components, curve_csv,
    curve_svg, evaluate, extract_order, frame_deltas, gram_distance, gram_matrix, ink_mask, kendall_tau,
    multi_stroke_ratio, new_ink, ratio_from_counts, read_feature_maps, write_feature_maps,
)
from sketchforge.raster import Frame, Style, render_sequence
from sketchforge.shapes import enumerate_orders, gen_composition
from sketchforge.timeline import RenderPlan


def _frame(h=4, w=4, fill=255):
    return np.full((h, w, 3), fill, np.uint8)


def test_ink_mask_examples():
    f = _frame()
    assert not ink_mask(f).any()
    f[0, 0] = 0
    f[1, 1] = (230, 230, 230)
    f[2, 2] = (255, 255, 200)
    m = ink_mask(f)
    assert m[0, 0] and not m[1, 1] and m[2, 2] and m.sum() == 2
    assert ink_mask(f, threshold=254)[0, 0]
    with pytest.raises(ValueError):
        ink_mask(f, threshold=0)


@given(st.lists(st.integers(0, 255), min_size=3, max_size=3), st.lists(st.integers(0, 255), min_size=3, max_size=3),
       st.integers(1, 254))
def test_ink_mask_matches_definition(px, canvas, thr):
    f = np.array(px, np.uint8).reshape(1, 1, 3)
    expected = max(abs(int(a) - int(b)) for a, b in zip(px, canvas)) > thr
    assert ink_mask(f, tuple(canvas), thr)[0, 0] == expected


def test_new_ink():
    prev = np.array([[1, 1], [0, 0]], bool)
    cur = np.array([[0, 1], [1, 0]], bool)
    np.testing.assert_array_equal(new_ink(prev, cur), [[0, 0], [1, 0]])
    assert not new_ink(cur, cur).any()
    np.testing.assert_array_equal(new_ink(np.zeros_like(cur), cur), cur)
    with pytest.raises(DimensionMismatch):
        new_ink(prev, np.zeros((3, 3), bool))


def test_component_examples():
    assert count_components(np.zeros((8, 8), bool)) == 0
    m = np.zeros((10, 10), bool)
    m[1:4, 1:4] = True
    m[1:4, 6:9] = True
    assert count_components(m, 8, 1) == 2 == flood_fill_count(m, 8, 1)
    d = np.eye(3, dtype=bool)
    assert count_components(d, 8, 1) == 1
    assert count_components(d, 4, 1) == 3
    assert count_components(m, 8, 12) == 0


def test_components_match_flood_fill(rng):
    for i in range(500):
        h, w = rng.integers(1, 33, 2)
        mask = rng.random((h, w)) < rng.uniform(0.1, 0.7)
        for conn in (4, 8):
            for min_area in (1, 12):
                assert count_components(mask, conn, min_area) == flood_fill_count(mask, conn, min_area)


def test_ratio_from_counts_table_values():
    assert abs(100 * ratio_from_counts(2975, 15196) - 19.58) <= 0.01
    assert abs(100 * ratio_from_counts(2351, 6361) - 36.96) <= 0.01
    with pytest.raises(ValueError):
        ratio_from_counts(3, 2)


def test_multi_stroke_ratio_two_blobs():
    seq = np.stack([_frame(20, 20)] * 3)
    seq[1, 2:6, 2:6] = 0
    seq[2] = seq[1]
    seq[2, 12:16, 2:6] = 0
    seq[2, 12:16, 12:16] = 0
    ratio, multi, considered, deltas = multi_stroke_ratio(seq)
    assert (ratio, multi, considered) == (0.5, 1, 2)
    assert [d.new_components for d in deltas] == [0, 1, 2]
    assert [d.new_pixels for d in deltas] == [0, 16, 32]


def test_accumulation_examples():
    assert accumulation_from_counts([10, 10, 20, 0]) == [0.25, 0.5, 1.0, 1.0]
    with pytest.raises(BlankVideo):
        accumulation_curve(np.stack([_frame()] * 3))


def test_accumulation_of_render_and_midpoint():
    comp = gen_composition("adjacency", 3, 4)
    seq = render_sequence(comp.document, (0, 1, 2), RenderPlan(frames=20))
    c = accumulation_curve(seq)
    assert len(c) == 20 and c[-1] == 1.0 and all(a <= b for a, b in zip(c, c[1:]))


def _render(comp, order, style=Style(), frames=24):
    return render_sequence(comp.document, order, RenderPlan(frames=frames), style)


@pytest.mark.parametrize("relation", ["containment", "adjacency", "overlap", "grouping"])
def test_render_gives_zero_ratio_and_recovers_order(relation):
    comp = gen_composition(relation, 3, 21)
    for order in enumerate_orders(comp, 3, 0):
        seq = _render(comp, order)
        deltas = frame_deltas(seq)
        # tiny deltas never count; the converse fails for scattered speckle
        assert all(d.new_components == 0 for d in deltas if d.new_pixels < 12)
        assert multi_stroke_ratio(seq, deltas=deltas)[0] == 0.0
        res = extract_order(seq, comp.regions)
        assert res.order == order and res.inactive == ()
        assert kendall_tau(res.order, order) == 1.0


def test_extract_order_singleton_and_inactive():
    comp = gen_composition("adjacency", 2, 3)
    seq = _render(comp, (1, 0))
    res = extract_order(seq, comp.regions[1:])
    assert res.order == (0,)
    blank = (0.0, 0.0, 5.0, 5.0)
    res = extract_order(seq, list(comp.regions) + [blank])
    assert res.order == (1, 0) and res.inactive == (2,)
    with pytest.raises(DimensionMismatch):
        extract_order(seq, [(5000.0, 5000.0, 5010.0, 5010.0)])
    report = evaluate(seq, regions=list(comp.regions) + [blank], target_order=(1, 0, 2))
    assert report.tau == 1.0 and report.inactive == [2]


def test_brush_renders_stay_mostly_single_stroke():
    comp = gen_composition("grouping", 3, 5)
    for bid in ("dots", "splatter", "bubbles"):
        seq = _render(comp, (2, 1, 0), Style(builtin_brush(bid), (30, 60, 160)), frames=30)
        assert multi_stroke_ratio(seq)[0] <= 0.1
        assert extract_order(seq, comp.regions).order == (2, 1, 0)


def test_kendall_examples():
    assert kendall_tau([0, 1, 2], [0, 1, 2]) == 1.0
    assert kendall_tau([2, 1, 0], [0, 1, 2]) == -1.0
    assert abs(kendall_tau([0, 1, 3, 2], [0, 1, 2, 3]) - (1 - 4 / 12)) <= 1e-9
    with pytest.raises(LengthMismatch):
        kendall_tau([0, 1], [0, 1, 2])
    with pytest.raises(NotAPermutation):
        kendall_tau([0, 0, 1], [0, 1, 2])
    with pytest.raises(LengthMismatch):
        kendall_tau([0], [0])


@given(st.permutations(range(9)))
def test_kendall_matches_scipy(perm):
    ref = stats.kendalltau(perm, range(9)).statistic
    assert abs(kendall_tau(perm, list(range(9))) - ref) <= 1e-12


def _maps(rng, shapes):
    return [FeatureMap(rng.normal(size=s)) for s in shapes]


def test_gram_properties(rng):
    shapes = [(3, 5, 4), (6, 2, 2)]
    a, b = _maps(rng, shapes), _maps(rng, shapes)
    assert gram_distance(a, a) == 0.0
    assert gram_distance(a, b) == gram_distance(b, a) > 0
    for p, q in [(0.5, 2.0), (3.0, -1.0), (1.0, 1.0)]:
        fa, fb = FeatureMap(np.full((1, 4, 3), p)), FeatureMap(np.full((1, 4, 3), q))
        assert abs(gram_distance([fa], [fb]) - abs(p * p - q * q)) <= 1e-9
    s = 1.7
    np.testing.assert_allclose(gram_matrix(FeatureMap(s * a[0].values)), s * s * gram_matrix(a[0]))


def test_gram_masks_and_errors(rng):
    a, b = _maps(rng, [(2, 3, 3)]), _maps(rng, [(2, 3, 3)])
    mask = np.zeros((3, 3), bool)
    mask[0, 0] = True
    d = gram_distance(a, b, [mask])
    F, G = a[0].values[:, 0, 0], b[0].values[:, 0, 0]
    assert abs(d - np.linalg.norm(np.outer(F, F) - np.outer(G, G))) <= 1e-12
    with pytest.raises(EmptyMask):
        gram_distance(a, b, [np.zeros((3, 3), bool)])
    with pytest.raises(DimensionMismatch):
        gram_distance(a, _maps(rng, [(2, 3, 4)]))
    with pytest.raises(DimensionMismatch):
        gram_distance(a, a + a)
    with pytest.raises(DimensionMismatch):
        gram_distance(a, b, [np.ones((2, 2), bool)])
    with pytest.raises(ValueError):
        FeatureMap(np.array([[[np.nan]]]))


def test_feature_map_binary_round_trip(tmp_path, rng):
    maps = _maps(rng, [(2, 3, 4), (1, 1, 5)])
    p = tmp_path / "f.bin"
    write_feature_maps(p, maps)
    raw = p.read_bytes()
    assert raw[:12] == np.array([2, 3, 4], "<i4").tobytes()
    back = read_feature_maps(p)
    for m, r in zip(maps, back):
        np.testing.assert_array_equal(r.values, m.values.astype(np.float32))
    p.write_bytes(raw[:-4])
    with pytest.raises(DimensionMismatch):
        read_feature_maps(p)


def test_params_validation():
    with pytest.raises(ValueError):
        EvalParams(connectivity=6)
    with pytest.raises(ValueError):
        EvalParams(activation_fraction=0)


def test_report_outputs():
    comp = gen_composition("adjacency", 2, 3)
    rep = evaluate(_render(comp, (0, 1)), regions=comp.regions, target_order=(0, 1))
    assert rep.multi_stroke_ratio == rep.multi_stroke_frames / rep.considered_frames
    assert '"tau": 1.0' in rep.dumps()
    csv = curve_csv(rep.accumulation)
    assert csv.splitlines()[0] == "frame_index,value" and len(csv.splitlines()) == 25
    assert curve_svg(rep.accumulation, title="a<b").count("a&lt;b") == 1
