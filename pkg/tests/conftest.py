import sys
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def segment_distance_oracle(px, py, p, q):
    """Per-pixel distance to segment pq, one point at a time (slow but obvious)."""
    out = np.empty(px.shape)
    (x0, y0), (x1, y1) = p, q
    dx, dy = x1 - x0, y1 - y0
    L2 = dx * dx + dy * dy
    for idx in np.ndindex(px.shape):
        x, y = px[idx], py[idx]
        t = 0.0 if L2 == 0 else min(1.0, max(0.0, ((x - x0) * dx + (y - y0) * dy) / L2))
        cx, cy = x0 + t * dx, y0 + t * dy
        out[idx] = ((x - cx) ** 2 + (y - cy) ** 2) ** 0.5
    return out


def flood_fill_count(mask, connectivity, min_area):
    """Independent component counter: iterative flood fill over a Python grid."""
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    seen = np.zeros_like(mask)
    if connectivity == 4:
        nbrs = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    else:
        nbrs = [(dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dy, dx) != (0, 0)]
    count = 0
    for y in range(h):
        for x in range(w):
            if not mask[y, x] or seen[y, x]:
                continue
            stack, size = [(y, x)], 0
            seen[y, x] = True
            while stack:
                cy, cx = stack.pop()
                size += 1
                for dy, dx in nbrs:
                    ny, nx = cy + dy, cx + dx
                    if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not seen[ny, nx]:
                        seen[ny, nx] = True
                        stack.append((ny, nx))
            if size >= min_area:
                count += 1
    return count


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
