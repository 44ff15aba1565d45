import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def brute_median_filter(img, side):
    """Per-pixel clamp-to-edge window, full sort, middle element."""
    h, w = img.shape
    k = side // 2
    out = np.empty_like(img)
    for y in range(h):
        for x in range(w):
            vals = []
            for dy in range(-k, k + 1):
                for dx in range(-k, k + 1):
                    yy = min(max(y + dy, 0), h - 1)
                    xx = min(max(x + dx, 0), w - 1)
                    vals.append(img[yy, xx])
            vals.sort()
            out[y, x] = vals[len(vals) // 2]
    return out


VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for the acceptance summary."""
    def emit(name, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        request.config.stash.setdefault(VERDICTS, []).append(line)
        print(line)
        return ok
    return emit


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
