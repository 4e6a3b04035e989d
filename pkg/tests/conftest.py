import numpy as np
import pytest
from hypothesis import strategies as st

from csirec.graph import BipartiteGraph, SplitDataset, build_graph
from csirec.verify import TOY_LINKS


@pytest.fixture
def toy():
    """Three objects, six users; u1 holds o1 only, o1 meets o2 and o3 only through u2."""
    return build_graph(3, 6, TOY_LINKS)


@pytest.fixture
def t1():
    """u1 -> {o1, o2}, u2 -> {o2}."""
    return build_graph(2, 2, [(0, 0), (1, 0), (1, 1)])


def make_split(training: BipartiteGraph, test_links) -> SplitDataset:
    test = np.asarray(sorted(test_links), dtype=np.int64).reshape(-1, 2)
    return SplitDataset(training, test[:, 0].copy(), test[:, 1].copy(), seed=0)


@st.composite
def graphs(draw, max_objects=12, max_users=12):
    n = draw(st.integers(1, max_objects))
    m = draw(st.integers(1, max_users))
    cells = draw(st.lists(st.booleans(), min_size=n * m, max_size=n * m))
    adj = np.array(cells, dtype=bool).reshape(n, m)
    o, u = np.nonzero(adj)
    return build_graph(n, m, np.column_stack([o, u]))


@pytest.fixture
def ratings_file(tmp_path):
    """Synthetic ml-100k style ratings: 40 users, 60 items, popularity skewed."""
    rng = np.random.default_rng(17)
    weights = 1.0 / np.arange(1, 61)
    weights /= weights.sum()
    lines = []
    for u in range(40):
        items = rng.choice(60, size=int(rng.integers(6, 20)), replace=False, p=weights)
        for i in items:
            lines.append(f"{100 + u}\t{500 + i}\t{int(rng.integers(1, 6))}\t0\n")
    path = tmp_path / "ratings.data"
    path.write_text("".join(lines))
    return path


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, text = results[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {text}")
