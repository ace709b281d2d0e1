import numpy as np
import pytest

from lapident.graph import Graph, complete_graph, cycle_graph, generate_random_regular, path_graph


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner, r_hint=3)


def small_corpus() -> dict[str, Graph]:
    """Connected graphs with n <= 64, mixing symmetric and random instances."""
    corpus = {
        "path2": path_graph(2),
        "path3": path_graph(3),
        "path7": path_graph(7),
        "c6": cycle_graph(6),
        "c9": cycle_graph(9),
        "k4": complete_graph(4),
        "k6": complete_graph(6),
        "petersen": petersen(),
    }
    for n, r, seed in [(8, 3, 1), (16, 3, 2), (20, 4, 3), (32, 3, 4), (40, 5, 5), (64, 3, 6), (64, 4, 7)]:
        corpus[f"rr{n}_{r}_{seed}"] = generate_random_regular(n, r, seed)
    return corpus


CORPUS = small_corpus()


@pytest.fixture(params=sorted(CORPUS), scope="session")
def corpus_graph(request) -> Graph:
    return CORPUS[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[c]
        terminalreporter.write_line(f"criterion {c}: {'PASS' if ok else 'FAIL'}: {detail}")
