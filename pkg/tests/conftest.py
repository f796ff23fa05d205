import numpy as np
import pytest

from graphtunnel.graph_core import build_graph, detect_wells, make_potential

ACCEPTANCE_LINES: list[str] = []


def path_graph(V, prefix="v"):
    labels = [f"{prefix}{i}" for i in range(len(V))]
    g = build_graph(labels, list(zip(labels, labels[1:])))
    v = make_potential(g, V)
    return g, v, detect_wells(g, v)


def cycle_graph(V, prefix="v"):
    labels = [f"{prefix}{i}" for i in range(len(V))]
    edges = list(zip(labels, labels[1:])) + [(labels[-1], labels[0])]
    g = build_graph(labels, edges)
    v = make_potential(g, V)
    return g, v, detect_wells(g, v)


def p3():
    g = build_graph(["a", "b", "c"], [("a", "b"), ("b", "c")])
    v = make_potential(g, {"a": 0, "b": 1, "c": 0})
    return g, v, detect_wells(g, v)


def p5():
    return path_graph([0, 1, 1, 1, 0])


def c6():
    return cycle_graph([0, 1, 0, 1, 0, 1])


def p5_plus_detached():
    labels = ["v0", "v1", "v2", "v3", "v4", "w"]
    g = build_graph(labels, [("v0", "v1"), ("v1", "v2"), ("v2", "v3"), ("v3", "v4")])
    v = make_potential(g, [0, 1, 1, 1, 0, 0])
    return g, v, detect_wells(g, v)


def petersen_like():
    outer = [f"o{i}" for i in range(5)]
    inner = [f"i{i}" for i in range(5)]
    edges = [(outer[i], outer[(i + 1) % 5]) for i in range(5)]
    edges += [(inner[i], inner[(i + 2) % 5]) for i in range(5)]
    edges += [(outer[i], inner[i]) for i in range(5)]
    g = build_graph(outer + inner, edges)
    V = {x: 1.0 for x in g.vertices}
    V["o0"] = 0.0
    V["i2"] = 0.0
    V["o3"] = 0.0
    v = make_potential(g, V)
    return g, v, detect_wells(g, v)


def random_valid_graph(seed, n_max=12, p=0.3):
    """Random graph with an independent set of wells and V in [0.5, 2] elsewhere."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, n_max + 1))
    labels = [f"x{i}" for i in range(n)]
    edges = [(labels[i], labels[k]) for i in range(n) for k in range(i + 1, n) if rng.random() < p]
    g = build_graph(labels, edges)
    wells = []
    for x in rng.permutation(labels):
        if len(wells) < 3 and not any(g.has_edge(x, w) for w in wells):
            wells.append(str(x))
    V = {x: (0.0 if x in wells else float(rng.uniform(0.5, 2.0))) for x in labels}
    v = make_potential(g, V)
    return g, v, detect_wells(g, v)


NAMED_GRAPHS = {"P3": p3, "P5": p5, "C6": c6, "P5+w": p5_plus_detached, "petersen": petersen_like}


@pytest.fixture
def P3():
    return p3()


@pytest.fixture
def P5():
    return p5()


@pytest.fixture
def C6():
    return c6()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
