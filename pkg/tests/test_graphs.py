import math
from fractions import Fraction

import networkx as nx
import pytest

from conftest import oracle_paths, petersen, to_nx
from smallcancel.graphs import (DisconnectedError, FamilySpec, GenerationError,
                                Graph, GraphError, cycle_graph,
                                enumerate_paths, iter_path_tuples, measure_A,
                                random_regular, validate_family)


def path_graph(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)], name=f"P{n}")


def test_metrics_cycle():
    m = cycle_graph(12).metrics()
    assert m.girth == 12
    assert m.diameter == 6
    assert m.distance_table[0][6] == 6
    assert all(m.distance_table[v][v] == 0 for v in range(12))


def test_metrics_tree():
    m = path_graph(5).metrics()
    assert m.girth == math.inf
    assert m.diameter == 4


def test_metrics_petersen():
    m = petersen().metrics()
    assert m.girth == 5
    assert m.diameter == 2


def test_metrics_match_networkx():
    for g in [cycle_graph(9), petersen(),
              random_regular(14, 3, seed=3, min_girth=4)]:
        h = nx.Graph(to_nx(g))
        m = g.metrics()
        assert m.girth == nx.girth(h)
        assert m.diameter == nx.diameter(h)
        for p in range(g.vertex_count):
            for q in range(g.vertex_count):
                assert m.distance_table[p][q] == \
                    nx.shortest_path_length(h, p, q)


def test_metrics_multiedge_and_loop():
    assert Graph(2, [(0, 1), (0, 1)], name="double").metrics().girth == 2
    assert Graph(1, [(0, 0)], name="loop").metrics().girth == 1


def test_disconnected_rejected():
    g = Graph(4, [(0, 1), (2, 3)], name="split")
    with pytest.raises(DisconnectedError) as exc:
        g.metrics()
    a, b = exc.value.representatives
    assert {a, b} <= {0, 1, 2, 3}


def test_enumerate_paths_counts():
    assert len(list(enumerate_paths(cycle_graph(6), 3))) == 12
    assert len(list(enumerate_paths(petersen(), 2))) == 60
    cubic = random_regular(10, 3, seed=1, min_girth=4)
    assert len(list(enumerate_paths(cubic, 1))) == 3 * 10


def test_enumerate_paths_valid_and_match_oracle():
    for g in [cycle_graph(5), petersen()]:
        for length in [1, 2, 3]:
            got = list(iter_path_tuples(g, length))
            assert got == sorted(got)
            assert sorted(got) == sorted(oracle_paths(g, length))
    for p in enumerate_paths(petersen(), 3):
        p.validate(petersen())


def test_path_reverse():
    g = cycle_graph(6)
    for p in enumerate_paths(g, 3):
        r = p.reverse()
        r.validate(g)
        assert r.start(g) == p.end(g)
        assert r.reverse().edges == p.edges


def test_graph_text_roundtrip():
    g = random_regular(10, 3, seed=5, min_girth=3)
    text = g.to_text()
    g2 = Graph.from_text(text)
    assert g2.to_text() == text
    assert g2.edges == g.edges and g2.name == g.name


def test_graph_text_errors():
    with pytest.raises(GraphError):
        Graph.from_text("nonsense\n")
    with pytest.raises(GraphError):
        Graph.from_text("GRAPH g V 2 E 2\n0 1\n")


def test_random_regular_k4():
    g = random_regular(4, 3, seed=7, min_girth=3)
    assert sorted(g.edges) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def test_random_regular_determinism_and_validity():
    a = random_regular(24, 3, seed=1, min_girth=5)
    b = random_regular(24, 3, seed=1, min_girth=5)
    assert a.edges == b.edges
    assert all(a.degree(v) == 3 for v in range(24))
    assert a.metrics().girth >= 5
    assert len(set(a.edges)) == a.edge_count
    c = random_regular(24, 3, seed=2, min_girth=5)
    assert c.edges != a.edges


def test_random_regular_errors():
    with pytest.raises(GraphError):
        random_regular(5, 3, seed=1)
    with pytest.raises(GenerationError):
        random_regular(4, 3, seed=1, min_girth=5, max_tries=50)


def test_validate_family_ok():
    spec = FamilySpec(graphs=[cycle_graph(n) for n in (12, 18, 24)],
                      D=2, A=Fraction(1), lam=Fraction(1, 6))
    report = validate_family(spec)
    assert report.ok
    assert report.subsequence == [0, 1, 2]
    assert report.measured_A == Fraction(1, 2)


def test_validate_family_monotonicity_repair():
    spec = FamilySpec(graphs=[cycle_graph(12), cycle_graph(12)],
                      D=2, A=Fraction(1), lam=Fraction(1, 6))
    report = validate_family(spec)
    assert not report.ok
    assert report.subsequence == [0]
    assert ("girth_monotone", 1, 12) in report.witnesses


def test_validate_family_girth_threshold():
    spec = FamilySpec(graphs=[cycle_graph(4)], D=2, A=Fraction(1),
                      lam=Fraction(1, 6))
    report = validate_family(spec)
    assert not report.ok
    assert report.subsequence == []
    assert ("girth_threshold", 0, 4) in report.witnesses


def test_validate_family_diameter_bound_not_repairable():
    spec = FamilySpec(graphs=[cycle_graph(12)], D=2, A=Fraction(1, 4),
                      lam=Fraction(1, 6))
    report = validate_family(spec)
    assert not report.ok
    assert any(w[0] == "diameter_bound" for w in report.witnesses)


def test_measure_A():
    assert measure_A([cycle_graph(10)]) == Fraction(1, 2)
    assert measure_A([petersen()]) == Fraction(2, 5)
