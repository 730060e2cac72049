"""Shared oracles for the test suite.

The helpers here deliberately reimplement path enumeration, bad-pattern
detection and repeat search from first principles, so the package code is
checked against independent logic rather than against itself.
"""

import math
import random
from fractions import Fraction

import networkx as nx
import pytest

from smallcancel.graphs import Graph
from smallcancel.labelings import Alphabet, Labeling


def to_nx(g: Graph) -> nx.MultiGraph:
    h = nx.MultiGraph()
    h.add_nodes_from(range(g.vertex_count))
    h.add_edges_from(g.edges)
    return h


def petersen() -> Graph:
    edges = sorted(tuple(sorted(e)) for e in nx.petersen_graph().edges())
    return Graph(10, edges, name="petersen")


def theta_graph() -> Graph:
    return Graph(2, [(0, 1), (0, 1), (0, 1)], name="theta")


def oracle_paths(g: Graph, length: int):
    """Independent recursive enumerator of non-backtracking edge-simple
    directed paths of exactly `length` edges."""
    results = []

    def grow(path, used):
        if len(path) == length:
            results.append(tuple(path))
            return
        v = g.dst[path[-1]]
        for f in g.out[v]:
            if f == (path[-1] ^ 1) or f // 2 in used:
                continue
            grow(path + [f], used | {f // 2})

    for e in range(g.directed_count):
        grow([e], {e // 2})
    return results


def oracle_bad_pattern(w, E):
    """Brute-force bad-pattern classifier with the same precedence as the
    engine's: C first, then A with the maximal border, then B."""
    n = len(w)
    if n < 2:
        return None, None
    for i in range(n - 1):
        if w[i + 1] == -w[i]:
            return "C", i
    inv = tuple(-x for x in reversed(w))
    best_a = 0
    best_b = 0
    for q in range(1, n):
        if w[:q] == w[n - q:]:
            best_a = q
        if w[n - q:] == inv[n - q:]:
            best_b = q
    qmin = max(1, math.ceil(Fraction(E) * n))
    if best_a >= qmin:
        return "A", best_a
    if best_b >= qmin:
        return "B", best_b
    return None, None


def scan_bad_words(g: Graph, lab: Labeling, E, top):
    """All (path, kind) violations of lengths 2..top, by brute force."""
    hits = []
    for length in range(2, top + 1):
        for t in oracle_paths(g, length):
            w = tuple(lab.assignment[e] for e in t)
            kind, _ = oracle_bad_pattern(w, E)
            if kind is not None:
                hits.append((t, kind))
    return hits


def oracle_reduced(lab: Labeling) -> bool:
    for v in range(lab.graph.vertex_count):
        letters = [lab.assignment[e] for e in lab.graph.out[v]]
        if len(letters) != len(set(letters)):
            return False
    return True


def oracle_longest_repeat(graphs, labelings) -> int:
    """Longest word length occurring at two distinct (graph, path)
    positions, counting a path and its reverse as the same occurrence."""
    best = 0
    cap = max(g.edge_count for g in graphs)
    for length in range(1, cap + 1):
        occs = {}
        for gi, (g, lab) in enumerate(zip(graphs, labelings)):
            for t in oracle_paths(g, length):
                w = tuple(lab.assignment[e] for e in t)
                winv = tuple(-x for x in reversed(w))
                key = min(w, winv)
                rev = tuple(e ^ 1 for e in reversed(t))
                occs.setdefault(key, set()).add((gi, min(t, rev)))
        if any(len(s) >= 2 for s in occs.values()):
            best = length
        else:
            break
    return best


def random_reduced(g: Graph, size: int, seed: int) -> Labeling:
    """First reduced labeling found along a fixed random stream."""
    rng = random.Random(seed)
    alphabet = Alphabet(size)
    while True:
        letters = []
        for _ in range(g.edge_count):
            a = rng.randrange(1, size + 1)
            letters.append(a if rng.random() < 0.5 else -a)
        lab = Labeling.from_undirected(g, letters, alphabet)
        if oracle_reduced(lab):
            return lab


@pytest.fixture
def tmp_output_root(tmp_path, monkeypatch):
    root = tmp_path / "out"
    monkeypatch.setenv("SMALLCANCEL_OUTPUT_ROOT", str(root))
    return root
