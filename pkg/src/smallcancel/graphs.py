"""Bounded-degree multigraphs in a half-edge representation, metric
invariants, non-backtracking path enumeration, random regular generation,
and family-level hypothesis validation.

Directed edges come in partner pairs: undirected edge i contributes the
directed edges 2i (forward) and 2i+1 (backward), so ``partner(e) == e ^ 1``.
Adjacency lists are sorted by directed edge index, which fixes a
deterministic iteration order everywhere downstream.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

INF = math.inf


class GraphError(ValueError):
    pass


class DisconnectedError(GraphError):
    def __init__(self, name: str, rep_a: int, rep_b: int):
        super().__init__(
            f"graph {name!r} is disconnected: no path between vertex {rep_a} "
            f"and vertex {rep_b}")
        self.representatives = (rep_a, rep_b)


class GenerationError(GraphError):
    def __init__(self, message: str, attempts: int):
        super().__init__(f"{message} (after {attempts} attempts)")
        self.attempts = attempts


class Graph:
    """Undirected multigraph (loops allowed) over vertices 0..n-1."""

    def __init__(self, vertex_count: int, edges: Sequence[tuple[int, int]],
                 name: str = "g"):
        self.name = name
        self.vertex_count = vertex_count
        self.edges = [(int(u), int(v)) for u, v in edges]
        for u, v in self.edges:
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise GraphError(f"edge ({u},{v}) out of range in {name!r}")
        self.src = []
        self.dst = []
        for u, v in self.edges:
            self.src += [u, v]
            self.dst += [v, u]
        self.out = [[] for _ in range(vertex_count)]
        for e in range(len(self.src)):
            self.out[self.src[e]].append(e)
        self._metrics = None

    # -- basic queries -----------------------------------------------------

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def directed_count(self) -> int:
        return 2 * len(self.edges)

    @staticmethod
    def partner(e: int) -> int:
        return e ^ 1

    def degree(self, v: int) -> int:
        return len(self.out[v])

    def max_degree(self) -> int:
        return max((len(o) for o in self.out), default=0)

    def undirected(self, e: int) -> int:
        return e // 2

    def is_connected(self) -> bool:
        return self._component_reps() is None

    def _component_reps(self) -> tuple[int, int] | None:
        """None if connected, else representatives of two components."""
        n = self.vertex_count
        if n <= 1:
            return None
        seen = [False] * n
        stack = [0]
        seen[0] = True
        while stack:
            v = stack.pop()
            for e in self.out[v]:
                w = self.dst[e]
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        for v in range(n):
            if not seen[v]:
                return (0, v)
        return None

    def require_connected(self) -> None:
        reps = self._component_reps()
        if reps is not None:
            raise DisconnectedError(self.name, *reps)

    # -- metrics -----------------------------------------------------------

    def bfs_distances(self, root: int) -> list:
        dist = [INF] * self.vertex_count
        dist[root] = 0
        frontier = [root]
        while frontier:
            nxt = []
            for v in frontier:
                for e in self.out[v]:
                    w = self.dst[e]
                    if dist[w] is INF:
                        dist[w] = dist[v] + 1
                        nxt.append(w)
            frontier = nxt
        return dist

    def metrics(self) -> "GraphMetrics":
        """Girth, diameter and the all-pairs distance table."""
        if self._metrics is not None:
            return self._metrics
        self.require_connected()
        table = [self.bfs_distances(v) for v in range(self.vertex_count)]
        diameter = max((d for row in table for d in row), default=0)
        self._metrics = GraphMetrics(girth=self._girth(), diameter=diameter,
                                     distance_table=table)
        return self._metrics

    def _girth(self):
        if any(u == v for u, v in self.edges):
            return 1
        seen_pairs = set()
        for u, v in self.edges:
            key = (u, v) if u < v else (v, u)
            if key in seen_pairs:
                return 2
            seen_pairs.add(key)
        best = INF
        for root in range(self.vertex_count):
            dist = [INF] * self.vertex_count
            parent_edge = [-1] * self.vertex_count
            dist[root] = 0
            frontier = [root]
            while frontier:
                nxt = []
                for x in frontier:
                    for e in self.out[x]:
                        y = self.dst[e]
                        if dist[y] is INF:
                            dist[y] = dist[x] + 1
                            parent_edge[y] = e // 2
                            nxt.append(y)
                        elif parent_edge[x] != e // 2:
                            # Non-tree edge closes a walk containing a cycle
                            # no longer than dist[x] + dist[y] + 1.
                            best = min(best, dist[x] + dist[y] + 1)
                frontier = nxt
        return best

    def distance(self, p: int, q: int) -> int:
        return self.metrics().distance_table[p][q]

    # -- serialization -----------------------------------------------------

    def to_text(self) -> str:
        lines = [f"GRAPH {self.name} V {self.vertex_count} E {self.edge_count}"]
        lines += [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Graph":
        lines = [ln.strip() for ln in text.splitlines()
                 if ln.strip() and not ln.strip().startswith("#")]
        if not lines or not lines[0].startswith("GRAPH "):
            raise GraphError("missing GRAPH header")
        parts = lines[0].split()
        if len(parts) != 6 or parts[2] != "V" or parts[4] != "E":
            raise GraphError(f"malformed header: {lines[0]!r}")
        name, n, m = parts[1], int(parts[3]), int(parts[5])
        if len(lines) - 1 != m:
            raise GraphError(f"expected {m} edge lines, found {len(lines) - 1}")
        edges = []
        for ln in lines[1:]:
            u, v = ln.split()
            edges.append((int(u), int(v)))
        g = cls(n, edges, name=name)
        g.require_connected()
        return g


@dataclass(frozen=True)
class GraphMetrics:
    girth: float
    diameter: int
    distance_table: list


@dataclass(frozen=True)
class Path:
    """Non-backtracking path given by its directed edge indices."""

    edges: tuple[int, ...]

    def start(self, g: Graph) -> int:
        return g.src[self.edges[0]]

    def end(self, g: Graph) -> int:
        return g.dst[self.edges[-1]]

    def reverse(self) -> "Path":
        return Path(tuple(e ^ 1 for e in reversed(self.edges)))

    def validate(self, g: Graph) -> None:
        es = self.edges
        if not es:
            raise GraphError("empty path")
        for a, b in zip(es, es[1:]):
            if g.dst[a] != g.src[b]:
                raise GraphError(f"edges {a},{b} not incident")
            if b == (a ^ 1):
                raise GraphError(f"backtracking at edge {a}")


def iter_path_tuples(g: Graph, length: int,
                     start_edges: Sequence[int] | None = None,
                     edge_simple: bool = True) -> Iterator[tuple[int, ...]]:
    """All non-backtracking directed paths of exactly `length` edges, in
    lexicographic order of their edge index sequences.

    With edge_simple (the default) a path visits each undirected edge at
    most once, so closed cycles are allowed but wrap-around walks are not.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    starts = range(g.directed_count) if start_edges is None else start_edges
    stack_path = []
    used = set()

    def extend(e: int) -> Iterator[tuple[int, ...]]:
        stack_path.append(e)
        used.add(e // 2)
        if len(stack_path) == length:
            yield tuple(stack_path)
        else:
            for f in g.out[g.dst[e]]:
                if f != (e ^ 1) and not (edge_simple and f // 2 in used):
                    yield from extend(f)
        stack_path.pop()
        used.discard(e // 2)

    for e0 in starts:
        yield from extend(e0)


def enumerate_paths(g: Graph, length: int) -> Iterator[Path]:
    for t in iter_path_tuples(g, length):
        yield Path(t)


def cycle_graph(n: int, name: str | None = None) -> Graph:
    if n < 1:
        raise ValueError("cycle needs at least one vertex")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)],
                 name=name or f"C{n}")


def random_regular(n: int, d: int, seed: int, min_girth: int = 3,
                   max_tries: int = 10000) -> Graph:
    """Configuration-model sampling of a simple connected d-regular graph
    with girth >= min_girth; deterministic for fixed arguments."""
    if (n * d) % 2 != 0:
        raise GraphError("n*d must be even")
    rng = random.Random(("regular", n, d, seed, min_girth).__repr__())
    for attempt in range(1, max_tries + 1):
        stubs = [v for v in range(n) for _ in range(d)]
        rng.shuffle(stubs)
        pairs = [(stubs[2 * i], stubs[2 * i + 1]) for i in range(len(stubs) // 2)]
        if any(u == v for u, v in pairs):
            continue
        norm = {(u, v) if u < v else (v, u) for u, v in pairs}
        if len(norm) != len(pairs):
            continue
        g = Graph(n, sorted(norm), name=f"R{n}d{d}s{seed}")
        if not g.is_connected():
            continue
        if g.metrics().girth < min_girth:
            continue
        return g
    raise GenerationError(
        f"no simple connected {d}-regular graph on {n} vertices with girth "
        f">= {min_girth} found", max_tries)


# -- family validation -----------------------------------------------------


@dataclass
class FamilySpec:
    graphs: list
    D: int
    A: Fraction
    lam: Fraction


@dataclass
class FamilyReport:
    ok: bool
    witnesses: list = field(default_factory=list)
    subsequence: list = field(default_factory=list)
    measured_A: Fraction | None = None


def measure_A(graphs: Sequence[Graph]) -> Fraction:
    """max diam/girth over the family; the universal constant of the
    diameter bound is measured rather than assumed."""
    best = Fraction(0)
    for g in graphs:
        m = g.metrics()
        if m.girth is INF:
            continue
        best = max(best, Fraction(m.diameter, int(m.girth)))
    return best


def validate_family(spec: FamilySpec) -> FamilyReport:
    """Check the three family hypotheses; on girth monotonicity or
    girth-threshold failure, return the greedy maximal repairing
    subsequence."""
    report = FamilyReport(ok=True)
    for idx, g in enumerate(spec.graphs):
        g.require_connected()
        if g.max_degree() > spec.D:
            report.ok = False
            report.witnesses.append(
                ("degree", idx, g.max_degree(), spec.D))
    metrics = [g.metrics() for g in spec.graphs]
    for idx, m in enumerate(metrics):
        if m.girth is INF:
            continue
        if Fraction(m.diameter) > spec.A * int(m.girth):
            # Non-repairable: the diameter bound is a standing hypothesis.
            report.ok = False
            report.witnesses.append(
                ("diameter_bound", idx, m.diameter, int(m.girth)))
    good = []
    last_girth = 0
    for idx, m in enumerate(metrics):
        girth = m.girth
        if girth is not INF and spec.lam * int(girth) <= 1:
            report.witnesses.append(("girth_threshold", idx, int(girth)))
            continue
        if girth is not INF and int(girth) <= last_girth:
            report.witnesses.append(("girth_monotone", idx, int(girth)))
            continue
        good.append(idx)
        if girth is not INF:
            last_girth = int(girth)
    report.subsequence = good
    if len(good) != len(spec.graphs):
        report.ok = False
    report.measured_A = measure_A(spec.graphs)
    return report
