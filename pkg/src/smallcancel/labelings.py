"""Symmetrized alphabets, involutive edge labellings, words of paths,
reducedness, the decoration trick, the product labeling, and the constant
calculators.

Letters are nonzero signed integers in {-S..-1, 1..S}; negation is the
formal inverse. A labeling assigns a letter to every directed edge so that
partner edges carry inverse letters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .graphs import Graph, GraphError, Path
from .rationals import ceil_frac, e4_bounds, floor_frac, pow_frac_bounds

Word = tuple[int, ...]


class LabelingError(ValueError):
    pass


@dataclass(frozen=True)
class Alphabet:
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise LabelingError("alphabet size must be >= 1")

    def check(self, letter: int) -> None:
        if letter == 0 or abs(letter) > self.size:
            raise LabelingError(f"letter {letter} outside alphabet of size {self.size}")

    def letters(self) -> list:
        return [s for a in range(1, self.size + 1) for s in (a, -a)]


def inverse_word(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


class Labeling:
    """Involutive letter assignment on the directed edges of a graph."""

    def __init__(self, graph: Graph, assignment: Sequence[int],
                 alphabet: Alphabet):
        if len(assignment) != graph.directed_count:
            raise LabelingError("assignment length != directed edge count")
        self.graph = graph
        self.alphabet = alphabet
        self.assignment = list(assignment)
        for e in range(0, graph.directed_count, 2):
            alphabet.check(self.assignment[e])
            if self.assignment[e ^ 1] != -self.assignment[e]:
                raise LabelingError(
                    f"involution broken on directed edges {e},{e ^ 1}")

    @classmethod
    def from_undirected(cls, graph: Graph, letters: Sequence[int],
                        alphabet: Alphabet) -> "Labeling":
        """One letter per undirected edge, read along the stored (u, v)
        orientation."""
        if len(letters) != graph.edge_count:
            raise LabelingError("need one letter per undirected edge")
        assignment = []
        for s in letters:
            assignment += [s, -s]
        return cls(graph, assignment, alphabet)

    def letter(self, e: int) -> int:
        return self.assignment[e]

    def undirected_letters(self) -> list:
        return [self.assignment[2 * i] for i in range(self.graph.edge_count)]

    def with_edges_resampled(self, undirected_edges, rng) -> "Labeling":
        assignment = list(self.assignment)
        for i in sorted(set(undirected_edges)):
            a = rng.randrange(1, self.alphabet.size + 1)
            s = a if rng.random() < 0.5 else -a
            assignment[2 * i] = s
            assignment[2 * i + 1] = -s
        return Labeling(self.graph, assignment, self.alphabet)

    # -- serialization -----------------------------------------------------

    def to_text(self) -> str:
        g = self.graph
        lines = [f"LGRAPH {g.name} V {g.vertex_count} E {g.edge_count} "
                 f"S {self.alphabet.size}"]
        for i, (u, v) in enumerate(g.edges):
            lines.append(f"{u} {v} {self.assignment[2 * i]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Labeling":
        lines = [ln.strip() for ln in text.splitlines()
                 if ln.strip() and not ln.strip().startswith("#")]
        if not lines or not lines[0].startswith("LGRAPH "):
            raise LabelingError("missing LGRAPH header")
        parts = lines[0].split()
        if len(parts) != 8 or parts[2] != "V" or parts[4] != "E" or parts[6] != "S":
            raise LabelingError(f"malformed header: {lines[0]!r}")
        name, n, m, size = parts[1], int(parts[3]), int(parts[5]), int(parts[7])
        if len(lines) - 1 != m:
            raise LabelingError(f"expected {m} edge lines, found {len(lines) - 1}")
        edges, letters = [], []
        for ln in lines[1:]:
            u, v, s = ln.split()
            edges.append((int(u), int(v)))
            letters.append(int(s))
        g = Graph(n, edges, name=name)
        g.require_connected()
        return cls.from_undirected(g, letters, Alphabet(size))


def word_of_path(lab: Labeling, p: Path) -> Word:
    p.validate(lab.graph)
    return tuple(lab.assignment[e] for e in p.edges)


def word_of_edges(lab: Labeling, edges: Sequence[int]) -> Word:
    return tuple(lab.assignment[e] for e in edges)


def is_reduced(lab: Labeling):
    """(True, None) or (False, (vertex, edge, edge)) when two out-edges at
    one vertex carry the same letter."""
    for v in range(lab.graph.vertex_count):
        seen = {}
        for e in lab.graph.out[v]:
            s = lab.assignment[e]
            if s in seen:
                return False, (v, seen[s], e)
            seen[s] = e
    return True, None


# -- decoration ------------------------------------------------------------


def port_colors(g: Graph) -> list:
    """Distinct colors in {1..deg(v)} for the out-edges at each vertex,
    assigned in sorted directed-edge order; indexed by directed edge."""
    colors = [0] * g.directed_count
    for v in range(g.vertex_count):
        for rank, e in enumerate(g.out[v]):
            colors[e] = rank + 1
    return colors


def decorate(lab: Labeling) -> Labeling:
    """Figure-style decoration: the letter of the positively labeled
    direction of each edge becomes the triple (old letter, port color at
    source, port color at target), coded into an alphabet of size S*D*D.

    The reverse direction carries the negated code, which matches the
    triple inversion rule (a, b, c) -> (inverse a, c, b). The result is
    always reduced: two out-edges at a vertex with positively labeled codes
    differ in the source port, two negatively labeled ones differ in the
    target port, and the signs separate the remaining case.
    """
    g = lab.graph
    D = max(g.max_degree(), 1)
    S = lab.alphabet.size
    colors = port_colors(g)
    big = Alphabet(S * D * D)
    assignment = [0] * g.directed_count
    for i in range(g.edge_count):
        e = 2 * i if lab.assignment[2 * i] > 0 else 2 * i + 1
        a = lab.assignment[e]
        b = colors[e]
        c = colors[e ^ 1]
        code = ((a - 1) * D + (b - 1)) * D + (c - 1) + 1
        assignment[e] = code
        assignment[e ^ 1] = -code
    return Labeling(g, assignment, big)


def decode_decoration(code: int, D: int) -> tuple[int, int, int]:
    """Inverse of decorate's coding for a positive code."""
    if code <= 0:
        a, b, c = decode_decoration(-code, D)
        return -a, c, b
    q, c = divmod(code - 1, D)
    a, b = divmod(q, D)
    return a + 1, b + 1, c + 1


# -- product labeling ------------------------------------------------------


def _pair_code(a: int, b: int, s2: int) -> int:
    """Code of the letter pair (a, b) with a > 0; the full coding sends
    (-a, -b) to the negated code, so the involution is componentwise."""
    idx = (b - 1) if b > 0 else s2 + (-b - 1)
    return (a - 1) * 2 * s2 + idx + 1


def product(l: Labeling, lbar: Labeling) -> Labeling:
    """Pair the two labellings edgewise into an alphabet of size
    2 * S1 * S2, oriented so the first-factor letter is positive."""
    if l.graph is not lbar.graph and l.graph.edges != lbar.graph.edges:
        raise LabelingError("product factors live on different graphs")
    g = l.graph
    s1, s2 = l.alphabet.size, lbar.alphabet.size
    big = Alphabet(2 * s1 * s2)
    assignment = [0] * g.directed_count
    for i in range(g.edge_count):
        e = 2 * i if l.assignment[2 * i] > 0 else 2 * i + 1
        code = _pair_code(l.assignment[e], lbar.assignment[e], s2)
        assignment[e] = code
        assignment[e ^ 1] = -code
    return Labeling(g, assignment, big)


def product_factors(code: int, s2: int) -> tuple[int, int]:
    """Recover the pair (a, b) from a product letter."""
    if code < 0:
        a, b = product_factors(-code, s2)
        return -a, -b
    q, idx = divmod(code - 1, 2 * s2)
    b = idx + 1 if idx < s2 else -(idx - s2 + 1)
    return q + 1, b


# -- the paper-style constants ---------------------------------------------


@dataclass(frozen=True)
class ScConstants:
    lam: Fraction
    A: Fraction
    D: int
    girths: tuple[int, ...]
    gamma: tuple[int, ...]
    E: Fraction
    F: tuple[Fraction, ...]
    L: int
    Lbar: int

    def gamma_of_girth(self, girth: int) -> int:
        return floor_frac(self.lam * girth)

    def F_of_girth(self, girth: int) -> Fraction:
        return (2 * self.lam + self.A) * girth


def constants(D: int, A: Fraction, lam: Fraction,
              girths: Sequence[int]) -> ScConstants:
    """E, per-graph gamma and F, and the certified ceilings L and Lbar.

    L = ceil(2 D e^4 D^(2A/lam + 1)) and Lbar = ceil((4 D e^4)^(1/E)) are
    computed from rational upper enclosures of e^4 and of the fractional
    powers, so the reported integers are valid ceilings.
    """
    A = Fraction(A)
    lam = Fraction(lam)
    if not (0 < lam <= Fraction(1, 6)):
        raise LabelingError("lambda must lie in (0, 1/6]")
    if A < Fraction(1, 2):
        raise LabelingError("A must be at least 1/2")
    if D < 2:
        raise LabelingError("degree bound must be at least 2")
    girths = tuple(int(g) for g in girths)
    for g in girths:
        if lam * g <= 1:
            raise LabelingError(f"lambda * girth must exceed 1 (girth {g})")
    gamma = tuple(floor_frac(lam * g) for g in girths)
    E = lam / (8 * lam + 4 * A)
    F = tuple((2 * lam + A) * g for g in girths)
    # 80 series terms keep the e^4 enclosure tight enough that even the
    # 1/E-th power below stays within one unit of the true ceiling
    _, e4_hi = e4_bounds(terms=80)
    _, pw_hi = pow_frac_bounds(Fraction(D), 2 * A / lam + 1)
    L = ceil_frac(2 * D * e4_hi * pw_hi)
    _, pw2_hi = pow_frac_bounds(4 * D * e4_hi, 1 / E)
    Lbar = ceil_frac(pw2_hi)
    consts = ScConstants(lam=lam, A=A, D=D, girths=girths, gamma=gamma,
                         E=E, F=F, L=L, Lbar=Lbar)
    assert consts.E < Fraction(1, 8)
    for g, gm in zip(girths, gamma):
        assert Fraction(g, gm) < 2 / lam
    return consts
