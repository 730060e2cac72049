"""Graphical presentations over a bouquet: free reduction, relator
shortcut (Dehn) reduction, bounded triviality queries, Cayley-ball patches,
and the relator embedding check.

Equality of short words is decided through the set R of closed-path words
of the relators: when 2 * radius is at most the smallest relator girth,
every nontrivial relation of length <= 2 * radius is itself an element of
R, so one left multiplication by R decides equality of ball elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .graphs import Graph
from .labelings import Alphabet, Labeling, Word, inverse_word, is_reduced

INF = float("inf")


def free_reduce(w: Word) -> Word:
    out = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


class PresentationError(ValueError):
    pass


class Relator:
    """A relator graph with its reduced labeling plus the lookup tables the
    shortcut machinery needs."""

    def __init__(self, labeling: Labeling):
        ok, witness = is_reduced(labeling)
        if not ok:
            raise PresentationError(
                f"relator labeling not reduced at vertex {witness[0]}")
        self.labeling = labeling
        self.graph = labeling.graph
        self.letter_out = []
        for v in range(self.graph.vertex_count):
            table = {}
            for e in self.graph.out[v]:
                table[labeling.assignment[e]] = e
            self.letter_out.append(table)
        m = self.graph.metrics()
        self.girth = INF if m.girth == INF else int(m.girth)
        self.diameter = m.diameter
        self.dist = m.distance_table

    def trace(self, start: int, w: Word):
        """Longest prefix of w tracable from `start`; returns (length,
        end vertex)."""
        v = start
        for k, x in enumerate(w):
            e = self.letter_out[v].get(x)
            if e is None:
                return k, v
            v = self.graph.dst[e]
        return len(w), v

    def geodesic_word(self, x: int, y: int) -> Word:
        """Lexicographically least geodesic label from x to y (greedy works
        because the labeling is reduced, so letters at a vertex are
        distinct)."""
        out = []
        v = x
        while v != y:
            step = min(
            (self.labeling.assignment[e], self.graph.dst[e])
                for e in self.graph.out[v]
                if self.dist[self.graph.dst[e]][y] == self.dist[v][y] - 1)
            out.append(step[0])
            v = step[1]
        return tuple(out)

    def closed_path_words(self, max_length: int) -> set:
        """Words of closed non-backtracking edge-simple paths of length at
        most max_length (these are the short relations)."""
        words = set()
        g = self.graph

        def walk(e, used, acc, start_v):
            acc.append(e)
            used.add(e // 2)
            if g.dst[e] == start_v and acc[-1] != (acc[0] ^ 1):
                w = free_reduce(tuple(self.labeling.assignment[f]
                                      for f in acc))
                if w:
                    words.add(w)
            if len(acc) < max_length:
                for f in g.out[g.dst[e]]:
                    if f != (e ^ 1) and f // 2 not in used:
                        walk(f, used, acc, start_v)
            acc.pop()
            used.discard(e // 2)

        for e0 in range(g.directed_count):
            walk(e0, set(), [], g.src[e0])
        return words

    def tree_words(self) -> list:
        """Per vertex: the label of the BFS tree path from vertex 0."""
        g = self.graph
        words = [None] * g.vertex_count
        words[0] = ()
        queue = [0]
        for v in queue:
            for e in g.out[v]:
                w = g.dst[e]
                if words[w] is None:
                    words[w] = words[v] + (self.labeling.assignment[e],)
                    queue.append(w)
        return words


class GraphicalPresentation:
    def __init__(self, alphabet: Alphabet, relators: Sequence[Labeling],
                 cprime_lambda: Fraction | None = None):
        self.alphabet = alphabet
        self.relators = [Relator(lab) for lab in relators]
        # lambda for which sc_verify certified the C'(lambda) condition
        self.cprime_lambda = Fraction(cprime_lambda) if cprime_lambda else None

    @property
    def dehn_complete(self) -> bool:
        """No-answers are claimed only in the certified C'(1/24) regime."""
        return (self.cprime_lambda is not None
                and self.cprime_lambda <= Fraction(1, 24))

    def min_girth(self):
        return min((r.girth for r in self.relators), default=INF)

    # -- shortcut reduction ------------------------------------------------

    def _best_shortcut(self, w: Word):
        """Leftmost-longest subword u = w[i:i+q] labeling a relator path
        x -> y with q > d(x, y); deterministic tie-break by relator index,
        then start vertex."""
        for i in range(len(w)):
            best = None
            for ri, rel in enumerate(self.relators):
                for x in range(rel.graph.vertex_count):
                    q, _ = rel.trace(x, w[i:])
                    while q >= 1:
                        _, y = rel.trace(x, w[i:i + q])
                        if q > rel.dist[x][y]:
                            cand = (q, ri, x, y)
                            if best is None or q > best[0]:
                                best = cand
                            break
                        q -= 1
            if best is not None:
                q, ri, x, y = best
                return i, q, ri, x, y
        return None

    def shortcut_reduce(self, w: Word) -> Word:
        w = free_reduce(w)
        while True:
            hit = self._best_shortcut(w)
            if hit is None:
                return w
            i, q, ri, x, y = hit
            repl = self.relators[ri].geodesic_word(x, y)
            w = free_reduce(w[:i] + repl + w[i + q:])

    # -- triviality --------------------------------------------------------

    def is_trivial(self, w: Word, fallback_cap: int = 5000) -> str:
        """'yes', 'no' or 'unknown'. Yes is unconditionally sound (every
        shortcut move is a relator consequence); no is claimed either for
        relator-free presentations or under the C'(1/24) certificate;
        otherwise a breadth-limited search over relator insertions decides
        what it can."""
        fixed = self.shortcut_reduce(w)
        if not fixed:
            return "yes"
        if not self.relators:
            return "no"
        if self.dehn_complete:
            return "no"
        if self._bounded_trivial_search(fixed, fallback_cap):
            return "yes"
        return "unknown"

    def _bounded_trivial_search(self, w: Word, cap: int) -> bool:
        moves = set()
        for rel in self.relators:
            if rel.girth != INF:
                moves |= rel.closed_path_words(min(rel.girth,
                                                   rel.graph.edge_count))
        seen = {w}
        frontier = [w]
        limit = len(w) + max((len(m) for m in moves), default=0)
        while frontier and len(seen) < cap:
            nxt = []
            for u in frontier:
                for m in moves:
                    for pos in range(len(u) + 1):
                        t = self.shortcut_reduce(u[:pos] + m + u[pos:])
                        if not t:
                            return True
                        if len(t) <= limit and t not in seen:
                            seen.add(t)
                            nxt.append(t)
                        if len(seen) >= cap:
                            break
            frontier = nxt
        return False


# -- Cayley patches --------------------------------------------------------


@dataclass
class CayleyPatch:
    radius: int
    words: list
    word_to_id: dict
    edges: set
    layers: list
    exact: bool
    capped: bool = False
    relation_words: frozenset = frozenset()

    @property
    def origin(self) -> int:
        return 0

    def vertex_count(self) -> int:
        return len(self.words)

    def distance_from_origin(self, vid: int) -> int:
        return len(self.words[vid])

    def canonical(self, w: Word) -> Word:
        return _canonical_word(free_reduce(w), self.relation_words)

    def to_text(self) -> str:
        lines = []
        for vid, w in enumerate(self.words):
            lines.append(f"{vid} " + (",".join(str(x) for x in w) or "e"))
        for a, b, s in sorted(self.edges):
            lines.append(f"{a} {b} {s}")
        return "\n".join(lines) + "\n"


def _canonical_word(w: Word, relations) -> Word:
    best = w
    for rho in relations:
        cand = free_reduce(tuple(-x for x in reversed(rho)) + w)
        if (len(cand), cand) < (len(best), best):
            best = cand
    return best


def cayley_patch(pres: GraphicalPresentation, radius: int,
                 vertex_cap: int = 100000) -> CayleyPatch:
    """Ball of the Cayley graph via BFS on canonical words. Exact when
    there are no relators or 2 * radius is at most the least relator girth
    (then all relevant relations are closed-path words, collected in R;
    larger relators cannot shorten anything inside the ball and are
    skipped)."""
    if radius < 0:
        raise PresentationError("radius must be >= 0")
    relations = set()
    for rel in pres.relators:
        if rel.girth != INF and rel.girth <= 2 * radius:
            relations |= rel.closed_path_words(2 * radius)
    ming = pres.min_girth()
    exact = (not pres.relators) or ming == INF or 2 * radius <= ming
    relations = frozenset(relations)
    letters = pres.alphabet.letters()
    words = [()]
    word_to_id = {(): 0}
    layers = [[0]]
    edges = set()
    capped = False
    for layer in range(1, radius + 1):
        new_ids = []
        for vid in layers[layer - 1]:
            w = words[vid]
            for s in letters:
                t = _canonical_word(free_reduce(w + (s,)), relations)
                tid = word_to_id.get(t)
                if tid is None:
                    if len(words) >= vertex_cap:
                        capped = True
                        exact = False
                        continue
                    tid = len(words)
                    words.append(t)
                    word_to_id[t] = tid
                    new_ids.append(tid)
                if s > 0:
                    edges.add((vid, tid, s))
                else:
                    edges.add((tid, vid, -s))
        layers.append(new_ids)
    return CayleyPatch(radius=radius, words=words, word_to_id=word_to_id,
                       edges=edges, layers=layers, exact=exact,
                       capped=capped, relation_words=relations)


# -- embedding check -------------------------------------------------------


@dataclass
class EmbeddingReport:
    verdict: str                 # 'true', 'false', 'unknown', 'advisory'
    worst_pair: tuple | None
    checked_pairs: int


def embedding_check(pres: GraphicalPresentation, relator_index: int,
                    radius_cap: int,
                    vertex_cap: int = 100000) -> EmbeddingReport:
    """For relator vertex pairs at in-relator distance <= radius_cap:
    the Cayley distance of their images equals the in-relator distance.
    Advisory (not asserted) without a C'(1/24) certificate."""
    rel = pres.relators[relator_index]
    patch = cayley_patch(pres, radius_cap, vertex_cap)
    if not patch.exact:
        return EmbeddingReport(verdict="unknown", worst_pair=None,
                               checked_pairs=0)
    worst = None
    worst_margin = None
    ok = True
    checked = 0
    for x in range(rel.graph.vertex_count):
        for y in range(x + 1, rel.graph.vertex_count):
            dr = rel.dist[x][y]
            if dr > radius_cap:
                continue
            # the geodesic word has length dr <= radius_cap, so its whole
            # path stays inside the patch and canonical() is reliable
            u = patch.canonical(rel.geodesic_word(x, y))
            dx = len(u)
            checked += 1
            margin = dx - dr
            if worst_margin is None or margin < worst_margin:
                worst_margin = margin
                worst = (x, y, dr, dx)
            if dx != dr:
                ok = False
    if not pres.dehn_complete:
        return EmbeddingReport(verdict="advisory", worst_pair=worst,
                               checked_pairs=checked)
    return EmbeddingReport(verdict="true" if ok else "false",
                           worst_pair=worst, checked_pairs=checked)
