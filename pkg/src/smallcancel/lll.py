"""Constructive local-lemma layer: the numeric hypothesis checker, the
forbidden-word dictionaries, the bad-pattern detector, and the two
Moser-Tardos resampling engines (inter-graph and intra-graph).

Both engines draw from a single seeded random stream and log every round,
so a run is replayable byte for byte from its seed.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .graphs import Graph
from .labelings import (Alphabet, Labeling, ScConstants, Word, inverse_word,
                        word_of_edges)
from .rationals import ceil_frac, floor_frac, format_fraction, parse_fraction, pow_frac_bounds


# -- LLL hypothesis checker ------------------------------------------------


@dataclass(frozen=True)
class EventClass:
    index: int
    path_length: int
    p_bound: Fraction
    a_value: Fraction
    delta: dict

    def __post_init__(self):
        if not (0 <= self.a_value < 1):
            raise ValueError(f"a value {self.a_value} outside [0, 1)")
        if self.p_bound < 0:
            raise ValueError("negative probability bound")


# exact Fraction powers are fine for small exponents; past this total the
# checker switches to certified directed-rounding bounds
_EXACT_EXPONENT_LIMIT = 100000


def _round_down(x: Fraction, bits: int) -> Fraction:
    if x == 0:
        return x
    n, d = x.numerator, x.denominator
    shift = bits + max(0, d.bit_length() - n.bit_length())
    return Fraction((n << shift) // d, 1 << shift)


def _round_up(x: Fraction, bits: int) -> Fraction:
    if x == 0:
        return x
    n, d = x.numerator, x.denominator
    shift = bits + max(0, d.bit_length() - n.bit_length())
    return Fraction(-((-n << shift) // d), 1 << shift)


def _pow_bounds(base: Fraction, exp: int, bits: int):
    """Enclosure of base**exp for base in (0, 1] by squaring with directed
    rounding; denominators stay bounded by 2**shift instead of exploding."""
    lo = hi = Fraction(1)
    blo = bhi = base
    while exp:
        if exp & 1:
            lo = _round_down(lo * blo, bits)
            hi = _round_up(hi * bhi, bits)
        exp >>= 1
        if exp:
            blo = _round_down(blo * blo, bits)
            bhi = _round_up(bhi * bhi, bits)
    return lo, min(hi, Fraction(1))


def check_lll_hypothesis(classes: Sequence[EventClass]):
    """Condition p_i <= a_i * prod_j (1 - a_j)^Delta_ij, evaluated in exact
    rational arithmetic when the exponents are modest and with certified
    directed-rounding enclosures when they are astronomically large.
    Returns (ok, margins) with one rational margin (right side minus p
    bound) per class; bounded margins are conservative (rounded down)."""
    a_of = {c.index: c.a_value for c in classes}
    margins = []
    ok = True
    for c in classes:
        exps = [int(d) for d in c.delta.values()]
        if any(j not in a_of for j in c.delta):
            raise ValueError("delta refers to unknown class")
        if sum(exps) <= _EXACT_EXPONENT_LIMIT:
            rhs = c.a_value
            for j, dij in sorted(c.delta.items()):
                rhs *= (1 - a_of[j]) ** int(dij)
            margin = rhs - c.p_bound
        else:
            bits = 256
            while True:
                rhs_lo = rhs_hi = c.a_value
                for j, dij in sorted(c.delta.items()):
                    flo, fhi = _pow_bounds(1 - a_of[j], int(dij), bits)
                    rhs_lo = _round_down(rhs_lo * flo, bits)
                    rhs_hi = _round_up(rhs_hi * fhi, bits)
                if c.p_bound <= rhs_lo or c.p_bound > rhs_hi or bits >= 4096:
                    break
                bits *= 4
            margin = rhs_lo - c.p_bound
        margins.append(margin)
        if margin < 0:
            ok = False
    return ok, margins


def intergraph_event_classes(consts: ScConstants,
                             alphabet_size: int | None = None) -> list:
    """Event classes of the inter-graph avoidance argument: one class per
    family member i, with p_i <= e_i D^gamma_i / L^gamma_i (edge count e_i
    bounded by D^(A girth_i)), Delta_ij = gamma_i gamma_j D^gamma_j and
    a_i = (2D)^(-gamma_i)."""
    D = consts.D
    L = consts.L if alphabet_size is None else alphabet_size
    classes = []
    for i, (girth, gamma) in enumerate(zip(consts.girths, consts.gamma)):
        _, e_hi = pow_frac_bounds(Fraction(D), consts.A * girth)
        p = e_hi * Fraction(D, L) ** gamma
        a = Fraction(1, (2 * D) ** gamma)
        delta = {j: gamma * gj * D ** gj
                 for j, gj in enumerate(consts.gamma)}
        classes.append(EventClass(index=i, path_length=gamma, p_bound=p,
                                  a_value=a, delta=delta))
    return classes


def intragraph_event_classes(consts: ScConstants, girth: int,
                             alphabet_size: int | None = None) -> list:
    """Classes of the bad-pattern argument for one graph: lengths 2..F,
    p_i <= (2 / Lbar^E)^i, Delta_ij = i j D^j, a_i = (2D)^(-i).

    The source states a_i = (2D)^i alongside the requirement a_i <= 1/2;
    the reciprocal is the reading consistent with the inter-graph argument
    and is what this checker uses.
    """
    D = consts.D
    L = consts.Lbar if alphabet_size is None else alphabet_size
    top = floor_frac(consts.F_of_girth(girth))
    lengths = list(range(2, top + 1))
    classes = []
    for i in lengths:
        le_lo, _ = pow_frac_bounds(Fraction(L), consts.E)
        p = min(Fraction(1), (2 / le_lo) ** i)
        a = Fraction(1, (2 * D) ** i)
        delta = {j: i * j * D ** j for j in lengths}
        classes.append(EventClass(index=i, path_length=i, p_bound=p,
                                  a_value=a, delta=delta))
    return classes


# -- forbidden dictionaries ------------------------------------------------


class ForbiddenDictionary:
    """Per source graph: all words of non-backtracking paths of length
    gamma_i, closed under formal inversion."""

    def __init__(self, source_index: int, gamma: int, words):
        self.source_index = source_index
        self.gamma = gamma
        self.words = set(words)
        for w in list(self.words):
            self.words.add(inverse_word(w))

    def __contains__(self, w: Word) -> bool:
        return w in self.words

    def __len__(self) -> int:
        return len(self.words)


def build_dictionary(g: Graph, lab: Labeling, gamma: int,
                     source_index: int = 0) -> ForbiddenDictionary:
    if gamma < 1:
        raise ValueError("gamma must be >= 1")
    words = (word_of_edges(lab, t) for t in _iter_paths(g, gamma))
    return ForbiddenDictionary(source_index, gamma, words)


def _iter_paths(g: Graph, length: int) -> Iterator[tuple[int, ...]]:
    """Private lexicographic non-backtracking edge-simple path enumerator
    (the verification module keeps its own, so the two scans stay
    independent)."""
    stack = []
    used = set()

    def extend(e):
        stack.append(e)
        used.add(e // 2)
        if len(stack) == length:
            yield tuple(stack)
        else:
            for f in g.out[g.dst[e]]:
                if f != (e ^ 1) and f // 2 not in used:
                    yield from extend(f)
        stack.pop()
        used.discard(e // 2)

    for e0 in range(g.directed_count):
        yield from extend(e0)


# -- bad patterns ----------------------------------------------------------


def detect_bad_pattern(w: Word, E: Fraction):
    """Classify w as pattern C, A, B or none, with a witness.

    C: some adjacent pair (x, -x); witness is its position.
    A: the length-q prefix equals the length-q suffix for some q >= E|w|
       (q < |w|); witness is the maximal such q (the longest border).
    B: the length-q suffix is the reversed formal inverse of the length-q
       prefix for some q >= E|w|; witness is the maximal q.
    """
    n = len(w)
    if n < 2:
        return None, None
    for i in range(n - 1):
        if w[i + 1] == -w[i]:
            return "C", i
    qmin = max(1, ceil_frac(Fraction(E) * n))
    border = _longest_border(w)
    if border >= qmin:
        return "A", border
    mirror = _longest_common_suffix(w, inverse_word(w))
    if mirror >= qmin:
        return "B", mirror
    return None, None


def _longest_border(w: Word) -> int:
    """Longest proper prefix of w that is also a suffix (KMP failure)."""
    fail = [0] * len(w)
    k = 0
    for i in range(1, len(w)):
        while k > 0 and w[i] != w[k]:
            k = fail[k - 1]
        if w[i] == w[k]:
            k += 1
        fail[i] = k
    return fail[-1]


def _longest_common_suffix(u: Word, v: Word) -> int:
    t = 0
    while t < min(len(u), len(v)) and u[-1 - t] == v[-1 - t]:
        t += 1
    return t


# -- resampling traces -----------------------------------------------------


@dataclass
class ResampleTrace:
    seed: int
    alphabet_size: int
    kind: str
    rounds: list = field(default_factory=list)
    status: str = "ok"

    def log(self, desc: str, undirected_edges) -> None:
        self.rounds.append((desc, tuple(sorted(set(undirected_edges)))))

    def to_text(self) -> str:
        lines = [f"TRACE kind {self.kind} seed {self.seed} "
                 f"alphabet {self.alphabet_size} status {self.status}"]
        for k, (desc, edges) in enumerate(self.rounds, start=1):
            lines.append(f"ROUND {k} EVENT {desc} EDGES "
                         + " ".join(str(i) for i in edges))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ResampleTrace":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        if head[0] != "TRACE":
            raise ValueError("missing TRACE header")
        fields = dict(zip(head[1::2], head[2::2]))
        trace = cls(seed=int(fields["seed"]),
                    alphabet_size=int(fields["alphabet"]),
                    kind=fields["kind"], status=fields["status"])
        for ln in lines[1:]:
            parts = ln.split()
            ei = parts.index("EDGES")
            desc = " ".join(parts[parts.index("EVENT") + 1:ei])
            trace.rounds.append((desc, tuple(int(x) for x in parts[ei + 1:])))
        return trace


class ResampleFailure(RuntimeError):
    def __init__(self, message: str, trace: ResampleTrace,
                 labeling: Labeling):
        super().__init__(message)
        self.trace = trace
        self.labeling = labeling


def _random_labeling(g: Graph, alphabet: Alphabet, rng) -> Labeling:
    letters = []
    for _ in range(g.edge_count):
        a = rng.randrange(1, alphabet.size + 1)
        letters.append(a if rng.random() < 0.5 else -a)
    return Labeling.from_undirected(g, letters, alphabet)


# -- inter-graph engine ----------------------------------------------------


def label_intergraph(graphs: Sequence[Graph], consts: ScConstants,
                     alphabet_size: int, seed: int,
                     max_rounds: int = 100000):
    """Inductively label the family so that no gamma_i-word of an earlier
    member appears along any path of the current one; returns
    (labelings, traces)."""
    if alphabet_size < 2:
        raise ValueError("alphabet size must be >= 2")
    alphabet = Alphabet(alphabet_size)
    rng = random.Random(("intergraph", seed).__repr__())
    labelings = []
    traces = []
    dicts = []
    for n, g in enumerate(graphs):
        trace = ResampleTrace(seed=seed, alphabet_size=alphabet_size,
                              kind=f"intergraph:{g.name}")
        lab = _random_labeling(g, alphabet, rng)
        for _ in range(max_rounds):
            violation = _first_intergraph_violation(g, lab, dicts)
            if violation is None:
                break
            d, path = violation
            desc = (f"graph={n};dict={d.source_index};gamma={d.gamma};"
                    f"path=" + ",".join(str(e) for e in path))
            edges = [e // 2 for e in path]
            trace.log(desc, edges)
            lab = lab.with_edges_resampled(edges, rng)
        else:
            trace.status = "failed"
            traces.append(trace)
            raise ResampleFailure(
                f"intergraph labeling of {g.name} did not converge in "
                f"{max_rounds} rounds", trace, lab)
        labelings.append(lab)
        traces.append(trace)
        dicts.append(build_dictionary(g, lab, consts.gamma[n],
                                      source_index=n))
    return labelings, traces


def _first_intergraph_violation(g: Graph, lab: Labeling, dicts):
    """Lexicographically least violation, ordered by (gamma, source graph,
    path edge tuple)."""
    for d in sorted(dicts, key=lambda d: (d.gamma, d.source_index)):
        for t in _iter_paths(g, d.gamma):
            if word_of_edges(lab, t) in d:
                return d, t
    return None


# -- intra-graph engine ----------------------------------------------------


def label_intragraph(g: Graph, consts: ScConstants, girth: int,
                     alphabet_size: int, seed: int,
                     max_rounds: int = 100000):
    """Resample until no non-backtracking path of length 2..F carries a bad
    word; returns (labeling, trace)."""
    if alphabet_size < 2:
        raise ValueError("alphabet size must be >= 2")
    alphabet = Alphabet(alphabet_size)
    rng = random.Random(("intragraph", g.name, seed).__repr__())
    trace = ResampleTrace(seed=seed, alphabet_size=alphabet_size,
                          kind=f"intragraph:{g.name}")
    top = floor_frac(consts.F_of_girth(girth))
    lab = _random_labeling(g, alphabet, rng)
    # All candidate paths in scan order (length ascending, then start edge),
    # indexed once; a path stays clean until an edge of it is resampled, so
    # only dirty indices need rechecking and the least dirty index is the
    # overall least violation.
    paths = []
    for length in range(2, top + 1):
        paths.extend(_iter_paths(g, length))
    edge_paths = [[] for _ in range(g.edge_count)]
    for i, t in enumerate(paths):
        for e in t:
            edge_paths[e // 2].append(i)
    heap = list(range(len(paths)))
    in_heap = [True] * len(paths)
    rounds = 0
    while heap:
        i = heapq.heappop(heap)
        in_heap[i] = False
        t = paths[i]
        kind, q = detect_bad_pattern(word_of_edges(lab, t), E=consts.E)
        if kind is None:
            continue
        desc = (f"graph={g.name};len={len(t)};pattern={kind};witness={q};"
                f"path=" + ",".join(str(e) for e in t))
        edges = [e // 2 for e in t]
        trace.log(desc, edges)
        lab = lab.with_edges_resampled(edges, rng)
        rounds += 1
        if rounds >= max_rounds:
            trace.status = "failed"
            raise ResampleFailure(
                f"intragraph labeling of {g.name} did not converge in "
                f"{max_rounds} rounds", trace, lab)
        for u in edges:
            for j in edge_paths[u]:
                if not in_heap[j]:
                    in_heap[j] = True
                    heapq.heappush(heap, j)
    trace.status = "ok"
    return lab, trace


def _first_bad_path(g: Graph, lab: Labeling, E: Fraction, top: int):
    for length in range(2, top + 1):
        for t in _iter_paths(g, length):
            kind, q = detect_bad_pattern(word_of_edges(lab, t), E)
            if kind is not None:
                return t, kind, q
    return None
