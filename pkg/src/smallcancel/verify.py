"""A-posteriori verification of labeled families: repeated-path search,
exact piece enumeration, and the C'(lambda) small cancellation condition.

Everything here rescans labelings from scratch and shares no scanning code
with the resampling engine, so it can serve as that engine's oracle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .graphs import Graph
from .labelings import Labeling, Word, inverse_word, word_of_edges
from .rationals import format_fraction


@dataclass(frozen=True)
class Occurrence:
    graph_index: int
    edges: tuple[int, ...]
    inverted: bool


@dataclass
class PieceReport:
    longest_repeat: int | None
    witnesses: tuple | None
    P: dict
    piece_witness: dict
    max_piece_path: dict
    bounded: bool = False
    exact: bool = True


def _reverse(t):
    return tuple(e ^ 1 for e in reversed(t))


def _canonical_path(t):
    return min(t, _reverse(t))


def _paths_of_length(g: Graph, length: int):
    """Own non-backtracking edge-simple enumerator (kept separate from the
    engine's)."""
    out = g.out
    dst = g.dst

    def walk(e, used, acc):
        acc.append(e)
        used.add(e // 2)
        if len(acc) == length:
            yield tuple(acc)
        else:
            for f in out[dst[e]]:
                if f != (e ^ 1) and f // 2 not in used:
                    yield from walk(f, used, acc)
        acc.pop()
        used.discard(e // 2)

    for e0 in range(g.directed_count):
        yield from walk(e0, set(), [])


def _orbit_key(deck_orbits, gi, t):
    """Canonical form of a path under reversal and the supplied deck-orbit
    identification of directed edges."""
    if deck_orbits is None or deck_orbits[gi] is None:
        return _canonical_path(t)
    orb = deck_orbits[gi]
    return min(tuple(orb[e] for e in t), tuple(orb[e ^ 1] for e in reversed(t)))


def longest_repeated_path(graphs: Sequence[Graph],
                          labelings: Sequence[Labeling],
                          deck_orbits=None) -> PieceReport:
    """Maximum length of a path word occurring at two essentially distinct
    occurrences (different graph, or different path, or different deck
    orbit when orbits are supplied); repeats of length l+1 restrict to
    repeats of length l, so the scan walks lengths upward and stops at the
    first empty level."""
    best = 0
    witnesses = None
    length = 1
    cap = max((g.edge_count for g in graphs), default=0)
    while length <= cap:
        occs = {}
        for gi, (g, lab) in enumerate(zip(graphs, labelings)):
            for t in _paths_of_length(g, length):
                w = word_of_edges(lab, t)
                key = min(w, inverse_word(w))
                occs.setdefault(key, {})[
                    (gi,) + _orbit_key(deck_orbits, gi, t)] = (gi, t, w != key)
        found = None
        for key, positions in sorted(occs.items()):
            if len(positions) >= 2:
                pair = sorted(positions.values())[:2]
                found = (key, tuple(Occurrence(gi, t, inv)
                                    for gi, t, inv in pair))
                break
        if found is None:
            break
        best = length
        witnesses = found
        length += 1
    return PieceReport(longest_repeat=best, witnesses=witnesses, P={},
                      piece_witness={}, max_piece_path={})


# -- exact piece search ----------------------------------------------------
#
# A piece is a connected labeled graph immersing into the relators in two
# essentially different ways. With reduced labelings those correspond to
# connected components of the labeled fiber product (vertices: pairs of
# relator vertices; edges: pairs of directed edges with equal letter),
# minus the components on which the two projections differ by a
# label-preserving isomorphism of the relators (identity and other
# automorphisms for plain graphs, deck transformations for covers, where
# two vertices are deck related exactly when they project to the same base
# vertex).


def _out_by_label(g: Graph, lab: Labeling):
    tables = []
    for v in range(g.vertex_count):
        table = {}
        for e in g.out[v]:
            s = lab.assignment[e]
            if s in table:
                raise ValueError(
                    "piece search needs a reduced labeling "
                    f"(vertex {v} repeats letter {s})")
            table[s] = e
        tables.append(table)
    return tables


def label_preserving_isos(g: Graph, lab: Labeling, h: Graph,
                          labh: Labeling) -> list:
    """All label-preserving isomorphisms g -> h as vertex maps, by
    propagation from each candidate image of vertex 0 (propagation is
    deterministic because the labelings are reduced)."""
    if (g.vertex_count != h.vertex_count
            or g.edge_count != h.edge_count):
        return []
    tables = _out_by_label(h, labh)
    lab_g = lab.assignment
    isos = []
    for u in range(h.vertex_count):
        sigma = {0: u}
        queue = [0]
        ok = True
        while queue and ok:
            v = queue.pop()
            for e in g.out[v]:
                f = tables[sigma[v]].get(lab_g[e])
                if f is None:
                    ok = False
                    break
                w, tw = g.dst[e], h.dst[f]
                if w in sigma:
                    if sigma[w] != tw:
                        ok = False
                        break
                else:
                    sigma[w] = tw
                    queue.append(w)
        if (ok and len(sigma) == g.vertex_count
                and len(set(sigma.values())) == g.vertex_count):
            isos.append(tuple(sigma[v] for v in range(g.vertex_count)))
    return isos


def _fp_component(gs, labs, tables, gi, gj, seed, seen):
    """Breadth-first closure of one fiber-product component from a seed
    vertex pair; returns (vertices, undirected edge pairs)."""
    g, h = gs[gi], gs[gj]
    verts = {seed}
    queue = [seed]
    edges = set()
    for x, y in queue:
        for e1 in g.out[x]:
            e2 = tables[gj][y].get(labs[gi].assignment[e1])
            if e2 is None:
                continue
            edges.add(min((e1, e2), (e1 ^ 1, e2 ^ 1)))
            nxt = (g.dst[e1], h.dst[e2])
            if nxt not in verts:
                verts.add(nxt)
                queue.append(nxt)
    seen |= verts
    return verts, edges


def _component_diameter(g, h, verts, edges) -> int:
    adj = {v: [] for v in verts}
    for (e1, e2) in edges:
        a = (g.src[e1], h.src[e2])
        b = (g.dst[e1], h.dst[e2])
        adj[a].append(b)
        adj[b].append(a)
    diam = 0
    for root in verts:
        dist = {root: 0}
        frontier = [root]
        for v in frontier:
            for w in adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    frontier.append(w)
        diam = max(diam, max(dist.values()))
    return diam


def piece_bound(graphs: Sequence[Graph], labelings: Sequence[Labeling],
                projections=None, node_budget: int = 500000) -> PieceReport:
    """Exact maximal piece size P per graph (edge count) plus the maximal
    piece diameter (the quantity the C'(lambda) check compares against
    lambda girth). `projections` gives, per graph, the vertex projection
    of the covering it arose from (or None): components whose two
    projections differ by a deck transformation of that covering are not
    pieces. Without a projection the excluded isomorphisms are the
    label-preserving automorphisms of the graph itself."""
    P = {gi: 0 for gi in range(len(graphs))}
    piece_witness = {gi: None for gi in range(len(graphs))}
    max_path = {gi: 0 for gi in range(len(graphs))}
    tables = [_out_by_label(g, lab) for g, lab in zip(graphs, labelings)]
    autos = {}
    exhausted = False
    exact = True
    budget = node_budget
    for gi, g in enumerate(graphs):
        for gj in range(gi, len(graphs)):
            h = graphs[gj]
            proj_i = projections[gi] if projections else None
            proj_j = projections[gj] if projections else None
            if gi == gj and proj_i is None and gi not in autos:
                autos[gi] = label_preserving_isos(g, labelings[gi],
                                                  g, labelings[gi])
            if gi != gj and proj_i is None and proj_j is None:
                isos = label_preserving_isos(g, labelings[gi],
                                             h, labelings[gj])
            else:
                isos = autos.get(gi, []) if gi == gj else []
            seen = set()
            for x in range(g.vertex_count):
                for s, e1 in tables[gi][x].items():
                    for y in range(h.vertex_count):
                        if (x, y) in seen or s not in tables[gj][y]:
                            continue
                        if len(seen) > budget:
                            exhausted = True
                            break
                        verts, fp_edges = _fp_component(
                            graphs, labelings, tables, gi, gj, (x, y), seen)
                        n_edges = len(fp_edges)
                        if n_edges == 0:
                            continue
                        x0, y0 = next(iter(verts))
                        if gi == gj and proj_i is not None:
                            excluded = proj_i[x0] == proj_i[y0]
                        elif gi == gj:
                            excluded = any(sig[x0] == y0
                                           for sig in autos[gi])
                        else:
                            excluded = any(sig[x0] == y0 for sig in isos)
                        if excluded:
                            continue
                        diam = _component_diameter(g, h, verts, fp_edges)
                        if (n_edges != len(verts) - 1
                                or len({a for a, _ in verts}) != len(verts)
                                or len({b for _, b in verts}) != len(verts)):
                            # not a tree embedded on both sides: the
                            # component only bounds pieces from above
                            exact = False
                        for k in {gi, gj}:
                            if n_edges > P[k]:
                                P[k] = n_edges
                                piece_witness[k] = (gi, gj, (x0, y0),
                                                    n_edges)
                            max_path[k] = max(max_path[k], diam)
                    if exhausted:
                        break
                if exhausted:
                    break
    return PieceReport(longest_repeat=None, witnesses=None, P=P,
                       piece_witness=piece_witness,
                       max_piece_path=max_path,
                       bounded=exhausted, exact=exact)


def check_cprime(graphs: Sequence[Graph], labelings: Sequence[Labeling],
                 lam: Fraction, projections=None,
                 node_budget: int = 500000):
    """Three-valued C'(lambda) check: every piece diameter strictly below
    lambda times the girth of every relator. Returns (verdict, worst_ratio,
    report) with verdict in {'true', 'false', 'unknown'}. A budget-capped
    search only yields lower bounds, so 'true' degrades to 'unknown'; a
    non-tree component only yields upper bounds, so 'false' degrades to
    'unknown'."""
    lam = Fraction(lam)
    report = piece_bound(graphs, labelings, projections, node_budget)
    worst = Fraction(0)
    verdict = "true"
    for gi, g in enumerate(graphs):
        girth = g.metrics().girth
        if girth == float("inf"):
            continue
        diam_bound = report.max_piece_path[gi]
        worst = max(worst, Fraction(diam_bound, int(girth)))
        if Fraction(diam_bound) >= lam * int(girth):
            verdict = "false"
    if report.bounded and verdict == "true":
        verdict = "unknown"
    if not report.exact and verdict == "false":
        verdict = "unknown"
    return verdict, worst, report


# -- reports ---------------------------------------------------------------


def verification_report(graphs, labelings, lam: Fraction,
                        projections=None) -> dict:
    lam = Fraction(lam)
    verdict, worst, rep = check_cprime(graphs, labelings, lam, projections)
    repeat = longest_repeated_path(graphs, labelings).longest_repeat
    doc = {"lambda": format_fraction(lam),
           "cprime": verdict,
           "worst_ratio": format_fraction(worst),
           "longest_repeat": repeat,
           "graphs": []}
    for gi, g in enumerate(graphs):
        m = g.metrics()
        girth = None if m.girth == float("inf") else int(m.girth)
        entry = {"name": g.name,
                 "girth": girth,
                 "diameter": m.diameter,
                 "lambda_girth": format_fraction(lam * girth) if girth else None,
                 "P": rep.P[gi],
                 "max_piece_path": rep.max_piece_path[gi],
                 "cprime_ok": girth is None
                 or Fraction(rep.max_piece_path[gi]) < lam * girth}
        doc["graphs"].append(entry)
    return doc


def render_report(doc: dict) -> str:
    lines = [f"C'({doc['lambda']}) verification: {doc['cprime']} "
             f"(worst piece ratio {doc['worst_ratio']}, "
             f"longest repeat {doc['longest_repeat']})"]
    for entry in doc["graphs"]:
        lines.append(
            f"  {entry['name']}: girth={entry['girth']} "
            f"diam={entry['diameter']} P={entry['P']} "
            f"piece_path={entry['max_piece_path']} "
            f"ok={entry['cprime_ok']}")
    return "\n".join(lines) + "\n"


def report_to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
