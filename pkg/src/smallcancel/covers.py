"""Z2-homology covers with lifted labellings and deck groups, fiber walls,
(beta, Phi)-separation, the wall pseudo-metric, and the lacunarity and
properness checks.

The cover of a graph with k independent cycles lives on vertex pairs
(v, x) with x a k-bit mask; crossing the j-th non-tree edge flips bit j.
Deck transformations are the 2^k mask translations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .graphs import Graph, GraphError
from .labelings import Alphabet, Labeling
from .rationals import (AffineFn, TableFn, cmp_linear_sqrt, format_fraction,
                        isqrt_frac_ge)


class WallError(ValueError):
    pass


@dataclass
class CoveringMap:
    base: Graph
    cover: Graph
    vertex_proj: list
    edge_proj: list            # undirected cover edge -> undirected base edge
    deck_masks: list           # the deck group as ZZ_2^k masks
    k: int
    base_labeling: Labeling | None = None
    cover_labeling: Labeling | None = None
    tree_edges: tuple = ()

    def deck_vertex_action(self, mask: int) -> list:
        """The deck transformation for a mask, as a vertex permutation."""
        n = self.base.vertex_count
        size = 1 << self.k
        return [(cv // size) * size + ((cv % size) ^ mask)
                for cv in range(self.cover.vertex_count)]

    def directed_edge_orbits(self) -> list:
        """Orbit id of each directed cover edge under the deck action: the
        deck group permutes the 2^k parallel copies of each base edge and
        keeps the direction."""
        orbits = []
        for c in range(self.cover.edge_count):
            base_edge = self.edge_proj[c]
            orbits += [2 * base_edge, 2 * base_edge + 1]
        return orbits

    def validate(self) -> None:
        size = 1 << self.k
        for cv, bv in enumerate(self.vertex_proj):
            if bv != cv // size:
                raise GraphError("vertex projection out of pattern")
        for c, (u, v) in enumerate(self.cover.edges):
            bu, bv = self.base.edges[self.edge_proj[c]]
            if {self.vertex_proj[u], self.vertex_proj[v]} != {bu, bv} and \
                    not (bu == bv and self.vertex_proj[u] == bu):
                raise GraphError("edge projection breaks incidence")
        if self.cover_labeling is not None and self.base_labeling is not None:
            for c in range(self.cover.edge_count):
                b = self.edge_proj[c]
                if self.cover_labeling.assignment[2 * c] != \
                        self.base_labeling.assignment[2 * b]:
                    raise GraphError("labels are not pulled back")


def z2_cover(g: Graph, lab: Labeling | None = None) -> CoveringMap:
    """The mod-2 homology cover, from a BFS spanning tree rooted at vertex
    0; one ZZ_2 coordinate per non-tree edge."""
    g.require_connected()
    parent = [-1] * g.vertex_count
    seen = [False] * g.vertex_count
    seen[0] = True
    order = [0]
    tree = set()
    for v in order:
        for e in g.out[v]:
            w = g.dst[e]
            if not seen[w]:
                seen[w] = True
                parent[w] = e
                tree.add(e // 2)
                order.append(w)
    nontree = [i for i in range(g.edge_count) if i not in tree]
    k = len(nontree)
    bit = {i: 1 << j for j, i in enumerate(nontree)}
    size = 1 << k
    edges = []
    edge_proj = []
    letters = []
    for i, (u, v) in enumerate(g.edges):
        mask = bit.get(i, 0)
        for x in range(size):
            edges.append((u * size + x, v * size + (x ^ mask)))
            edge_proj.append(i)
            if lab is not None:
                letters.append(lab.assignment[2 * i])
    cover = Graph(g.vertex_count * size, edges, name=f"{g.name}^")
    cover_lab = None
    if lab is not None:
        cover_lab = Labeling.from_undirected(cover, letters, lab.alphabet)
    cm = CoveringMap(base=g, cover=cover,
                     vertex_proj=[cv // size for cv in range(cover.vertex_count)],
                     edge_proj=edge_proj,
                     deck_masks=list(range(size)), k=k,
                     base_labeling=lab, cover_labeling=cover_lab,
                     tree_edges=tuple(sorted(tree)))
    cm.validate()
    return cm


@dataclass
class CompositeCover:
    stages: list
    base: Graph
    cover: Graph

    def vertex_proj(self, cv: int) -> int:
        for stage in reversed(self.stages):
            cv = stage.vertex_proj[cv]
        return cv

    def edge_proj(self, c: int) -> int:
        for stage in reversed(self.stages):
            c = stage.edge_proj[c]
        return c

    @property
    def last(self) -> CoveringMap:
        return self.stages[-1]


def girth_boost(g: Graph, target_girth: int, max_iterations: int = 10,
                lab: Labeling | None = None) -> CompositeCover:
    """Iterate z2_cover until the girth reaches the target."""
    if g.metrics().girth == float("inf"):
        raise GraphError("girth boost needs a graph with a cycle")
    stages = []
    current, current_lab = g, lab
    for _ in range(max_iterations):
        if current.metrics().girth >= target_girth:
            return CompositeCover(stages=stages, base=g, cover=current)
        cm = z2_cover(current, current_lab)
        stages.append(cm)
        current, current_lab = cm.cover, cm.cover_labeling
    if current.metrics().girth >= target_girth:
        return CompositeCover(stages=stages, base=g, cover=current)
    raise GraphError(
        f"girth boost stalled at girth {current.metrics().girth} after "
        f"{max_iterations} iterations (target {target_girth})")


# -- walls -----------------------------------------------------------------


@dataclass
class WallSystem:
    graph: Graph
    walls: list                     # list of lists of undirected edges
    _sides: list = field(default=None, repr=False)

    def validate(self) -> None:
        seen = {}
        for wi, wall in enumerate(self.walls):
            if not wall:
                raise WallError(f"wall {wi} is empty")
            for i in wall:
                if i in seen:
                    raise WallError(f"edge {i} in walls {seen[i]} and {wi}")
                seen[i] = wi
        if len(seen) != self.graph.edge_count:
            raise WallError("walls do not cover every edge")
        for wi in range(len(self.walls)):
            comps = self._components_without(wi)
            if max(comps) + 1 != 2:
                raise WallError(
                    f"wall {wi} leaves {max(comps) + 1} components, not 2")

    def _components_without(self, wi: int) -> list:
        g = self.graph
        banned = set(self.walls[wi])
        comp = [-1] * g.vertex_count
        c = 0
        for root in range(g.vertex_count):
            if comp[root] >= 0:
                continue
            comp[root] = c
            stack = [root]
            while stack:
                v = stack.pop()
                for e in g.out[v]:
                    if e // 2 in banned:
                        continue
                    w = g.dst[e]
                    if comp[w] < 0:
                        comp[w] = c
                        stack.append(w)
            c += 1
        return comp

    def sides(self) -> list:
        """Per wall: the component index (0 or 1) of every vertex after
        removing the wall's open edges."""
        if self._sides is None:
            self._sides = [self._components_without(wi)
                           for wi in range(len(self.walls))]
        return self._sides

    def separates(self, wi: int, p: int, q: int) -> bool:
        s = self.sides()[wi]
        return s[p] != s[q]

    def wall_of_edge(self) -> dict:
        return {i: wi for wi, wall in enumerate(self.walls) for i in wall}

    # -- serialization -----------------------------------------------------

    def to_text(self) -> str:
        lines = [f"WALLS {self.graph.name} K {len(self.walls)}"]
        for wi, wall in enumerate(self.walls):
            lines.append(f"WALL {wi}: " + " ".join(str(i) for i in wall))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, graph: Graph) -> "WallSystem":
        lines = [ln.strip() for ln in text.splitlines()
                 if ln.strip() and not ln.strip().startswith("#")]
        head = lines[0].split()
        if head[0] != "WALLS" or head[2] != "K":
            raise WallError(f"malformed header: {lines[0]!r}")
        count = int(head[3])
        if len(lines) - 1 != count:
            raise WallError(f"expected {count} wall lines")
        walls = []
        for ln in lines[1:]:
            _, _, edges = ln.partition(":")
            walls.append([int(x) for x in edges.split()])
        ws = cls(graph=graph, walls=walls)
        ws.validate()
        return ws


def fiber_walls(cm: CoveringMap) -> WallSystem:
    """Walls = edge fibers of the covering projection; the two-component
    axiom is checked for every fiber and failure raises."""
    walls = [[] for _ in range(cm.base.edge_count)]
    for c in range(cm.cover.edge_count):
        walls[cm.edge_proj[c]].append(c)
    ws = WallSystem(graph=cm.cover, walls=walls)
    ws.validate()
    return ws


# -- separation, metric, lacunarity, properness ----------------------------


@dataclass
class SeparationProfile:
    beta_margin: Fraction | None
    beta_ok: bool
    phi_table: dict
    phi_ok: bool | None
    capped: bool = False


def _edge_distance(g: Graph, i: int, j: int) -> int:
    table = g.metrics().distance_table
    ends_i = g.edges[i]
    ends_j = g.edges[j]
    return min(table[a][b] for a in ends_i for b in ends_j)


def _iter_geodesics(g: Graph, p: int, q: int, cap: int):
    """All geodesics p -> q as vertex lists; raises StopIteration style cap
    by yielding None when the cap is hit."""
    table = g.metrics().distance_table
    count = 0
    path = [p]

    def walk(v):
        nonlocal count
        if v == q:
            count += 1
            yield list(path)
            return
        for e in g.out[v]:
            w = g.dst[e]
            if table[w][q] == table[v][q] - 1:
                path.append(w)
                yield from walk(w)
                path.pop()

    for geo in walk(p):
        if count > cap:
            yield None
            return
        yield geo


def separation_profile(g: Graph, walls: WallSystem, beta: Fraction,
                       girth: int, phi=None,
                       geodesic_cap: int = 200000) -> SeparationProfile:
    """Measure the beta-condition over same-wall edge pairs and the
    Phi-table over all geodesics; when a reference phi is supplied, also
    decide whether it lower-bounds the measured table."""
    beta = Fraction(beta)
    walls.validate()
    margin = None
    for wall in walls.walls:
        for ai in range(len(wall)):
            for bi in range(ai + 1, len(wall)):
                val = Fraction(_edge_distance(g, wall[ai], wall[bi]) + 1)
                if margin is None or val < margin:
                    margin = val
    beta_ok = margin is None or margin >= beta * girth
    edge_wall = walls.wall_of_edge()
    sides = walls.sides()
    table = {}
    capped = False
    n = g.vertex_count
    for p in range(n):
        for q in range(p + 1, n):
            t = g.distance(p, q)
            for geo in _iter_geodesics(g, p, q, geodesic_cap):
                if geo is None:
                    capped = True
                    break
                separating = 0
                for a, b in zip(geo, geo[1:]):
                    e = next(e for e in g.out[a] if g.dst[e] == b)
                    wi = edge_wall[e // 2]
                    if sides[wi][p] != sides[wi][q]:
                        separating += 1
                if t not in table or separating < table[t]:
                    table[t] = separating
    phi_ok = None
    if phi is not None and not capped:
        phi_ok = all(phi(Fraction(t)) <= v for t, v in table.items())
    margin_frac = None if margin is None else margin / girth
    return SeparationProfile(beta_margin=margin_frac, beta_ok=beta_ok,
                             phi_table=table, phi_ok=phi_ok, capped=capped)


def wall_metric(g: Graph, walls: WallSystem, p: int, q: int) -> int:
    sides = walls.sides()
    return sum(1 for s in sides if s[p] != s[q])


@dataclass
class RelatorCertificate:
    name: str
    girth: int
    diameter: int
    P: int
    bullets: dict
    margins: dict
    passed: bool | None


@dataclass
class WallingCertificate:
    D: int
    lam: Fraction
    beta: Fraction
    relators: list
    passed: bool | None

    def to_json(self) -> str:
        doc = {"D": self.D, "lambda": format_fraction(self.lam),
               "beta": format_fraction(self.beta),
               "passed": self.passed,
               "relators": [{
                   "name": r.name, "girth": r.girth,
                   "diameter": r.diameter, "P": r.P,
                   "bullets": {k: v for k, v in r.bullets.items()},
                   "margins": {k: format_fraction(v) if isinstance(v, Fraction)
                               else v for k, v in r.margins.items()},
                   "passed": r.passed} for r in self.relators]}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def lacunary_check(relators: Sequence[Graph],
                   wall_systems: Sequence[WallSystem],
                   lam: Fraction, beta: Fraction,
                   P_values: Sequence[int], Omega, Delta,
                   phis=None, profiles=None) -> WallingCertificate:
    """Definition-style proper lacunary walling certificate: per relator,
    the five bullets (degree bound D, C'(lambda) via the supplied P,
    (beta, Phi)-separation, the lacunarity inequality
    Phi((beta - lambda) girth) - 6 P >= Omega(girth), and the large-girth
    bound girth >= Delta(diameter)), evaluated in exact rationals. The
    measured phi table of each relator is used when no Phi is supplied."""
    lam, beta = Fraction(lam), Fraction(beta)
    if not (0 < beta <= Fraction(1, 2)):
        raise WallError("beta must lie in (0, 1/2]")
    if not (0 < lam < beta / 2):
        raise WallError("need 0 < lambda < beta/2")
    D = max(g.max_degree() for g in relators)
    entries = []
    all_passed = True
    for idx, (g, ws) in enumerate(zip(relators, wall_systems)):
        m = g.metrics()
        girth = int(m.girth)
        prof = profiles[idx] if profiles is not None else \
            separation_profile(g, ws, beta, girth)
        phi = None
        if phis is not None and phis[idx] is not None:
            phi = phis[idx]
        elif not prof.capped:
            phi = TableFn(prof.phi_table) if prof.phi_table else None
        P = P_values[idx]
        bullets = {}
        margins = {}
        bullets["degree"] = g.max_degree() <= D
        margins["degree"] = Fraction(D - g.max_degree())
        bullets["cprime"] = Fraction(P) < lam * girth if P is not None else None
        margins["cprime"] = lam * girth - P if P is not None else None
        bullets["separation"] = prof.beta_ok and (prof.phi_ok is not False)
        margins["separation"] = prof.beta_margin
        arg = (beta - lam) * girth
        try:
            phi_at = phi(arg) if phi is not None else None
        except ValueError:
            phi_at = None
        if phi_at is None or P is None:
            bullets["lacunarity"] = None
            margins["lacunarity"] = None
        else:
            lhs = phi_at - 6 * P
            rhs = Omega(Fraction(girth))
            bullets["lacunarity"] = lhs >= rhs
            margins["lacunarity"] = lhs - rhs
        try:
            delta_at = Delta(Fraction(m.diameter))
        except ValueError:
            delta_at = None
        if delta_at is None:
            bullets["large_girth"] = None
            margins["large_girth"] = None
        else:
            bullets["large_girth"] = Fraction(girth) >= delta_at
            margins["large_girth"] = Fraction(girth) - delta_at
        vals = list(bullets.values())
        passed = False if any(v is False for v in vals) else \
            (None if any(v is None for v in vals) else True)
        if passed is not True:
            all_passed = passed if all_passed is True else all_passed
        entries.append(RelatorCertificate(
            name=g.name, girth=girth, diameter=m.diameter, P=P,
            bullets=bullets, margins=margins, passed=passed))
    overall = True
    if any(r.passed is False for r in entries):
        overall = False
    elif any(r.passed is None for r in entries):
        overall = None
    return WallingCertificate(D=D, lam=lam, beta=beta, relators=entries,
                              passed=overall)


@dataclass
class PropernessReport:
    ok: bool | None
    worst_pair: tuple | None
    checked_pairs: int
    note: str = ""


def properness_check(g: Graph, walls: WallSystem, Omega,
                     Delta) -> PropernessReport:
    """For every vertex pair: d_W <= d and d_W >= Psi(d) with
    Psi(d) = min(sqrt(d)/2, Omega(Delta(sqrt(d)))), decided exactly when
    Omega and Delta are affine (so Omega(Delta(sqrt d)) = a sqrt(d) + b);
    table-valued functions cannot be evaluated at irrational arguments and
    yield an unknown verdict."""
    if not (isinstance(Omega, AffineFn) and isinstance(Delta, AffineFn)):
        return PropernessReport(ok=None, worst_pair=None, checked_pairs=0,
                                note="exact check needs affine Omega, Delta")
    a = Omega.a * Delta.a
    b = Omega.a * Delta.b + Omega.b
    worst = None
    worst_slack = None
    checked = 0
    for p in range(g.vertex_count):
        for q in range(p, g.vertex_count):
            d = g.distance(p, q)
            dw = wall_metric(g, walls, p, q)
            checked += 1
            if dw > d:
                return PropernessReport(ok=False, worst_pair=(p, q, d, dw),
                                        checked_pairs=checked,
                                        note="d_W exceeds d")
            # d_W >= min(sqrt(d)/2, a sqrt(d) + b) holds iff one branch does
            half_ok = isqrt_frac_ge(Fraction(2) * dw, d)
            omega_ok = cmp_linear_sqrt(Fraction(dw), a, b, d) >= 0
            if not (half_ok or omega_ok):
                return PropernessReport(ok=False, worst_pair=(p, q, d, dw),
                                        checked_pairs=checked,
                                        note="d_W below Psi(d)")
            # track the pair with the least d_W relative to d for the report
            ratio = Fraction(dw, d) if d > 0 else Fraction(1)
            if worst_slack is None or ratio < worst_slack:
                worst_slack = ratio
                worst = (p, q, d, dw)
    return PropernessReport(ok=True, worst_pair=worst,
                            checked_pairs=checked)
