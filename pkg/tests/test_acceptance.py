"""Acceptance suite: the ten primary criteria, each with its stated runtime
budget and with independently coded oracles (see conftest)."""

import time
from fractions import Fraction

import mpmath
import networkx as nx
import pytest

from conftest import (oracle_reduced, random_reduced, scan_bad_words,
                      theta_graph, to_nx)
from smallcancel.covers import (fiber_walls, lacunary_check, properness_check,
                                separation_profile, wall_metric, z2_cover)
from smallcancel.graphs import (FamilySpec, cycle_graph, random_regular,
                                validate_family)
from smallcancel.labelings import Alphabet, Labeling, constants, product
from smallcancel.lll import (check_lll_hypothesis, intergraph_event_classes,
                             label_intergraph, label_intragraph)
from smallcancel.presentation import (GraphicalPresentation, cayley_patch,
                                      embedding_check)
from smallcancel.rationals import AffineFn, floor_frac
from smallcancel.verify import check_cprime, longest_repeated_path, piece_bound

LAM = Fraction(1, 6)
CYCLE_SIZES = [12, 18, 24, 30, 36]
CYCLE_SEED = 6
CUBIC_SPECS = [(14, 1), (24, 1)]        # (n, generator seed), girth >= 5
CUBIC_SEED = 1
FAMILY_SIZES = [12, 18, 24]
FAMILY_SEED = 6
ALPHABET = 64


def report_line(num, text):
    print(f"[PRIMARY {num}] {text}: PASS")


def intragraph_instance(g, seed):
    m = g.metrics()
    girth = int(m.girth)
    A = max(Fraction(1, 2), Fraction(m.diameter, girth))
    girths = [girth] if LAM * girth > 1 else []
    consts = constants(3, A, LAM, girths)
    lab, trace = label_intragraph(g, consts, girth, ALPHABET, seed)
    return consts, girth, lab, trace


def run_criterion3_instances():
    results = []
    for n in CYCLE_SIZES:
        g = cycle_graph(n)
        results.append((g,) + intragraph_instance(g, CYCLE_SEED))
    for n, gseed in CUBIC_SPECS:
        g = random_regular(n, 3, seed=gseed, min_girth=5)
        results.append((g,) + intragraph_instance(g, CUBIC_SEED))
    return results


def run_criterion4_family():
    graphs = [cycle_graph(n) for n in FAMILY_SIZES]
    girths = [int(g.metrics().girth) for g in graphs]
    consts = constants(2, Fraction(1), LAM, girths)
    inter, inter_traces = label_intergraph(graphs, consts, ALPHABET,
                                           FAMILY_SEED)
    intra = []
    intra_traces = []
    for g, girth in zip(graphs, girths):
        lab, tr = label_intragraph(g, consts, girth, ALPHABET, FAMILY_SEED)
        intra.append(lab)
        intra_traces.append(tr)
    products = [product(a, b) for a, b in zip(inter, intra)]
    return graphs, girths, products, inter_traces + intra_traces


@pytest.fixture(scope="module")
def criterion3(request):
    start = time.monotonic()
    results = run_criterion3_instances()
    return results, time.monotonic() - start


@pytest.fixture(scope="module")
def criterion4():
    start = time.monotonic()
    out = run_criterion4_family()
    return out, time.monotonic() - start


def test_criterion_01_constants_and_inequalities():
    start = time.monotonic()
    c = constants(3, Fraction(1), LAM, [12, 18, 24])
    assert c.E == Fraction(1, 32)
    assert c.E < Fraction(1, 8)
    for girth, gamma in zip(c.girths, c.gamma):
        assert Fraction(girth, gamma) < 2 / c.lam
    mpmath.mp.dps = 200
    L_true = mpmath.ceil(2 * 3 * mpmath.e ** 4 * mpmath.mpf(3) ** 13)
    Lbar_true = mpmath.ceil((4 * 3 * mpmath.e ** 4) ** 32)
    assert abs(mpmath.mpf(c.L) - L_true) <= 1
    assert abs(mpmath.mpf(c.Lbar) - Lbar_true) <= 1
    elapsed = time.monotonic() - start
    assert elapsed < 1.0
    report_line(1, f"constants E=1/32, L={c.L}, Lbar~1e90 ({elapsed:.2f}s)")


def test_criterion_02_lll_hypothesis():
    start = time.monotonic()
    c = constants(3, Fraction(1), LAM, [12, 18, 24])
    ok, _ = check_lll_hypothesis(intergraph_event_classes(c))
    assert ok
    bad, margins = check_lll_hypothesis(
        intergraph_event_classes(c, alphabet_size=3))
    assert not bad and any(m < 0 for m in margins)
    elapsed = time.monotonic() - start
    assert elapsed < 1.0
    report_line(2, f"LLL classes accepted at L, rejected at D ({elapsed:.2f}s)")


def test_criterion_03_intragraph_labeling(criterion3):
    results, elapsed = criterion3
    for g, consts, girth, lab, trace in results:
        assert trace.status == "ok"
        assert len(trace.rounds) <= 10 ** 5
        top = floor_frac(consts.F_of_girth(girth))
        assert scan_bad_words(g, lab, consts.E, top) == []
        assert oracle_reduced(lab)
    assert elapsed < 300
    names = ", ".join(g.name for g, *_ in results)
    report_line(3, f"intragraph labellings clean on {names} ({elapsed:.1f}s)")


def test_criterion_04_family_product(criterion4):
    (graphs, girths, products, traces), elapsed = criterion4
    fam = validate_family(FamilySpec(graphs=graphs, D=2, A=Fraction(1),
                                     lam=LAM))
    assert fam.ok
    rep = longest_repeated_path(graphs, products)
    for girth in girths:
        assert Fraction(rep.longest_repeat) < LAM * girth
    assert elapsed < 600
    report_line(4, f"product labeling repeat={rep.longest_repeat} < "
                   f"lambda*girth ({elapsed:.1f}s)")


def test_criterion_05_covers():
    start = time.monotonic()
    for n in range(3, 9):
        cm = z2_cover(cycle_graph(n))
        assert nx.is_isomorphic(nx.Graph(to_nx(cm.cover)),
                                nx.cycle_graph(2 * n))
    theta = theta_graph()
    cm = z2_cover(theta)
    assert cm.cover.vertex_count == 8 and cm.cover.edge_count == 12
    assert cm.cover.metrics().girth == 4
    assert nx.is_isomorphic(nx.Graph(to_nx(cm.cover)), nx.hypercube_graph(3))
    for base, letters in [(cycle_graph(5), [1, -2, 3, 2, 1]),
                          (theta, [1, 2, 3])]:
        lab = Labeling.from_undirected(base, letters, Alphabet(3))
        cml = z2_cover(base, lab)
        cml.validate()
        for c in range(cml.cover.edge_count):
            b = cml.edge_proj[c]
            assert cml.cover_labeling.assignment[2 * c] == \
                lab.assignment[2 * b]
            assert cml.cover_labeling.assignment[2 * c + 1] == \
                -lab.assignment[2 * b]
    elapsed = time.monotonic() - start
    assert elapsed < 10
    report_line(5, f"z2 covers match C_2n and Q3, labels pulled back "
                   f"({elapsed:.2f}s)")


def test_criterion_06_walls():
    start = time.monotonic()
    instances = [z2_cover(cycle_graph(n)) for n in range(3, 7)]
    instances.append(z2_cover(theta_graph()))
    for cm in instances:
        ws = fiber_walls(cm)
        ws.validate()
        girth = int(cm.cover.metrics().girth)
        prof = separation_profile(cm.cover, ws, Fraction(1, 2), girth)
        assert prof.beta_ok
        assert prof.beta_margin == Fraction(1, 2)
        g = cm.cover
        for p in range(g.vertex_count):
            for q in range(g.vertex_count):
                assert wall_metric(g, ws, p, q) == g.distance(p, q)
    elapsed = time.monotonic() - start
    assert elapsed < 10
    report_line(6, f"fiber walls: axiom, beta=1/2 equality, d_W=d "
                   f"({elapsed:.2f}s)")


def test_criterion_07_lacunarity_and_properness():
    start = time.monotonic()
    omega = AffineFn(Fraction(1, 3))
    delta = AffineFn(Fraction(1))
    for n in [20, 23, 24, 25, 48]:
        cm = z2_cover(cycle_graph(n))
        ws = fiber_walls(cm)
        cert = lacunary_check([cm.cover], [ws], Fraction(1, 24),
                              Fraction(1, 2), [1], omega, delta)
        girth = 2 * n
        expect = Fraction(11, 24) * girth - 6 >= Fraction(girth, 3)
        assert cert.passed is expect, n
        assert cert.relators[0].margins["lacunarity"] == \
            Fraction(11, 24) * girth - 6 - Fraction(girth, 3)
        if expect:
            rep = properness_check(cm.cover, ws, omega, delta)
            assert rep.ok is True
    elapsed = time.monotonic() - start
    assert elapsed < 30
    report_line(7, f"lacunarity threshold at girth 48, properness holds "
                   f"({elapsed:.2f}s)")


def test_criterion_08_piece_invariance():
    start = time.monotonic()
    c6 = cycle_graph(6)
    c6_lab = Labeling.from_undirected(c6, [1, 2, 3, 1, 2, 5], Alphabet(5))
    theta = theta_graph()
    theta_lab = Labeling.from_undirected(theta, [1, 2, 3], Alphabet(3))
    cubic = random_regular(10, 3, seed=2, min_girth=4)
    cubic_lab = random_reduced(cubic, 5, seed=11)
    for g, lab in [(c6, c6_lab), (theta, theta_lab), (cubic, cubic_lab)]:
        base = piece_bound([g], [lab])
        cm = z2_cover(g, lab)
        cover = piece_bound([cm.cover], [cm.cover_labeling],
                            projections=[cm.vertex_proj])
        assert base.exact and cover.exact
        assert base.P[0] == cover.P[0], g.name
        assert base.max_piece_path[0] == cover.max_piece_path[0]
    elapsed = time.monotonic() - start
    assert elapsed < 60
    report_line(8, f"P(base)=P(cover mod deck) on C6, theta, cubic "
                   f"({elapsed:.2f}s)")


def test_criterion_09_presentation_layer():
    start = time.monotonic()
    g = cycle_graph(6)
    lab = Labeling.from_undirected(g, [1, 2, 3, 4, 5, 6], Alphabet(6))
    verdict, _, _ = check_cprime([g], [lab], Fraction(1, 24))
    assert verdict == "true"
    pres = GraphicalPresentation(Alphabet(6), [lab],
                                 cprime_lambda=Fraction(1, 24))
    cap = 3                                  # half the girth
    rep = embedding_check(pres, 0, radius_cap=cap)
    assert rep.verdict == "true"
    # cross-check by breadth-first search on the patch graph itself
    patch = cayley_patch(pres, cap)
    assert patch.exact
    adj = {}
    for a, b, _ in patch.edges:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    tree = pres.relators[0].tree_words()
    ids = [patch.word_to_id[patch.canonical(w)] for w in tree]

    def bfs_distance(a, b):
        dist = {a: 0}
        frontier = [a]
        while frontier:
            nxt = []
            for v in frontier:
                for w in adj.get(v, ()):
                    if w not in dist:
                        dist[w] = dist[v] + 1
                        nxt.append(w)
            frontier = nxt
        return dist.get(b)

    rel = pres.relators[0]
    for x in range(6):
        for y in range(6):
            if rel.dist[x][y] <= cap:
                assert bfs_distance(ids[x], ids[y]) == rel.dist[x][y]
    f2 = cayley_patch(GraphicalPresentation(Alphabet(2), []), 2)
    assert [len(layer) for layer in f2.layers] == [1, 4, 12]
    elapsed = time.monotonic() - start
    assert elapsed < 120
    report_line(9, f"embedding at cap 3 true, free ball 1+4+12 "
                   f"({elapsed:.2f}s)")


def test_criterion_10_determinism(criterion3, criterion4):
    results, _ = criterion3
    (graphs, girths, products, traces), _ = criterion4
    start = time.monotonic()
    rerun3 = run_criterion3_instances()
    for (g, _, _, lab, trace), (g2, _, _, lab2, trace2) in \
            zip(results, rerun3):
        assert g.to_text() == g2.to_text()
        assert lab.to_text() == lab2.to_text()
        assert trace.to_text() == trace2.to_text()
    _, _, products2, traces2 = run_criterion4_family()
    assert [p.to_text() for p in products] == \
        [p.to_text() for p in products2]
    assert [t.to_text() for t in traces] == [t.to_text() for t in traces2]
    elapsed = time.monotonic() - start
    report_line(10, f"reruns byte-identical for criteria 3 and 4 "
                    f"({elapsed:.1f}s)")
