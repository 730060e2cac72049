"""Command line interface.

Exit codes: 0 success, 1 invalid input, 2 stage failure, 3 integrity
failure. The default output root comes from SMALLCANCEL_OUTPUT_ROOT.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import covers, lll, pipeline, verify
from .graphs import (FamilySpec, Graph, GraphError, cycle_graph, measure_A,
                     random_regular, validate_family)
from .labelings import Alphabet, Labeling, constants, product
from .presentation import GraphicalPresentation, cayley_patch, embedding_check
from .rationals import format_fraction, parse_fraction

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_STAGE = 2
EXIT_INTEGRITY = 3


def _load_graphs(paths):
    graphs = []
    for p in paths:
        with open(p) as fh:
            graphs.append(Graph.from_text(fh.read()))
    return graphs


def _load_labelings(paths):
    labs = []
    for p in paths:
        with open(p) as fh:
            labs.append(Labeling.from_text(fh.read()))
    return labs


def _out_path(args, name):
    if getattr(args, "output", None):
        return args.output
    root = pipeline.default_output_root()
    os.makedirs(root, exist_ok=True)
    return os.path.join(root, name)


def cmd_generate(args):
    if args.kind == "cycle":
        g = cycle_graph(args.n)
    else:
        g = random_regular(args.n, args.degree, seed=args.seed,
                           min_girth=args.min_girth)
    path = _out_path(args, f"{g.name}.graph")
    with open(path, "w") as fh:
        fh.write(g.to_text())
    print(f"wrote {path} ({g.vertex_count} vertices, {g.edge_count} edges, "
          f"girth {g.metrics().girth})")
    return EXIT_OK


def cmd_validate(args):
    graphs = _load_graphs(args.graphs)
    D = max(g.max_degree() for g in graphs)
    A = parse_fraction(args.A) if args.A else max(Fraction(1),
                                                 measure_A(graphs))
    report = validate_family(FamilySpec(graphs=graphs, D=D, A=A,
                                        lam=parse_fraction(args.lam)))
    print(f"ok={report.ok} measured_A={format_fraction(report.measured_A)} "
          f"subsequence={report.subsequence}")
    for w in report.witnesses:
        print(f"  witness: {w}")
    return EXIT_OK if report.ok else EXIT_STAGE


def cmd_label(args):
    graphs = _load_graphs(args.graphs)
    lam = parse_fraction(args.lam)
    girths = [int(g.metrics().girth) for g in graphs]
    A = max(Fraction(1), measure_A(graphs))
    D = max(g.max_degree() for g in graphs)
    consts = constants(D, A, lam, girths)
    try:
        if args.mode in ("inter", "product"):
            inter, inter_traces = lll.label_intergraph(
                graphs, consts, args.alphabet_size, args.seed,
                args.max_rounds)
        if args.mode in ("intra", "product"):
            intra = []
            intra_traces = []
            for g, girth in zip(graphs, girths):
                lab, tr = lll.label_intragraph(
                    g, consts, girth, args.alphabet_size, args.seed,
                    args.max_rounds)
                intra.append(lab)
                intra_traces.append(tr)
    except lll.ResampleFailure as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_STAGE
    if args.mode == "inter":
        labs, traces = inter, inter_traces
    elif args.mode == "intra":
        labs, traces = intra, intra_traces
    else:
        labs = [product(a, b) for a, b in zip(inter, intra)]
        traces = inter_traces + intra_traces
    for g, lab in zip(graphs, labs):
        path = _out_path(args, f"{g.name}.lgraph") if not args.output \
            else args.output
        if len(graphs) > 1 or not args.output:
            path = os.path.join(os.path.dirname(path) or ".",
                                f"{g.name}.lgraph")
        with open(path, "w") as fh:
            fh.write(lab.to_text())
        print(f"wrote {path}")
    for tr in traces:
        tp = os.path.join(pipeline.default_output_root(),
                          f"{tr.kind.replace(':', '_')}.trace")
        os.makedirs(os.path.dirname(tp), exist_ok=True)
        with open(tp, "w") as fh:
            fh.write(tr.to_text())
    print(f"rounds: {sum(len(tr.rounds) for tr in traces)}")
    return EXIT_OK


def cmd_verify(args):
    labs = _load_labelings(args.labelings)
    graphs = [lab.graph for lab in labs]
    doc = verify.verification_report(graphs, labs,
                                     parse_fraction(args.lam))
    print(verify.render_report(doc), end="")
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(verify.report_to_json(doc))
    return EXIT_OK if doc["cprime"] == "true" else EXIT_STAGE


def cmd_cover(args):
    if args.labeled:
        lab = _load_labelings([args.graph])[0]
        cm = covers.z2_cover(lab.graph, lab)
        text = cm.cover_labeling.to_text()
    else:
        g = _load_graphs([args.graph])[0]
        cm = covers.z2_cover(g)
        text = cm.cover.to_text()
    path = _out_path(args, f"{cm.cover.name}.cover")
    with open(path, "w") as fh:
        fh.write(text)
    print(f"wrote {path} (k={cm.k}, {cm.cover.vertex_count} vertices, "
          f"girth {cm.cover.metrics().girth})")
    return EXIT_OK


def cmd_walls(args):
    g = _load_graphs([args.graph])[0]
    cm = covers.z2_cover(g)
    ws = covers.fiber_walls(cm)
    path = _out_path(args, f"{cm.cover.name}.walls")
    with open(path, "w") as fh:
        fh.write(cm.cover.to_text())
        fh.write(ws.to_text())
    print(f"wrote {path} ({len(ws.walls)} walls on {cm.cover.name})")
    return EXIT_OK


def cmd_certify(args):
    g = _load_graphs([args.graph])[0]
    cm = covers.z2_cover(g)
    ws = covers.fiber_walls(cm)
    lam = parse_fraction(args.lam)
    beta = parse_fraction(args.beta)
    omega = pipeline._parse_affine(args.omega)
    delta = pipeline._parse_affine(args.delta)
    cert = covers.lacunary_check([cm.cover], [ws], lam, beta,
                                 [args.P], omega, delta)
    print(cert.to_json(), end="")
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(cert.to_json())
    rep = covers.properness_check(cm.cover, ws, omega, delta)
    print(f"properness: {rep.ok} (checked {rep.checked_pairs} pairs)")
    if cert.passed is True and rep.ok is True:
        return EXIT_OK
    return EXIT_STAGE


def _presentation_from(args):
    labs = _load_labelings(args.relators)
    lam = parse_fraction(args.lam) if args.lam else None
    cert = None
    if lam is not None:
        verdict, _, _ = verify.check_cprime([lab.graph for lab in labs],
                                            labs, lam)
        if verdict == "true":
            cert = lam
    alpha = Alphabet(max(lab.alphabet.size for lab in labs))
    return GraphicalPresentation(alpha, labs, cprime_lambda=cert)


def cmd_cayley(args):
    pres = _presentation_from(args)
    patch = cayley_patch(pres, args.radius, args.vertex_cap)
    path = _out_path(args, "patch.txt")
    with open(path, "w") as fh:
        fh.write(patch.to_text())
    print(f"wrote {path} ({patch.vertex_count()} vertices, "
          f"exact={patch.exact})")
    if args.embed is not None:
        rep = embedding_check(pres, args.embed, args.radius,
                              args.vertex_cap)
        print(f"embedding: {rep.verdict} worst={rep.worst_pair}")
    return EXIT_OK if not patch.capped else EXIT_STAGE


def cmd_triviality(args):
    pres = _presentation_from(args)
    w = tuple(int(x) for x in args.word.split())
    if any(x == 0 for x in w):
        print("letters must be nonzero", file=sys.stderr)
        return EXIT_INVALID
    print(pres.is_trivial(w, args.fallback_cap))
    return EXIT_OK


def cmd_run(args):
    with open(args.config) as fh:
        cfg = pipeline.parse_config(fh.read())
    try:
        report = pipeline.run(cfg, outdir=args.output)
    except pipeline.StageFailure as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_STAGE
    print(f"run {report['status']}: {len(report['stages'])} stages, "
          f"{len(report['artifacts'])} artifacts")
    return EXIT_OK


def cmd_report(args):
    try:
        text = pipeline.render_run_report(args.rundir,
                                          figures=not args.no_figures)
    except pipeline.IntegrityError as exc:
        print(f"integrity failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except FileNotFoundError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_STAGE
    print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="smallcancel",
        description="small cancellation labellings, homology covers with "
                    "walls, and bounded presentation exploration")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a family member graph")
    g.add_argument("--kind", choices=["cycle", "regular"], default="cycle")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--degree", type=int, default=3)
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--min-girth", type=int, default=3)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("validate", help="validate family hypotheses")
    v.add_argument("graphs", nargs="+")
    v.add_argument("--lambda", dest="lam", default="1/6")
    v.add_argument("--A", default=None)
    v.set_defaults(func=cmd_validate)

    l = sub.add_parser("label", help="run the resampling engines")
    l.add_argument("graphs", nargs="+")
    l.add_argument("--mode", choices=["inter", "intra", "product"],
                   default="product")
    l.add_argument("--lambda", dest="lam", default="1/6")
    l.add_argument("--alphabet-size", type=int, default=64)
    l.add_argument("--seed", type=int, default=1)
    l.add_argument("--max-rounds", type=int, default=100000)
    l.add_argument("-o", "--output")
    l.set_defaults(func=cmd_label)

    w = sub.add_parser("verify", help="independent C'(lambda) verification")
    w.add_argument("labelings", nargs="+")
    w.add_argument("--lambda", dest="lam", default="1/6")
    w.add_argument("--json")
    w.set_defaults(func=cmd_verify)

    c = sub.add_parser("cover", help="Z2 homology cover")
    c.add_argument("graph")
    c.add_argument("--labeled", action="store_true")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_cover)

    ww = sub.add_parser("walls", help="fiber walls of the homology cover")
    ww.add_argument("graph")
    ww.add_argument("-o", "--output")
    ww.set_defaults(func=cmd_walls)

    ce = sub.add_parser("certify", help="lacunary walling certificate")
    ce.add_argument("graph")
    ce.add_argument("--lambda", dest="lam", default="1/24")
    ce.add_argument("--beta", default="1/2")
    ce.add_argument("--omega", default="1/3,0")
    ce.add_argument("--delta", default="1,0")
    ce.add_argument("--P", type=int, default=1)
    ce.add_argument("--json")
    ce.set_defaults(func=cmd_certify)

    ca = sub.add_parser("cayley", help="bounded Cayley patch")
    ca.add_argument("relators", nargs="+")
    ca.add_argument("--radius", type=int, required=True)
    ca.add_argument("--vertex-cap", type=int, default=100000)
    ca.add_argument("--lambda", dest="lam", default="1/24")
    ca.add_argument("--embed", type=int, default=None,
                    help="also run embedding_check on this relator index")
    ca.add_argument("-o", "--output")
    ca.set_defaults(func=cmd_cayley)

    tr = sub.add_parser("triviality", help="bounded word problem query")
    tr.add_argument("relators", nargs="+")
    tr.add_argument("--word", required=True,
                    help="signed letters separated by spaces")
    tr.add_argument("--lambda", dest="lam", default="1/24")
    tr.add_argument("--fallback-cap", type=int, default=5000)
    tr.set_defaults(func=cmd_triviality)

    ru = sub.add_parser("run", help="full pipeline from a config file")
    ru.add_argument("config")
    ru.add_argument("-o", "--output")
    ru.set_defaults(func=cmd_run)

    re = sub.add_parser("report", help="render a run report with figures")
    re.add_argument("rundir")
    re.add_argument("--no-figures", action="store_true")
    re.set_defaults(func=cmd_report)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GraphError, ValueError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
