"""End-to-end orchestration: configuration parsing, staged runs with
persisted artifacts and digests, report rendering, and the optional
spectral-gap utility.

A run directory holds the config copy, one artifact file per product
(graphs, labelings, traces, walls, certificates), and run.json whose every
claim embeds the sha256 of the backing artifact.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import covers, lll, verify
from .graphs import (FamilySpec, Graph, GraphError, cycle_graph, measure_A,
                     random_regular, validate_family)
from .labelings import Alphabet, Labeling, constants, product
from .rationals import AffineFn, format_fraction, parse_fraction

ENV_OUTPUT_ROOT = "SMALLCANCEL_OUTPUT_ROOT"


class ConfigError(ValueError):
    pass


class StageFailure(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


class IntegrityError(RuntimeError):
    pass


@dataclass
class PipelineConfig:
    family_kind: str = "cycles"            # cycles | regular | files
    cycles: list = field(default_factory=list)
    regular: list = field(default_factory=list)   # (n, d, min_girth)
    files: list = field(default_factory=list)
    lam: Fraction = Fraction(1, 6)
    beta: Fraction = Fraction(1, 2)
    alphabet_inter: int = 64
    alphabet_intra: int = 64
    seed: int = 1
    max_rounds: int = 100000
    vertex_cap: int = 100000
    radius: int = 0
    piece_budget: int = 500000
    boost_factor: Fraction = Fraction(2)
    cover_cap: int = 20000
    omega: AffineFn = AffineFn(Fraction(1, 3))
    delta: AffineFn = AffineFn(Fraction(1))
    outdir: str = ""
    walls_enabled: bool = True

    def validate(self) -> None:
        if not (0 < self.lam <= Fraction(1, 6)):
            raise ConfigError("lambda must lie in (0, 1/6]")
        if not (0 < self.beta <= Fraction(1, 2)):
            raise ConfigError("beta must lie in (0, 1/2]")
        if self.walls_enabled and not self.lam < self.beta / 2:
            raise ConfigError("walls need lambda < beta/2")


def _parse_affine(text: str) -> AffineFn:
    parts = [p.strip() for p in text.split(",")]
    a = parse_fraction(parts[0])
    b = parse_fraction(parts[1]) if len(parts) > 1 else Fraction(0)
    return AffineFn(a, b)


def parse_config(text: str) -> PipelineConfig:
    cfg = PipelineConfig()
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key == "family":
            kind, _, rest = value.partition(":")
            cfg.family_kind = kind
            if kind == "cycles":
                cfg.cycles = [int(x) for x in rest.split(",") if x]
            elif kind == "regular":
                cfg.regular = [tuple(int(y) for y in x.split(":"))
                               for x in rest.split(",") if x]
            elif kind == "files":
                cfg.files = [x for x in rest.split(",") if x]
            else:
                raise ConfigError(f"unknown family kind {kind!r}")
        elif key == "lambda":
            cfg.lam = parse_fraction(value)
        elif key == "beta":
            cfg.beta = parse_fraction(value)
        elif key == "alphabet_inter":
            cfg.alphabet_inter = int(value)
        elif key == "alphabet_intra":
            cfg.alphabet_intra = int(value)
        elif key == "seed":
            cfg.seed = int(value)
        elif key == "max_rounds":
            cfg.max_rounds = int(value)
        elif key == "vertex_cap":
            cfg.vertex_cap = int(value)
        elif key == "radius":
            cfg.radius = int(value)
        elif key == "piece_budget":
            cfg.piece_budget = int(value)
        elif key == "boost_factor":
            cfg.boost_factor = parse_fraction(value)
        elif key == "cover_cap":
            cfg.cover_cap = int(value)
        elif key == "omega":
            cfg.omega = _parse_affine(value)
        elif key == "delta":
            cfg.delta = _parse_affine(value)
        elif key == "outdir":
            cfg.outdir = value
        elif key == "walls":
            cfg.walls_enabled = value.lower() in ("1", "true", "on", "yes")
        else:
            raise ConfigError(f"unknown config key {key!r}")
    cfg.validate()
    return cfg


def default_output_root() -> str:
    return os.environ.get(ENV_OUTPUT_ROOT, os.path.join(os.getcwd(), "runs"))


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


# -- the run ---------------------------------------------------------------


class Run:
    def __init__(self, cfg: PipelineConfig, outdir: str):
        self.cfg = cfg
        self.outdir = outdir
        os.makedirs(outdir, exist_ok=True)
        self.report = {"schema": 1, "stages": [], "artifacts": {},
                       "config": {"lambda": format_fraction(cfg.lam),
                                  "beta": format_fraction(cfg.beta),
                                  "seed": cfg.seed}}

    def save(self, name: str, text: str) -> str:
        path = os.path.join(self.outdir, name)
        with open(path, "w") as fh:
            fh.write(text)
        self.report["artifacts"][name] = sha256_file(path)
        return path

    def stage(self, name: str, status: str, started: float, **details):
        entry = {"name": name, "status": status,
                 "seconds": round(time.monotonic() - started, 3)}
        entry.update(details)
        self.report["stages"].append(entry)


def build_family(cfg: PipelineConfig):
    if cfg.family_kind == "cycles":
        return [cycle_graph(n) for n in cfg.cycles]
    if cfg.family_kind == "regular":
        return [random_regular(n, d, seed=cfg.seed + i, min_girth=mg)
                for i, (n, d, mg) in enumerate(cfg.regular)]
    if cfg.family_kind == "files":
        graphs = []
        for path in cfg.files:
            with open(path) as fh:
                graphs.append(Graph.from_text(fh.read()))
        return graphs
    raise ConfigError(f"unknown family kind {cfg.family_kind!r}")


def run(cfg: PipelineConfig, outdir: str | None = None) -> dict:
    """Execute the staged pipeline; a stage failure halts the run with a
    partial report (raised as StageFailure after the report is saved)."""
    cfg.validate()
    outdir = outdir or cfg.outdir or \
        os.path.join(default_output_root(), f"run-seed{cfg.seed}")
    r = Run(cfg, outdir)
    try:
        _run_stages(r)
        r.report["status"] = "ok"
    except StageFailure as exc:
        r.report["status"] = "failed"
        r.report["failure"] = str(exc)
        _save_report(r)
        raise
    _save_report(r)
    return r.report


def _save_report(r: Run) -> None:
    path = os.path.join(r.outdir, "run.json")
    with open(path, "w") as fh:
        json.dump(r.report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _run_stages(r: Run) -> None:
    cfg = r.cfg

    t = time.monotonic()
    try:
        graphs = build_family(cfg)
    except (GraphError, OSError) as exc:
        r.stage("generate", "failed", t, error=str(exc))
        raise StageFailure("generate", str(exc))
    for g in graphs:
        r.save(f"{g.name}.graph", g.to_text())
    r.stage("generate", "ok", t, members=[g.name for g in graphs])

    t = time.monotonic()
    D = max(g.max_degree() for g in graphs)
    A = max(Fraction(1), measure_A(graphs))
    spec = FamilySpec(graphs=graphs, D=D, A=A, lam=cfg.lam)
    fam = validate_family(spec)
    if not fam.ok:
        r.stage("validate", "failed", t, witnesses=[str(w) for w in fam.witnesses])
        raise StageFailure("validate", f"family invalid: {fam.witnesses}")
    girths = [int(g.metrics().girth) for g in graphs]
    consts = constants(D, A, cfg.lam, girths)
    r.stage("validate", "ok", t, D=D, A=format_fraction(A),
            measured_A=format_fraction(fam.measured_A),
            E=format_fraction(consts.E), girths=girths,
            L=str(consts.L), Lbar=str(consts.Lbar))

    t = time.monotonic()
    try:
        inter_labs, inter_traces = lll.label_intergraph(
            graphs, consts, cfg.alphabet_inter, cfg.seed, cfg.max_rounds)
        intra_labs = []
        intra_traces = []
        for g, girth in zip(graphs, girths):
            lab, trace = lll.label_intragraph(
                g, consts, girth, cfg.alphabet_intra, cfg.seed,
                cfg.max_rounds)
            intra_labs.append(lab)
            intra_traces.append(trace)
    except lll.ResampleFailure as exc:
        r.save("failed.trace", exc.trace.to_text())
        r.stage("label", "failed", t, error=str(exc))
        raise StageFailure("label", str(exc))
    products = [product(a, b) for a, b in zip(inter_labs, intra_labs)]
    for g, lab in zip(graphs, products):
        r.save(f"{g.name}.lgraph", lab.to_text())
    for tr in inter_traces + intra_traces:
        r.save(f"{tr.kind.replace(':', '_')}.trace", tr.to_text())
    rounds = {tr.kind: len(tr.rounds) for tr in inter_traces + intra_traces}
    r.stage("label", "ok", t, rounds=rounds)

    t = time.monotonic()
    doc = verify.verification_report(graphs, products, cfg.lam)
    r.save("verify.json", verify.report_to_json(doc))
    repeats_ok = all(entry["cprime_ok"] for entry in doc["graphs"])
    long_ok = True
    rep = verify.longest_repeated_path(graphs, products)
    for g, girth in zip(graphs, girths):
        if rep.longest_repeat >= cfg.lam * girth:
            long_ok = False
    if not (repeats_ok and long_ok):
        r.stage("verify", "failed", t, report=doc)
        raise StageFailure("verify", "repeated paths reach lambda girth")
    r.stage("verify", "ok", t, longest_repeat=rep.longest_repeat,
            cprime=doc["cprime"])

    if not cfg.walls_enabled:
        return

    t = time.monotonic()
    covers_final = []
    boosts = []
    for g, lab, girth in zip(graphs, products, girths):
        target = max(girth, int(cfg.boost_factor * girth))
        boosted = covers.girth_boost(g, target, lab=lab)
        boosts.append(boosted)
        hat = boosted.cover
        hat_lab = boosted.stages[-1].cover_labeling if boosted.stages else lab
        est = hat.vertex_count * 2 ** (hat.edge_count - hat.vertex_count + 1)
        if est > cfg.cover_cap:
            r.stage("cover", "failed", t, graph=g.name, size=est)
            raise StageFailure(
                "cover", f"homology cover of {hat.name} has {est} vertices, "
                f"over the cap {cfg.cover_cap}")
        cm = covers.z2_cover(hat, hat_lab)
        covers_final.append(cm)
        r.save(f"{cm.cover.name}.lgraph", cm.cover_labeling.to_text())
    r.stage("cover", "ok", t,
            sizes={cm.cover.name: cm.cover.vertex_count
                   for cm in covers_final})

    t = time.monotonic()
    wall_systems = []
    for cm in covers_final:
        ws = covers.fiber_walls(cm)
        wall_systems.append(ws)
        r.save(f"{cm.cover.name}.walls", ws.to_text())
    r.stage("walls", "ok", t,
            counts={cm.cover.name: len(ws.walls)
                    for cm, ws in zip(covers_final, wall_systems)})

    t = time.monotonic()
    cover_graphs = [cm.cover for cm in covers_final]
    cover_labs = [cm.cover_labeling for cm in covers_final]
    # project all the way down to the original base: vertices in the same
    # composite fiber are not essentially different occurrences
    projections = [
        [boosted.vertex_proj(cm.vertex_proj[v])
         for v in range(cm.cover.vertex_count)]
        for boosted, cm in zip(boosts, covers_final)]
    piece = verify.piece_bound(cover_graphs, cover_labs,
                               projections=projections,
                               node_budget=cfg.piece_budget)
    P_values = [piece.max_piece_path[i] for i in range(len(cover_graphs))]
    cert = covers.lacunary_check(cover_graphs, wall_systems, cfg.lam,
                                 cfg.beta, P_values, cfg.omega, cfg.delta)
    r.save("certificate.json", cert.to_json())
    proper = []
    for cm, ws in zip(covers_final, wall_systems):
        rep = covers.properness_check(cm.cover, ws, cfg.omega, cfg.delta)
        proper.append(rep.ok)
    status = "ok" if cert.passed is not False and all(p is not False
                                                      for p in proper) \
        else "failed"
    r.stage("certify", status, t, passed=cert.passed, properness=proper)
    if status == "failed":
        raise StageFailure("certify", "lacunarity or properness failed")

    if cfg.radius > 0:
        t = time.monotonic()
        from .presentation import GraphicalPresentation, cayley_patch
        alpha = Alphabet(max(lab.alphabet.size for lab in products))
        doc2 = verify.verification_report(graphs, products, cfg.lam)
        lam_cert = cfg.lam if doc2["cprime"] == "true" else None
        pres = GraphicalPresentation(alpha, products,
                                     cprime_lambda=lam_cert)
        patch = cayley_patch(pres, cfg.radius, cfg.vertex_cap)
        r.save("patch.txt", patch.to_text())
        r.stage("cayley", "ok", t, vertices=patch.vertex_count(),
                exact=patch.exact)


# -- reporting -------------------------------------------------------------


def check_integrity(outdir: str) -> None:
    path = os.path.join(outdir, "run.json")
    with open(path) as fh:
        doc = json.load(fh)
    for name, digest in doc.get("artifacts", {}).items():
        target = os.path.join(outdir, name)
        if not os.path.exists(target):
            raise IntegrityError(f"missing artifact {name}")
        if sha256_file(target) != digest:
            raise IntegrityError(f"digest mismatch for {name}")


def render_run_report(outdir: str, figures: bool = True) -> str:
    """Human-readable rendering plus matplotlib figures saved next to the
    run artifacts; integrity is rechecked first."""
    check_integrity(outdir)
    with open(os.path.join(outdir, "run.json")) as fh:
        doc = json.load(fh)
    lines = [f"run status: {doc.get('status')}",
             f"lambda = {doc['config']['lambda']}, "
             f"beta = {doc['config']['beta']}, seed = {doc['config']['seed']}"]
    for st in doc["stages"]:
        detail = {k: v for k, v in st.items()
                  if k not in ("name", "status", "seconds")}
        lines.append(f"  {st['name']}: {st['status']} "
                     f"({st['seconds']}s) {detail}")
    lines.append("artifacts:")
    for name, digest in sorted(doc.get("artifacts", {}).items()):
        lines.append(f"  {name} sha256={digest[:16]}...")
    text = "\n".join(lines) + "\n"
    with open(os.path.join(outdir, "report.txt"), "w") as fh:
        fh.write(text)
    if figures:
        render_figures(outdir, doc)
    return text


def render_figures(outdir: str, doc: dict) -> list:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []
    val = next((s for s in doc["stages"] if s["name"] == "validate"), None)
    if val and val.get("girths"):
        fig, ax = plt.subplots(figsize=(5, 3.2))
        ax.plot(range(len(val["girths"])), val["girths"], "o-")
        ax.set_xlabel("family member")
        ax.set_ylabel("girth")
        ax.set_title("girth growth along the family")
        fig.tight_layout()
        path = os.path.join(outdir, "girths.png")
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    lab = next((s for s in doc["stages"] if s["name"] == "label"), None)
    if lab and lab.get("rounds"):
        names = sorted(lab["rounds"])
        fig, ax = plt.subplots(figsize=(6, 3.2))
        ax.bar(range(len(names)), [lab["rounds"][n] for n in names])
        ax.set_xticks(range(len(names)))
        ax.set_xticklabels(names, rotation=45, ha="right", fontsize=6)
        ax.set_ylabel("resample rounds")
        ax.set_title("resampling effort per labeling")
        fig.tight_layout()
        path = os.path.join(outdir, "rounds.png")
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written


# -- optional spectral utility ---------------------------------------------


def spectral_gap_estimate(g: Graph, iterations: int = 2000,
                          seed: int = 0):
    """Second adjacency eigenvalue by power iteration orthogonal to the
    all-ones vector; informational only (assumes near-regularity)."""
    import numpy as np

    n = g.vertex_count
    adj = np.zeros((n, n))
    for u, v in g.edges:
        adj[u, v] += 1
        adj[v, u] += 1
    # shift by the max degree so the wanted eigenvalue dominates in
    # magnitude even on bipartite graphs (where -lambda_1 would win)
    shift = float(adj.sum(axis=1).max())
    shifted = adj + shift * np.eye(n)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    ones = np.ones(n) / np.sqrt(n)
    for _ in range(iterations):
        x = x - (x @ ones) * ones
        y = shifted @ x
        norm = np.linalg.norm(y)
        if norm == 0:
            return 0.0
        x = y / norm
    x = x - (x @ ones) * ones
    x /= np.linalg.norm(x)
    return float(x @ (adj @ x))
