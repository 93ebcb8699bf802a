"""``structree`` command line: gen, analyze, tree, split, check.

Exit codes: 0 success, 2 input error, 3 no cut / budget, 4 no splitting
(or unstable / unverifiable), 5 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import checks
from .bass_serre import stallings_pipeline, verify_splitting
from .cuts import DEFAULT_BUDGET, DEFAULT_KMAX, cut_encoding, kappa, minimal_cuts
from .errors import InputError, NoSplitting, IncreaseRadius, StructreeError
from .families import DEFAULT_PROBE, DEFAULT_RADIUS, make_generator, truncate
from .graph import EndMarkedGraph
from .groups import load_presentation
from .nesting import m_index, optimal_cuts
from .structure import (CutSystem, block_intersection_graph, block_sizes, blocks, build_tree,
                        check_block_lemma)

FORMATS = ("json", "dot", "text")


@dataclass(frozen=True)
class RunConfig:
    radius: int = DEFAULT_RADIUS
    probe_depth: int = DEFAULT_PROBE
    k_max: int = DEFAULT_KMAX
    budget: int = DEFAULT_BUDGET
    fmt: str = "text"
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        for name in ("radius", "probe_depth", "k_max", "budget", "threads"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be positive")
        if self.fmt not in FORMATS:
            raise InputError(f"unknown format {self.fmt!r}")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def load_input(source: str, cfg: RunConfig) -> EndMarkedGraph:
    """A graph JSON file if ``source`` names one, else a family spec."""
    if os.path.isfile(source) and not source.startswith("cayley:"):
        try:
            with open(source, encoding="utf-8") as fh:
                return EndMarkedGraph.from_json(fh.read())
        except OSError as exc:
            raise InputError(f"cannot read {source}: {exc}") from None
    return truncate(make_generator(source), cfg.radius, cfg.probe_depth).model


def _cut_row(c, m=None) -> dict:
    row = {"encoding": cut_encoding(c), "boundary": c.boundary_tokens(),
           "least_marker_side": c.contains_least_marker()}
    if m is not None:
        row["m"] = m
    return row


def cmd_gen(args, cfg: RunConfig) -> str:
    tr = truncate(make_generator(args.spec), cfg.radius, cfg.probe_depth)
    g = tr.model
    if cfg.fmt == "text":
        return (f"{args.spec} radius {cfg.radius}: {len(g.vertices)} vertices "
                f"({len(g.end_markers)} end markers), {len(g.edges)} edges\n")
    return _dump(g.to_dict()) + "\n"


def _nesting(g: EndMarkedGraph, cfg: RunConfig):
    k = kappa(g, cfg.k_max, cfg.budget)
    cuts = minimal_cuts(g, cfg.k_max, cfg.budget)
    idx = m_index(cuts)
    opt = optimal_cuts(cuts, idx)
    return k, cuts, idx, opt


def cmd_analyze(args, cfg: RunConfig) -> str:
    g = load_input(args.input, cfg)
    k, cuts, idx, opt = _nesting(g, cfg)
    if cfg.fmt == "json":
        return _dump({
            "graph": {"vertices": len(g.vertices), "end_markers": len(g.end_markers),
                      "edges": len(g.edges)},
            "kappa": k,
            "minimal_cuts": [_cut_row(c, idx.values[c]) for c in cuts],
            "m_star": idx.m_star,
            "m_histogram": {str(a): b for a, b in idx.histogram().items()},
            "optimal_cuts": [_cut_row(c) for c in opt],
        }) + "\n"
    hist = ", ".join(f"m={a}: {b}" for a, b in idx.histogram().items())
    return (f"kappa: {k}\n"
            f"oriented minimal cuts: {len(cuts)}\n"
            f"m_star: {idx.m_star} ({hist})\n"
            f"oriented optimal cuts: {len(opt)}\n")


def cmd_tree(args, cfg: RunConfig) -> str:
    g = load_input(args.input, cfg)
    _, _, _, opt = _nesting(g, cfg)
    sys_ = CutSystem(opt)
    tree = build_tree(sys_)
    report = None
    if args.blocks:
        bl = blocks(sys_)
        report = {"experimental": True, "sizes": {str(a): b for a, b in block_sizes(sys_, bl).items()},
                  "lemma": check_block_lemma(sys_, bl),
                  "intersection_graph": block_intersection_graph(sys_, bl)}
    if cfg.fmt == "dot":
        out = tree.to_dot()
        if report is not None:
            out += "// blocks: " + json.dumps(report, sort_keys=True) + "\n"
        return out
    if cfg.fmt == "json":
        data = tree.to_dict()
        if report is not None:
            data["blocks"] = report
        return _dump(data) + "\n"
    deg = sorted((len(v) for v in tree.adjacency().values()), reverse=True)
    out = f"classes: {len(tree.classes)}\nedges: {len(tree.edges)}\ndegrees: {deg}\n"
    if report is not None:
        out += f"blocks: {sum(report['sizes'].values())} (lemma passed: {report['lemma']['passed']})\n"
    return out


def cmd_split(args, cfg: RunConfig) -> str:
    pres = load_presentation(args.presentation)
    name = os.path.basename(args.presentation)
    desc, evidence = stallings_pipeline(pres, cfg.radius, cfg.probe_depth, cfg.k_max, cfg.budget, name=name)
    out = {"descriptor": desc.to_dict(), "evidence": evidence}
    if args.verify:
        out["verified"] = verify_splitting(desc, pres, min(cfg.radius, 4))
    if cfg.fmt == "json":
        return _dump(out) + "\n"
    orders = desc.to_dict()["orders"]
    text = f"kind: {desc.kind}\norders: {json.dumps(orders, sort_keys=True)}\n"
    if "verified" in out:
        text += f"verified: {out['verified']}\n"
    return text


def cmd_check(args, cfg: RunConfig) -> tuple[str, int]:
    if args.input:
        results = checks.check_graph(load_input(args.input, cfg))
    else:
        try:
            tags = checks.select(args.only)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(lambda t: checks.SUITES[t](seed=cfg.seed), tags))
    ok = all(r.passed for r in results)
    if cfg.fmt == "json":
        text = _dump({"seed": cfg.seed, "passed": ok, "suites": [r.to_dict() for r in results]}) + "\n"
    else:
        lines = [f"{'PASS' if r.passed else 'FAIL'} {r.tag} ({r.cases} cases)" for r in results]
        for r in results:
            for f in r.failures[:5]:
                lines.append(f"  {r.tag}: {json.dumps(f, sort_keys=True, default=str)}")
        text = "\n".join(lines) + "\n"
    return text, 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--radius", type=int, default=DEFAULT_RADIUS)
    common.add_argument("--probe", type=int, default=DEFAULT_PROBE)
    common.add_argument("--kmax", type=int, default=DEFAULT_KMAX)
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    common.add_argument("--format", choices=FORMATS, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1, help="worker hint for parallel stages")

    p = argparse.ArgumentParser(prog="structree", description="Edge-cut structure trees and Stallings splittings.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("gen", parents=[common], help="write the Graph JSON of a truncation")
    s.add_argument("spec")
    s = sub.add_parser("analyze", parents=[common], help="kappa, minimal cuts and the m-table")
    s.add_argument("input", help="graph JSON file or family spec")
    s = sub.add_parser("tree", parents=[common], help="structure tree of the optimal cuts")
    s.add_argument("input")
    s.add_argument("--blocks", action="store_true", help="add the experimental blocks report")
    s = sub.add_parser("split", parents=[common], help="Stallings splitting of a presentation")
    s.add_argument("presentation", help="presentation JSON file or bundled name")
    s.add_argument("--verify", action="store_true")
    s = sub.add_parser("check", parents=[common], help="run the property suites")
    s.add_argument("input", nargs="?", help="optional graph JSON file or family spec")
    s.add_argument("--only", default=None, help="comma-separated suite tags")
    return p


_DEFAULT_FORMAT = {"gen": "json", "analyze": "text", "tree": "dot", "split": "json", "check": "text"}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = RunConfig(args.radius, args.probe, args.kmax, args.budget,
                        args.format or _DEFAULT_FORMAT[args.command], args.seed, args.threads)
        if cfg.fmt == "dot" and args.command != "tree":
            raise InputError("dot output is only available for trees")
        code = 0
        if args.command == "check":
            text, code = cmd_check(args, cfg)
        else:
            text = {"gen": cmd_gen, "analyze": cmd_analyze, "tree": cmd_tree, "split": cmd_split}[args.command](args, cfg)
        sys.stdout.write(text)
        return code
    except StructreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, (NoSplitting, IncreaseRadius)) and exc.evidence:
            print(_dump({"error": str(exc), "evidence": exc.evidence}), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
