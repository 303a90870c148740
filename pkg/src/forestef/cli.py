"""Batch front-end: build an extended formulation, verify it, sweep the
protocols, and tabulate sizes against the tracked bound on grids.

Exit codes: 0 success, 1 verification/bound failure, 2 input error.
All randomness flows from --seed; identical configs produce identical
output bytes.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import exactlp, fixtures, formulations, planar, protocols, separators
from .graphs import Graph, GraphError, parse_graph

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


@dataclass
class RunConfig:
    command: str
    graph_path: Optional[str] = None
    tree_path: Optional[str] = None
    rotation_path: Optional[str] = None
    system_path: Optional[str] = None
    c: Fraction = Fraction(4)
    beta: Fraction = Fraction(1, 2)
    d: Fraction = Fraction(2)
    leaf_threshold: Optional[int] = None
    sep_mode: str = "heuristic"
    protocol: str = "classical"
    scope: str = "facet"
    trials: int = 200
    seed: int = 0
    out: str = "out"
    sizes: tuple[int, ...] = ()

    def validate(self) -> None:
        if not (0 < self.beta < 1):
            raise ValueError(f"beta must lie strictly in (0,1), got {self.beta}")
        if self.c <= 0 or self.d <= 0:
            raise ValueError("c and d must be positive")
        if self.trials < 0:
            raise ValueError("trials must be non-negative")


def _frac(text: str) -> Fraction:
    return Fraction(text)


def _load_graph(cfg: RunConfig) -> Graph:
    if cfg.graph_path is None:
        raise ValueError("a graph file is required")
    return parse_graph(Path(cfg.graph_path).read_text())


def _oracle(cfg: RunConfig):
    if cfg.sep_mode == "exact":
        return separators.find_separator_exact
    if cfg.sep_mode == "heuristic":
        return separators.find_separator_heuristic
    raise ValueError(f"unknown separator mode {cfg.sep_mode!r}")


def _build_tree(cfg: RunConfig, g: Graph) -> separators.SeparatorTree:
    leaf = cfg.leaf_threshold
    if leaf is None:
        leaf = separators.default_leaf_threshold(cfg.c)
    if cfg.sep_mode == "file":
        if cfg.tree_path is None:
            raise ValueError("--tree is required with --sep-mode file")
        return separators.separator_tree_from_text(
            Path(cfg.tree_path).read_text(), g, cfg.c, cfg.beta, leaf)
    return separators.build_separator_tree(g, cfg.c, cfg.beta, leaf, _oracle(cfg))


def cmd_build(cfg: RunConfig) -> int:
    g = _load_graph(cfg)
    tree = _build_tree(cfg, g)
    system, ledger = formulations.recursive_ef(g, tree)
    Path(f"{cfg.out}.ef").write_text(
        f"# seed={cfg.seed} c={cfg.c} beta={cfg.beta} d={cfg.d}\n" + system.to_text())
    Path(f"{cfg.out}.tree").write_text(tree.to_text())
    Path(f"{cfg.out}.ledger").write_text(
        f"# seed={cfg.seed}\n" + ledger.to_text(cfg.d))
    ok = ledger.check_bound(cfg.d)
    print(f"built size={system.size()} nodes={len(ledger.entries)} "
          f"within-bound={'yes' if ok else 'no'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(cfg: RunConfig) -> int:
    g = _load_graph(cfg)
    if cfg.system_path is not None:
        system = formulations.parse_linear_system(Path(cfg.system_path).read_text())
        if system.num_orig != g.m:
            raise ValueError("system/graph edge count mismatch")
    else:
        tree = _build_tree(cfg, g)
        system, _ = formulations.recursive_ef(g, tree)
    report = exactlp.verify_ef(g, system, trials=cfg.trials, seed=cfg.seed)
    Path(f"{cfg.out}.report").write_text(
        f"INFO seed={cfg.seed}\n" + report.render())
    print(f"verify checks={report.checks} failures={report.failures}")
    return EXIT_OK if report.all_pass else EXIT_FAIL


def cmd_protocol(cfg: RunConfig) -> int:
    if cfg.protocol == "williams":
        if cfg.rotation_path is None:
            raise ValueError("--rotation is required for the williams sweep")
        emb = planar.parse_rotation_file(Path(cfg.rotation_path).read_text())
        report = planar.williams_sweep(emb, bridgeless_only=(cfg.scope == "bridgeless"))
    else:
        g = _load_graph(cfg)
        if cfg.protocol == "separator":
            tree = _build_tree(cfg, g)
            report = protocols.protocol_sweep(g, tree, d=cfg.d)
        elif cfg.protocol == "classical":
            report = protocols.protocol_sweep(g)
        else:
            raise ValueError(f"unknown protocol {cfg.protocol!r}")
    Path(f"{cfg.out}.report").write_text(
        f"INFO seed={cfg.seed}\n" + report.render())
    print(f"protocol checks={report.checks} failures={report.failures}")
    return EXIT_OK if report.all_pass else EXIT_FAIL


def cmd_scale(cfg: RunConfig) -> int:
    from .exactmath import pow_bounds
    rows = []
    for k in cfg.sizes:
        if k <= 0:
            raise ValueError("grid sizes must be positive")
        g = fixtures.grid_graph(k)
        tree = _build_tree(cfg, g)
        system, ledger = formulations.recursive_ef(g, tree)
        blo, bhi = ledger.bound_interval(cfg.d)
        alo, ahi = ledger.leaf_allowance_interval(cfg.d)
        bound = f"{float(bhi + ahi):.1f}"
        # display-only ratio column (reported, never asserted)
        plo, _ = pow_bounds(Fraction(1), g.n, 1 + cfg.beta, 30)
        ratio = f"{float(Fraction(system.size()) / plo):.3f}" if g.n > 1 else "0"
        rows.append((g.n, system.size(), bound, ratio))
    lines = ["n size bound size/n^(1+beta)"]
    for n, size, bound, ratio in rows:
        lines.append(f"{n} {size} {bound} {ratio}")
    table = "\n".join(lines) + "\n"
    Path(f"{cfg.out}.table").write_text(f"# seed={cfg.seed}\n" + table)
    print(table, end="")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forestef",
        description="forest-polytope extended formulations via separator trees")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, graph=True):
        if graph:
            p.add_argument("graph", help="graph file (header 'n m', edge lines)")
        p.add_argument("--c", type=_frac, default=Fraction(4))
        p.add_argument("--beta", type=_frac, default=Fraction(1, 2))
        p.add_argument("--d", type=_frac, default=Fraction(2))
        p.add_argument("--leaf", type=int, default=None,
                       help="leaf threshold (default max(ceil(c), 2))")
        p.add_argument("--sep-mode", choices=("exact", "heuristic", "file"),
                       default="heuristic")
        p.add_argument("--tree", default=None, help="tree file for --sep-mode file")
        p.add_argument("--trials", type=int, default=200)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="out")

    p = sub.add_parser("build", help="write the recursive EF, tree and ledger")
    common(p)
    p = sub.add_parser("verify", help="verify an EF against the greedy oracle")
    common(p)
    p.add_argument("--system", default=None,
                   help="EF file to verify (default: rebuild from the graph)")
    p = sub.add_parser("protocol", help="exhaustive protocol sweeps")
    common(p)
    p.add_argument("--protocol", choices=("classical", "separator", "williams"),
                   default="classical")
    p.add_argument("--rotation", default=None, help="rotation file for williams")
    p.add_argument("--scope", choices=("facet", "bridgeless"), default="facet",
                   help="williams subset scope; the dual identity is only "
                        "guaranteed when the induced subgraph has no bridge")
    p = sub.add_parser("scale", help="grid size table against the tracked bound")
    common(p, graph=False)
    p.add_argument("--sizes", default="2,3,4,5,6,7,8",
                   help="comma-separated grid side lengths")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        command=args.command,
        graph_path=getattr(args, "graph", None),
        tree_path=getattr(args, "tree", None),
        rotation_path=getattr(args, "rotation", None),
        system_path=getattr(args, "system", None),
        c=args.c, beta=args.beta, d=args.d,
        leaf_threshold=args.leaf,
        sep_mode=args.sep_mode,
        protocol=getattr(args, "protocol", "classical"),
        scope=getattr(args, "scope", "facet"),
        trials=args.trials, seed=args.seed, out=args.out,
        sizes=tuple(int(tok) for tok in getattr(args, "sizes", "").split(",") if tok),
    )
    cfg.validate()
    return cfg


COMMANDS = {
    "build": cmd_build,
    "verify": cmd_verify,
    "protocol": cmd_protocol,
    "scale": cmd_scale,
}


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except (ValueError, GraphError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
