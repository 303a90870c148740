"""Exact-expectation simulation of the two randomized slack protocols.

Alice holds a vertex subset U (a row of the slack matrix), Bob holds a
forest F (a column).  Both protocols end with Bob sampling an arc of a
spanning tree of the apex-extended graph uniformly at random and Alice
outputting either 0 or the number of arcs; the runs here enumerate that
randomness exhaustively, so the expectation is an exact rational and must
equal the slack |U| - 1 - |E(F) ∩ E(U)| entry for entry.

The separator-tree variant first walks the tree: as long as U avoids the
current separator, U lies entirely inside one child (U induces a connected
subgraph), and one routing bit names it.  The walk stops at a separator
hit or at a leaf, and the classical finish runs on that small host, which
is where the bit savings come from.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .exactmath import ceil_log2_fraction, ceil_log2_power
from .exactlp import Report
from .graphs import (Graph, GraphError, apex_completion, bits,
                     connected_vertex_subsets, edges_within,
                     enumerate_forests, induced_subgraph,
                     is_connected_subset, slack_value)
from .separators import SeparatorTree, SeparatorTreeNode

ZERO = Fraction(0)

#: additive constant realizing the unquantified O(1) slack in the paper's
#: bit counts; fixed-width encodings plus the stop signal fit within 2.
KAPPA = 2


@dataclass(frozen=True)
class ProtocolRun:
    """Exhaustive enumeration of one protocol execution's randomness."""
    outcomes: tuple[tuple[Fraction, int, Fraction], ...]
    expectation: Fraction
    max_bits: int


@dataclass(frozen=True)
class BitBudget:
    """Measured message sizes of one separator-protocol run.

    bound_value is the instance bound (t-1) + ceil(log2(c n**beta)) +
    ceil(log2((d+1) n / 2**(t-1))) + kappa, computed with exact integer
    comparisons (never floats).
    """
    alice_vertex_bits: int
    bob_arc_bits: int
    routing_bits: int
    bound_value: Fraction

    @property
    def total(self) -> int:
        return self.alice_vertex_bits + self.bob_arc_bits + self.routing_bits


def make_run(outcomes: list[tuple[Fraction, int, Fraction]]) -> ProtocolRun:
    mass = sum((p for p, _, _ in outcomes), ZERO)
    if mass != 1:
        raise AssertionError(f"outcome probabilities sum to {mass}, not 1")
    if any(out < 0 for _, _, out in outcomes):
        raise AssertionError("protocol produced a negative output")
    exp = sum((p * out for p, _, out in outcomes), ZERO)
    return ProtocolRun(tuple(outcomes), exp, max(b for _, b, _ in outcomes))


@lru_cache(maxsize=1 << 18)
def _rooted_tree_arcs(g: Graph, fmask: int, root: int) -> tuple[tuple[int, int], ...]:
    """Arcs of the apex-completed spanning tree of G+, oriented away from root.

    The apex has index g.n and joins the smallest vertex of each component
    of the forest, the completion shared with the witness construction.
    Cached: sweeps reuse the same (forest, root) pair across many subsets.
    """
    apex = g.n
    adj: dict[int, list[int]] = {v: [] for v in range(g.n + 1)}
    for i in bits(fmask):
        u, v = g.edges[i]
        adj[u].append(v)
        adj[v].append(u)
    for t in apex_completion(g, fmask):
        adj[apex].append(t)
        adj[t].append(apex)
    arcs = []
    seen = {root}
    stack = [root]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                arcs.append((v, w))
                stack.append(w)
    if len(seen) != g.n + 1:
        raise GraphError("completion did not span the apex-extended graph")
    return tuple(sorted(arcs))


def _classical_outcomes(g: Graph, umask: int, fmask: int,
                        alice_vertex: int) -> tuple[list[tuple[Fraction, Fraction]], int]:
    """Outcome list (probability, output) of the classical finish, plus the
    fixed-width arc-message bit count over the arcs of G+."""
    arcs = _rooted_tree_arcs(g, fmask, alice_vertex)
    n_arcs = len(arcs)
    payout = Fraction(n_arcs)  # |V(G+)| - 1
    prob = Fraction(1, n_arcs)
    outcomes = []
    for tail, head in arcs:
        hit = head < g.n and (umask >> head) & 1 and \
            not (tail < g.n and (umask >> tail) & 1)
        outcomes.append((prob, payout if hit else ZERO))
    arc_universe = 2 * (g.m + g.n)  # arcs of G+, both orientations
    return outcomes, ceil_log2_fraction(Fraction(arc_universe))


def classical_protocol(g: Graph, umask: int, fmask: int,
                       alice_vertex: Optional[int] = None) -> ProtocolRun:
    """The one-shot protocol: Alice names a vertex of U, Bob roots his
    apex-completed tree there and samples one of its arcs uniformly;
    Alice pays the arc count exactly when the arc enters U from outside.

    U may equal V(g) (needed when running on a dual graph), in which case
    every expectation is 0.  Deterministic choices: Alice sends the
    minimum-index vertex unless alice_vertex overrides it.
    """
    if umask == 0 or umask & ~g.full_vertex_mask():
        raise GraphError("U must be a non-empty vertex subset")
    if alice_vertex is None:
        alice_vertex = (umask & -umask).bit_length() - 1
    elif not (umask >> alice_vertex) & 1:
        raise GraphError("Alice's vertex must belong to U")
    outcomes, arc_bits = _classical_outcomes(g, umask, fmask, alice_vertex)
    vertex_bits = ceil_log2_fraction(Fraction(max(g.n, 1)))
    bits_used = vertex_bits + arc_bits
    return make_run([(p, bits_used, out) for p, out in outcomes])


def max_host_density(g: Graph, tree: SeparatorTree) -> Fraction:
    """Largest edges/vertices ratio over the tree's non-empty hosts."""
    best = ZERO
    for node in tree.nodes():
        nv = node.host.bit_count()
        if nv == 0:
            continue
        ne = edges_within(g, node.host).bit_count()
        best = max(best, Fraction(ne, nv))
    return best


def separator_protocol(g: Graph, tree: SeparatorTree, umask: int, fmask: int,
                       d: Optional[Fraction] = None,
                       pick: str = "min") -> tuple[ProtocolRun, BitBudget]:
    """Separator-tree protocol: route to the deepest host containing U,
    then finish classically there.

    Requires g[U] connected (otherwise U need not stay inside one child).
    Routing costs one bit per descent plus a stop signal; Alice's vertex
    is addressed inside the final separator (or inside a leaf host), and
    Bob's arc inside the final host's apex-extended arc set.  pick picks
    Alice's vertex among the eligible ones (min or max index), which must
    not change the expectation.
    """
    if umask == 0 or umask == g.full_vertex_mask() or umask & ~g.full_vertex_mask():
        raise GraphError("U must be a non-empty proper vertex subset")
    if not is_connected_subset(g, umask):
        raise GraphError("g[U] must be connected")
    if tree.root.host != g.full_vertex_mask():
        raise GraphError("tree does not match the graph")
    if d is None:
        d = max_host_density(g, tree)
    choose = (lambda m: (m & -m).bit_length() - 1) if pick == "min" \
        else (lambda m: m.bit_length() - 1)

    node = tree.root
    t = 0
    while True:
        if umask & ~node.host:
            raise GraphError("U escaped the separator tree (tree/graph mismatch)")
        if umask & node.sep or node.is_leaf:
            break
        if umask & ~(node.left.host | node.right.host):
            raise GraphError("U not contained in a child (tree/graph mismatch)")
        node = node.left if umask & node.left.host == umask else node.right
        if umask & ~node.host:
            raise GraphError("U split across children (tree/graph mismatch)")
        t += 1

    routing_bits = t + 1  # one bit per descent plus the stop signal
    if umask & node.sep:
        alice_global = choose(umask & node.sep)
        vertex_universe = node.sep.bit_count()
    else:
        alice_global = choose(umask)
        vertex_universe = node.host.bit_count()
    vertex_bits = ceil_log2_fraction(Fraction(max(vertex_universe, 1)))

    piece = induced_subgraph(g, node.host)
    down = {v: i for i, v in enumerate(piece.vertex_map)}
    u_local = 0
    for v in bits(umask):
        u_local |= 1 << down[v]
    f_local = 0
    for j, e in enumerate(piece.edge_map):
        if (fmask >> e) & 1:
            f_local |= 1 << j
    outcomes, arc_bits = _classical_outcomes(piece.graph, u_local, f_local,
                                             down[alice_global])
    bits_used = routing_bits + vertex_bits + arc_bits
    run = make_run([(p, bits_used, out) for p, out in outcomes])
    bound = Fraction(t - 1) \
        + ceil_log2_power(tree.c, g.n, tree.beta) \
        + ceil_log2_fraction((d + 1) * g.n / Fraction(2) ** (t - 1)) \
        + KAPPA
    budget = BitBudget(vertex_bits, arc_bits, routing_bits, bound)
    return run, budget


def classical_bits_bound(g: Graph) -> int:
    """ceil(log2 n) + ceil(log2 2(|E|+|V|)), the classical message budget."""
    return ceil_log2_fraction(Fraction(max(g.n, 1))) \
        + ceil_log2_fraction(Fraction(2 * (g.m + g.n)))


def protocol_sweep(g: Graph, tree: Optional[SeparatorTree] = None,
                   d: Optional[Fraction] = None, verbose: bool = True) -> Report:
    """Exhaustive expectation-equals-slack check over all (U, F) pairs.

    Without a tree: the classical protocol over every non-empty proper U.
    With a tree: the separator protocol over every connected proper U,
    also asserting the per-run bit budget and the pick-invariance of the
    expectation.  One report line per pair (failures only when quiet).
    """
    rep = Report(verbose=verbose)
    forests = enumerate_forests(g)

    def line(kind, umask, fmask, run, slack):
        return (f"{kind} {umask:x} {fmask:x} "
                f"exp={run.expectation.numerator}/{run.expectation.denominator} "
                f"slack={slack.numerator}/{slack.denominator} bits={run.max_bits}")

    if tree is None:
        rep.info(f"classical-sweep n={g.n} m={g.m} pairs="
                 f"{(2 ** g.n - 2) * len(forests)}")
        max_bits = 0
        for umask in range(1, g.full_vertex_mask()):
            for fmask in forests:
                run = classical_protocol(g, umask, fmask)
                slack = slack_value(g, umask, fmask)
                if run.max_bits > max_bits:
                    max_bits = run.max_bits
                rep.check_lazy(run.expectation == slack,
                               lambda: line("classical", umask, fmask, run, slack))
        bound = classical_bits_bound(g)
        rep.info(f"max-bits {max_bits} classical-bound {bound}")
        rep.check(max_bits <= bound + KAPPA, "classical-bits",
                  f"max={max_bits} bound={bound}+{KAPPA}")
        return rep
    if d is None:
        d = max_host_density(g, tree)
    subsets = connected_vertex_subsets(g, include_full=False)
    rep.info(f"separator-sweep n={g.n} m={g.m} d={d} pairs={len(subsets) * len(forests)}")
    max_bits = 0
    budget_ok = True
    for umask in subsets:
        for fmask in forests:
            run, budget = separator_protocol(g, tree, umask, fmask, d=d)
            slack = slack_value(g, umask, fmask)
            if run.max_bits > max_bits:
                max_bits = run.max_bits
            run_hi, _ = separator_protocol(g, tree, umask, fmask, d=d, pick="max")
            ok = run.expectation == slack and run_hi.expectation == slack
            if budget.total > budget.bound_value:
                budget_ok = False
                ok = False
            rep.check_lazy(ok, lambda: line("separator", umask, fmask, run, slack))
    rep.info(f"max-bits {max_bits}")
    rep.check(budget_ok, "separator-bits", "per-run budgets")
    return rep
