"""Linear descriptions and extended formulations of the forest polytope.

A LinearSystem holds one original variable per edge of a host graph plus
tagged auxiliary variables; its size counts inequalities only (equalities
are free).  Systems produced here come in three flavours:

  * the subset-rank description (nonnegativity plus x(E(U)) <= |U|-1),
  * the single-root flow-style description Q used to delete one vertex
    at a time (size exactly 2(|E|+|V|)),
  * the recursive composition over a separator tree, which stacks Q
    systems for the separator vertices and recurses into the two sides.

Every aux-carrying system knows how to produce a feasible witness for the
characteristic vector of any forest, so verification can check all
polytope vertices pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .exactmath import pow_bounds, pow2_bounds
from .graphs import (Graph, GraphError, apex_completion, bits,
                     connected_vertex_subsets, edges_within,
                     induced_subgraph)
from .separators import SeparatorTree

ZERO = Fraction(0)
ONE = Fraction(1)

WitnessFn = Callable[[int], dict[int, Fraction]]


@dataclass
class LinearSystem:
    """Ax <= b rows plus Cx = d rows over edge variables and tagged aux vars.

    Variables are integers: 0..num_orig-1 are the host's edge variables,
    num_orig.. are auxiliary.  Rows map variable -> coefficient.
    """
    num_orig: int
    orig_tags: list[str]
    aux_tags: list[str] = field(default_factory=list)
    ineqs: list[tuple[dict[int, Fraction], Fraction]] = field(default_factory=list)
    eqs: list[tuple[dict[int, Fraction], Fraction]] = field(default_factory=list)
    witness_fns: list[WitnessFn] = field(default_factory=list)
    witness_complete: bool = True

    def size(self) -> int:
        return len(self.ineqs)

    @property
    def num_vars(self) -> int:
        return self.num_orig + len(self.aux_tags)

    def add_aux(self, tag: str) -> int:
        self.aux_tags.append(tag)
        return self.num_orig + len(self.aux_tags) - 1

    def add_ineq(self, coeffs: dict[int, Fraction], rhs: Fraction) -> None:
        self.ineqs.append((coeffs, rhs))

    def add_eq(self, coeffs: dict[int, Fraction], rhs: Fraction) -> None:
        self.eqs.append((coeffs, rhs))

    def check_rows(self) -> None:
        for coeffs, _ in self.ineqs + self.eqs:
            for v in coeffs:
                if not 0 <= v < self.num_vars:
                    raise ValueError(f"row references unknown variable {v}")

    def point_violation(self, point: dict[int, Fraction]) -> Optional[str]:
        """First violated row for a full assignment, or None."""
        for kind, rows in (("INEQ", self.ineqs), ("EQ", self.eqs)):
            for idx, (coeffs, rhs) in enumerate(rows):
                lhs = sum((c * point.get(v, ZERO) for v, c in coeffs.items()), ZERO)
                if kind == "INEQ" and lhs > rhs:
                    return f"INEQ {idx}: {lhs} > {rhs}"
                if kind == "EQ" and lhs != rhs:
                    return f"EQ {idx}: {lhs} != {rhs}"
        return None

    def witness_point(self, fmask: int) -> dict[int, Fraction]:
        """Characteristic vector of a forest extended by the aux witnesses."""
        point = {e: (ONE if (fmask >> e) & 1 else ZERO) for e in range(self.num_orig)}
        for fn in self.witness_fns:
            point.update(fn(fmask))
        return point

    def to_text(self) -> str:
        lines = [f"vars {self.num_vars} orig {self.num_orig}"]
        for i in range(self.num_orig):
            lines.append(f"v{i} {self.orig_tags[i]}")
        for j, tag in enumerate(self.aux_tags):
            lines.append(f"v{self.num_orig + j} {tag}")
        for coeffs, rhs in self.ineqs:
            terms = " ".join(f"{v}:{c.numerator}/{c.denominator}"
                             for v, c in sorted(coeffs.items()))
            lines.append(f"INEQ {rhs.numerator}/{rhs.denominator} {terms}".rstrip())
        for coeffs, rhs in self.eqs:
            terms = " ".join(f"{v}:{c.numerator}/{c.denominator}"
                             for v, c in sorted(coeffs.items()))
            lines.append(f"EQ {rhs.numerator}/{rhs.denominator} {terms}".rstrip())
        return "\n".join(lines) + "\n"


def parse_linear_system(text: str) -> LinearSystem:
    """Parse the text format; the result carries no witness functions."""
    lines = [ln.strip() for ln in text.splitlines()
             if ln.strip() and not ln.strip().startswith("#")]
    if not lines:
        raise ValueError("empty system file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "vars" or head[2] != "orig":
        raise ValueError(f"malformed header {lines[0]!r}")
    num_vars, num_orig = int(head[1]), int(head[3])
    tags = {}
    rows = []
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0].startswith("v") and parts[0][1:].isdigit():
            tags[int(parts[0][1:])] = parts[1] if len(parts) > 1 else ""
        elif parts[0] in ("INEQ", "EQ"):
            rows.append(parts)
        else:
            raise ValueError(f"malformed line {ln!r}")
    if len(tags) != num_vars:
        raise ValueError("variable table does not match header")
    sys = LinearSystem(num_orig, [tags[i] for i in range(num_orig)],
                       [tags[num_orig + j] for j in range(num_vars - num_orig)],
                       witness_complete=False)

    def frac(tok: str) -> Fraction:
        p, q = tok.split("/")
        return Fraction(int(p), int(q))

    for parts in rows:
        rhs = frac(parts[1])
        coeffs = {}
        for term in parts[2:]:
            v, f = term.split(":", 1)
            coeffs[int(v)] = frac(f)
        if parts[0] == "INEQ":
            sys.add_ineq(coeffs, rhs)
        else:
            sys.add_eq(coeffs, rhs)
    sys.check_rows()
    return sys


def _edge_tag(g: Graph, i: int) -> str:
    u, v = g.edges[i]
    return f"x:e{i}:{u}-{v}"


def empty_system(g: Graph) -> LinearSystem:
    return LinearSystem(g.m, [_edge_tag(g, i) for i in range(g.m)])


def edmonds_system(g: Graph, connected_only: bool = True,
                   include_full: bool = True, cap: int = 20) -> LinearSystem:
    """Nonnegativity plus rank rows x(E(U)) <= |U|-1.

    With connected_only, U ranges over subsets inducing connected
    subgraphs (the same polytope with exponentially fewer rows); U = V(G)
    is controlled by include_full and matters: without it the all-ones
    point of a triangle would be feasible.  Rows for |U| < 2 are trivial
    and omitted.
    """
    sys = empty_system(g)
    for e in range(g.m):
        sys.add_ineq({e: Fraction(-1)}, ZERO)
    if g.n == 0:
        return sys
    if connected_only:
        subsets = connected_vertex_subsets(g, include_full, cap)
    else:
        if g.n > cap:
            raise GraphError(f"{g.n} vertices exceeds enumeration cap {cap}")
        full = g.full_vertex_mask()
        subsets = tuple(u for u in range(1, full + 1)
                        if include_full or u != full)
    for umask in subsets:
        k = umask.bit_count()
        if k < 2:
            continue
        coeffs = {e: ONE for e in bits(edges_within(g, umask))}
        sys.add_ineq(coeffs, Fraction(k - 1))
    return sys


def _qsystem_arcs(g: Graph) -> list[tuple[int, int]]:
    """Arcs of G+ (both orientations of every edge, apex vertex = g.n)."""
    apex = g.n
    arcs = []
    for u, v in g.edges:
        arcs.append((u, v))
        arcs.append((v, u))
    for v in range(g.n):
        arcs.append((v, apex))
        arcs.append((apex, v))
    return arcs


def martin_q(g: Graph, r: int, tag_prefix: str = "q") -> LinearSystem:
    """Single-root flow-style description with size exactly 2(|E|+|V|).

    Adds an apex adjacent to every vertex, one aux variable per arc of the
    extended graph, and three equality families: no arc leaves the root's
    parent slot, every edge variable splits into its two orientations, and
    every non-root vertex picks exactly one out-arc.  The inequalities are
    the arc nonnegativities, 2(|E(g)|+|V(g)|) of them.
    """
    if not 0 <= r < g.n:
        raise GraphError(f"root {r} out of range")
    sys = empty_system(g)
    apex = g.n
    arcs = _qsystem_arcs(g)
    arc_var = {}
    for (t, h) in arcs:
        name_t = "+" if t == apex else str(t)
        name_h = "+" if h == apex else str(h)
        arc_var[(t, h)] = sys.add_aux(f"z:{tag_prefix}:{name_t}->{name_h}")
        sys.add_ineq({arc_var[(t, h)]: Fraction(-1)}, ZERO)
    # neighbourhoods in G+
    nbrs = [set() for _ in range(g.n + 1)]
    for u, v in g.edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    for v in range(g.n):
        nbrs[v].add(apex)
        nbrs[apex].add(v)
    for w in sorted(nbrs[r]):
        sys.add_eq({arc_var[(r, w)]: ONE}, ZERO)
    for e, (u, v) in enumerate(g.edges):
        sys.add_eq({e: ONE, arc_var[(u, v)]: Fraction(-1),
                    arc_var[(v, u)]: Fraction(-1)}, ZERO)
    for v in range(g.n + 1):
        if v == r:
            continue
        coeffs = {arc_var[(v, w)]: ONE for w in sorted(nbrs[v])}
        sys.add_eq(coeffs, ONE)

    def witness(fmask: int) -> dict[int, Fraction]:
        z = forest_witness(g, r, fmask)
        out = {var: ZERO for var in arc_var.values()}
        for arc, val in z.items():
            if val:
                out[arc_var[arc]] = ONE
        return out

    sys.witness_fns.append(witness)
    return sys


def forest_witness(g: Graph, r: int, fmask: int) -> dict[tuple[int, int], int]:
    """Parent-indicator values certifying a forest inside the Q description.

    The forest is completed to a spanning tree of G+ by joining the apex
    (index g.n) to the smallest vertex of each component, the tree is
    rooted at r, and z[(v, w)] = 1 exactly when w is the parent of v.
    """
    apex = g.n
    targets = apex_completion(g, fmask)  # raises if not a forest
    adj: dict[int, list[int]] = {v: [] for v in range(g.n + 1)}
    for i in bits(fmask):
        u, v = g.edges[i]
        adj[u].append(v)
        adj[v].append(u)
    for t in targets:
        adj[apex].append(t)
        adj[t].append(apex)
    parent = {r: None}
    stack = [r]
    order = 0
    while stack:
        v = stack.pop()
        for w in sorted(adj[v], reverse=True):
            if w not in parent:
                parent[w] = v
                stack.append(w)
    if len(parent) != g.n + 1:
        raise GraphError("completion did not span G+")
    z = {}
    for v, p in parent.items():
        if p is not None:
            z[(v, p)] = 1
    return z


def product_compose(systems: list[LinearSystem],
                    edge_maps: list[tuple[int, ...]], host: Graph) -> LinearSystem:
    """Cartesian product over components whose edge sets partition the host.

    Rows and aux variables are disjointly unioned with the original
    variables re-indexed into the host; the size is the sum of the sizes.
    """
    if len(systems) != len(edge_maps):
        raise ValueError("one edge map per component required")
    covered = 0
    for sys_i, emap in zip(systems, edge_maps):
        if len(emap) != sys_i.num_orig:
            raise ValueError("edge map length mismatch")
        for e in emap:
            if not 0 <= e < host.m or (covered >> e) & 1:
                raise ValueError("edge maps do not partition the host edges")
            covered |= 1 << e
    if covered != host.full_edge_mask():
        raise ValueError("edge maps do not partition the host edges")
    out = empty_system(host)
    for idx, (sys_i, emap) in enumerate(zip(systems, edge_maps)):
        out.witness_complete &= sys_i.witness_complete
        shift = {}
        for j, tag in enumerate(sys_i.aux_tags):
            shift[sys_i.num_orig + j] = out.add_aux(f"c{idx}.{tag}")

        def remap(coeffs: dict[int, Fraction]) -> dict[int, Fraction]:
            return {(emap[v] if v < sys_i.num_orig else shift[v]): c
                    for v, c in coeffs.items()}

        for coeffs, rhs in sys_i.ineqs:
            out.add_ineq(remap(coeffs), rhs)
        for coeffs, rhs in sys_i.eqs:
            out.add_eq(remap(coeffs), rhs)

        def make_witness(sys_i=sys_i, emap=emap, shift=dict(shift)) -> WitnessFn:
            def fn(fmask: int) -> dict[int, Fraction]:
                local = 0
                for j, e in enumerate(emap):
                    if (fmask >> e) & 1:
                        local |= 1 << j
                vals = {}
                for wfn in sys_i.witness_fns:
                    for v, val in wfn(local).items():
                        vals[shift[v]] = val
                return vals
            return fn

        if sys_i.witness_fns:
            out.witness_fns.append(make_witness())
    out.check_rows()
    return out


def stp_from_fp(sys: LinearSystem, g: Graph) -> LinearSystem:
    """Intersect a forest-polytope system with the tree-cardinality hyperplane.

    Adds the single equality sum(x_e) = |V| - 1; the size is unchanged.
    """
    from .graphs import is_connected
    if not is_connected(g):
        raise GraphError("spanning tree polytope of a disconnected graph")
    if sys.num_orig != g.m:
        raise ValueError("system/graph edge count mismatch")
    out = LinearSystem(sys.num_orig, list(sys.orig_tags), list(sys.aux_tags),
                       [(dict(c), r) for c, r in sys.ineqs],
                       [(dict(c), r) for c, r in sys.eqs],
                       list(sys.witness_fns), sys.witness_complete)
    out.add_eq({e: ONE for e in range(g.m)}, Fraction(g.n - 1))
    return out


@dataclass
class SizeLedger:
    """Per-node inequality accounting for the recursive construction.

    entries hold (node id, label, inequalities added, running total);
    leaf_sizes holds (node id, leaf vertex count, base size).  The closed
    form tracked from the recursion is (3 / (1 - 2**-beta)) * c * d *
    n**(1+beta); its irrational value is handled by certified rational
    enclosures, never floats.
    """
    n: int
    c: Fraction
    beta: Fraction
    entries: list[tuple[int, str, int, int]] = field(default_factory=list)
    leaf_sizes: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.entries[-1][3] if self.entries else 0

    def internal_total(self) -> int:
        leaf_ids = {nid for nid, _, _ in self.leaf_sizes}
        return sum(added for nid, _, added, _ in self.entries if nid not in leaf_ids)

    def leaf_total(self) -> int:
        return sum(size for _, _, size in self.leaf_sizes)

    def bound_interval(self, d: Fraction, digits: int = 30) -> tuple[Fraction, Fraction]:
        """Enclosure of (3/(1-2^-beta)) * c * d * n**(1+beta)."""
        lo2, hi2 = pow2_bounds(-self.beta + 1, digits)  # 2**(1-beta)
        # 3/(1-2^-beta) = 3*2 / (2 - 2**(1-beta))
        denom_lo = 2 - hi2
        denom_hi = 2 - lo2
        if denom_lo <= 0:
            raise ValueError("insufficient precision for the bound denominator")
        coef_lo = Fraction(6) / denom_hi
        coef_hi = Fraction(6) / denom_lo
        plo, phi = pow_bounds(Fraction(1), self.n, 1 + self.beta, digits)
        cd = self.c * d
        return (coef_lo * cd * plo, coef_hi * cd * phi)

    def leaf_allowance_interval(self, d: Fraction, digits: int = 30) -> tuple[Fraction, Fraction]:
        """Enclosure of sum over leaves of 2**(d * leaf size)."""
        lo = hi = ZERO
        for _, leaf_n, _ in self.leaf_sizes:
            l, h = pow2_bounds(d * leaf_n, digits)
            lo += l
            hi += h
        return (lo, hi)

    def check_bound(self, d: Fraction, max_digits: int = 200) -> bool:
        """Certified test: total <= closed-form bound + leaf allowances.

        Refines the enclosures until the comparison is decided; the right
        hand side is irrational for fractional beta, so ties cannot occur.
        """
        total = Fraction(self.total)
        digits = 20
        while digits <= max_digits:
            blo, bhi = self.bound_interval(d, digits)
            alo, ahi = self.leaf_allowance_interval(d, digits)
            if total <= blo + alo:
                return True
            if total > bhi + ahi:
                return False
            digits *= 2
        raise ValueError("bound comparison undecided at maximum precision")

    def to_text(self, d: Fraction | None = None) -> str:
        lines = [f"ledger n={self.n} c={self.c} beta={self.beta}"]
        for nid, label, added, running in self.entries:
            lines.append(f"node {nid} {label} added={added} total={running}")
        if d is not None:
            blo, bhi = self.bound_interval(d)
            alo, ahi = self.leaf_allowance_interval(d)
            ok = self.check_bound(d)
            lines.append(f"closed-form-bound in [{blo}, {bhi}]")
            lines.append(f"leaf-allowance in [{alo}, {ahi}]")
            lines.append(f"within-bound {'yes' if ok else 'no'}")
        return "\n".join(lines) + "\n"


BaseBuilder = Callable[[Graph], LinearSystem]


def recursive_ef(g: Graph, tree: SeparatorTree,
                 base: BaseBuilder | None = None) -> tuple[LinearSystem, SizeLedger]:
    """Assemble the separator-tree extended formulation of the forest polytope.

    At each internal node the separator vertices are deleted one at a time
    in ascending index order; each deletion contributes the Q description
    of the current residual host, rooted at the deleted vertex, with its
    x-variables identified with the host edges still present (edges
    incident to already-deleted vertices are simply absent, which is the
    projection reading of the free factor).  Leaves contribute the base
    description of their induced subgraph (default: connected-subset rank
    rows including U = V).
    """
    if tree.root.host != g.full_vertex_mask():
        raise GraphError("separator tree does not match the graph")
    if base is None:
        base = lambda h: edmonds_system(h, connected_only=True, include_full=True)
    out = empty_system(g)
    ledger = SizeLedger(g.n, tree.c, tree.beta)
    counter = 0

    def lift(sub: LinearSystem, emap: tuple[int, ...], label: str):
        shift = {}
        for j, tag in enumerate(sub.aux_tags):
            shift[sub.num_orig + j] = out.add_aux(f"{label}.{tag}")

        def remap(coeffs):
            return {(emap[v] if v < sub.num_orig else shift[v]): c
                    for v, c in coeffs.items()}

        for coeffs, rhs in sub.ineqs:
            out.add_ineq(remap(coeffs), rhs)
        for coeffs, rhs in sub.eqs:
            out.add_eq(remap(coeffs), rhs)

        def make_witness(sub=sub, emap=emap, shift=dict(shift)) -> WitnessFn:
            def fn(fmask: int) -> dict[int, Fraction]:
                local = 0
                for j, e in enumerate(emap):
                    if (fmask >> e) & 1:
                        local |= 1 << j
                vals = {}
                for wfn in sub.witness_fns:
                    for v, val in wfn(local).items():
                        vals[shift[v]] = val
                return vals
            return fn

        if sub.witness_fns:
            out.witness_fns.append(make_witness())

    def walk(node):
        nonlocal counter
        nid = counter
        counter += 1
        before = out.size()
        if node.is_leaf:
            piece = induced_subgraph(g, node.host)
            sub = base(piece.graph)
            lift(sub, piece.edge_map, f"n{nid}")
            added = out.size() - before
            ledger.entries.append((nid, f"leaf(n={piece.graph.n})", added, out.size()))
            ledger.leaf_sizes.append((nid, piece.graph.n, added))
            return
        residual = node.host
        for step, y in enumerate(bits(node.sep)):
            piece = induced_subgraph(g, residual)
            local_r = piece.vertex_map.index(y)
            sub = martin_q(piece.graph, local_r, tag_prefix=f"n{nid}s{step}")
            lift(sub, piece.edge_map, f"n{nid}s{step}")
            residual &= ~(1 << y)
        added = out.size() - before
        ledger.entries.append((nid,
                               f"internal(host={node.host.bit_count()},"
                               f"sep={node.sep.bit_count()})",
                               added, out.size()))
        walk(node.left)
        walk(node.right)

    walk(tree.root)
    out.check_rows()
    if ledger.total != out.size():
        raise AssertionError("ledger total does not match the system size")
    return out, ledger
