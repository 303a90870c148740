"""Balanced separators, the pathwidth-sweep halving step, and separator trees.

A separator of a graph splits the remaining vertices into two groups with
no crossing edge; balance bounds the larger group.  The halving routine
turns any alpha-balanced oracle into a 1/2-balanced separator by building
a bag sequence (a path decomposition), normalising it so consecutive bags
differ by at most one vertex each way, and sweeping to the first index
where the two outer parts have near-equal size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .exactmath import pow_leq
from .graphs import (Graph, GraphError, bits, connected_components,
                     edges_within, induced_subgraph)

EXACT_SEARCH_CAP = 14


class SeparatorError(ValueError):
    """No valid separator found, or an oracle broke its contract."""


@dataclass(frozen=True)
class SeparatorResult:
    x: int        # separator vertex mask
    part_a: int   # side containing the smallest vertex outside x (may be 0)
    part_b: int


SeparatorOracle = Callable[[Graph, Fraction], SeparatorResult]


def validate_separator(g: Graph, sep: SeparatorResult, alpha: Fraction,
                       ceiling: bool = False) -> None:
    """Assert the partition, no-crossing-edge and balance conditions.

    With ceiling=True the balance bound is ceil(alpha * n) instead of the
    exact rational alpha * n (used for separator-tree nodes of odd size).
    """
    full = g.full_vertex_mask()
    if sep.x | sep.part_a | sep.part_b != full:
        raise SeparatorError("parts do not cover the vertex set")
    if sep.x & sep.part_a or sep.x & sep.part_b or sep.part_a & sep.part_b:
        raise SeparatorError("parts overlap")
    for u, v in g.edges:
        au = (sep.part_a >> u) & 1
        av = (sep.part_a >> v) & 1
        bu = (sep.part_b >> u) & 1
        bv = (sep.part_b >> v) & 1
        if (au and bv) or (bu and av):
            raise SeparatorError(f"edge ({u},{v}) crosses the separator")
    bound = alpha * g.n
    if ceiling:
        bound = Fraction(-(-bound.numerator // bound.denominator))
    biggest = max(sep.part_a.bit_count(), sep.part_b.bit_count())
    if Fraction(biggest) > bound:
        raise SeparatorError(f"side of size {biggest} exceeds balance bound {bound}")


def _two_side_split(g: Graph, xmask: int, alpha: Fraction) -> Optional[tuple[int, int]]:
    """Pack the components of g - X into two sides of size <= alpha*n each.

    Returns (part_a, part_b) with part_a holding the smallest vertex not in
    X, or None if no packing exists.  Deterministic: among feasible
    packings, part_a is lexicographically smallest as a bitmask.
    """
    rest = g.full_vertex_mask() & ~xmask
    limit_num = (alpha * g.n).numerator
    limit_den = (alpha * g.n).denominator
    comps = connected_components(g, rest) if rest else []

    def fits(size: int) -> bool:
        return size * limit_den <= limit_num

    if not comps:
        return (0, 0)
    anchor = comps[0]  # component holding the smallest remaining vertex
    others = comps[1:]
    total = rest.bit_count()
    best = None
    for assign in range(1 << len(others)):
        a = anchor
        for i in range(len(others)):
            if (assign >> i) & 1:
                a |= others[i]
        asize = a.bit_count()
        if not fits(asize) or not fits(total - asize):
            continue
        if best is None or a < best:
            best = a
    if best is None:
        return None
    return (best, rest & ~best)


def find_separator_exact(g: Graph, alpha: Fraction,
                         cap: int = EXACT_SEARCH_CAP) -> SeparatorResult:
    """Minimum-cardinality alpha-balanced separator, lexicographically smallest.

    Exhaustive over vertex subsets by increasing size, so only usable for
    small graphs (default cap 14 vertices).
    """
    if not (0 < alpha < 1):
        raise SeparatorError("alpha must lie strictly between 0 and 1")
    if g.n == 0:
        raise GraphError("empty graph")
    if g.n > cap:
        raise SeparatorError(f"{g.n} vertices exceeds exact-search cap {cap}")
    from itertools import combinations
    for size in range(g.n + 1):
        for combo in combinations(range(g.n), size):
            xmask = 0
            for v in combo:
                xmask |= 1 << v
            split = _two_side_split(g, xmask, alpha)
            if split is not None:
                res = SeparatorResult(xmask, split[0], split[1])
                validate_separator(g, res, alpha)
                return res
    raise SeparatorError(f"no {alpha}-balanced separator exists")


def find_separator_heuristic(g: Graph, alpha: Fraction,
                             exact_cap: int = EXACT_SEARCH_CAP) -> SeparatorResult:
    """BFS-level cut: try every root, take the smallest level that splits.

    Candidates are the empty set and each BFS level of each root; the
    smallest valid candidate wins (ties: first root, then first level).
    Falls back to the exact search below the cap.
    """
    if not (0 < alpha < 1):
        raise SeparatorError("alpha must lie strictly between 0 and 1")
    if g.n == 0:
        raise GraphError("empty graph")
    from .graphs import adjacency_masks
    adj = adjacency_masks(g)
    best: Optional[SeparatorResult] = None

    def consider(xmask: int):
        nonlocal best
        if best is not None and xmask.bit_count() >= best.x.bit_count():
            return
        split = _two_side_split(g, xmask, alpha)
        if split is not None:
            best = SeparatorResult(xmask, split[0], split[1])

    consider(0)
    for root in range(g.n):
        level = 1 << root
        seen = level
        while level:
            consider(level)
            nxt = 0
            for v in bits(level):
                nxt |= adj[v]
            level = nxt & ~seen
            seen |= level
    if best is None and g.n <= exact_cap:
        try:
            best = find_separator_exact(g, alpha, exact_cap)
        except SeparatorError:
            best = None
    if best is None:
        raise SeparatorError("heuristic found no valid separator")
    validate_separator(g, best, alpha)
    return best


def _oracle_on_sub(g: Graph, vmask: int, alpha: Fraction,
                   oracle: SeparatorOracle) -> tuple[int, int, int]:
    """Run the oracle on g[vmask]; return (x, side_a, side_b) in g coordinates."""
    piece = induced_subgraph(g, vmask)
    res = oracle(piece.graph, alpha)
    validate_separator(piece.graph, res, alpha)
    vm = piece.vertex_map

    def up(mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= 1 << vm[i]
        return out

    return up(res.x), up(res.part_a), up(res.part_b)


def bag_sequence(g: Graph, alpha: Fraction, oracle: SeparatorOracle) -> list[int]:
    """Raw path-decomposition bags from the recursive separator construction.

    Each recursion level prepends its separator to every bag coming from
    the two sides; a single vertex yields the one-bag sequence [itself].
    """
    def rec(vmask: int) -> list[int]:
        size = vmask.bit_count()
        if size == 0:
            return []
        if size == 1:
            return [vmask]
        x, sa, sb = _oracle_on_sub(g, vmask, alpha, oracle)
        left = rec(sa)
        right = rec(sb)
        merged = [b | x for b in left] + [b | x for b in right]
        if not merged:
            merged = [x]
        return merged

    return rec(g.full_vertex_mask())


def normalize_bags(bags: list[int]) -> list[int]:
    """Insert intermediate bags until consecutive bags differ by <= 1 vertex
    each way (property (5)); properties (1)-(3) are preserved."""
    seq = list(bags)
    i = 0
    while i < len(seq) - 1:
        b, c = seq[i], seq[i + 1]
        gone = b & ~c
        new = c & ~b
        if gone.bit_count() > 1:
            v = (gone & -gone)  # smallest departing vertex
            seq.insert(i + 1, b & ~v)
            i += 1
            continue
        if new.bit_count() > 1:
            v = (new & -new)  # smallest arriving vertex
            seq.insert(i + 1, c & ~v)
            continue
        i += 1
    return seq


def validate_bag_sequence(g: Graph, bags: list[int], max_bag: int | None = None,
                          normalized: bool = True) -> None:
    """Check the path-decomposition properties of a bag sequence.

    (1) bags cover the vertices, (2) interval property, (3) every edge
    inside some bag, (5) consecutive bags differ by at most one vertex
    each way (only when normalized=True).  Optionally bound bag sizes.
    """
    if any(b == 0 for b in bags):
        raise SeparatorError("empty bag")
    cover = 0
    for b in bags:
        cover |= b
    if cover != g.full_vertex_mask():
        raise SeparatorError("bags do not cover the vertex set")
    suffix = [0] * (len(bags) + 1)
    for i in range(len(bags) - 1, -1, -1):
        suffix[i] = suffix[i + 1] | bags[i]
    seen = 0
    for i, b in enumerate(bags):
        back = (seen & suffix[i + 1]) & ~b
        if back:
            raise SeparatorError(f"interval property violated at bag {i}")
        seen |= b
    for u, v in g.edges:
        em = (1 << u) | (1 << v)
        if not any(b & em == em for b in bags):
            raise SeparatorError(f"edge ({u},{v}) not inside any bag")
    if normalized:
        for i in range(len(bags) - 1):
            if (bags[i] & ~bags[i + 1]).bit_count() > 1 or \
               (bags[i + 1] & ~bags[i]).bit_count() > 1:
                raise SeparatorError(f"bags {i},{i + 1} differ by more than one vertex")
    if max_bag is not None:
        for b in bags:
            if b.bit_count() > max_bag:
                raise SeparatorError(f"bag of size {b.bit_count()} exceeds {max_bag}")


def halve_separator(g: Graph, alpha: Fraction,
                    oracle: SeparatorOracle) -> SeparatorResult:
    """Convert an alpha-balanced oracle into a 1/2-balanced separator.

    Builds the bag sequence, normalises it, then sweeps: with
    X_i = union of earlier-only vertices and Y_i = union of later-only
    vertices, |X_i| is non-decreasing and |Y_i| non-increasing by single
    steps, so some index has ||X_i| - |Y_i|| <= 1; that bag is the
    separator and both sides have at most floor(n/2) vertices.
    """
    if g.n == 0:
        raise GraphError("empty graph")
    bags = normalize_bags(bag_sequence(g, alpha, oracle))
    n = len(bags)
    prefix = [0] * (n + 1)
    for i in range(n):
        prefix[i + 1] = prefix[i] | bags[i]
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] | bags[i]
    for i in range(n):
        xi = prefix[i] & ~bags[i]
        yi = suffix[i + 1] & ~bags[i]
        if abs(xi.bit_count() - yi.bit_count()) <= 1:
            part_a, part_b = xi, yi
            outside = g.full_vertex_mask() & ~bags[i]
            if outside:
                low = outside & -outside
                if not part_a & low:
                    part_a, part_b = part_b, part_a
            res = SeparatorResult(bags[i], part_a, part_b)
            validate_separator(g, res, Fraction(1, 2))
            if max(part_a.bit_count(), part_b.bit_count()) > g.n // 2:
                raise SeparatorError("sweep produced a side above floor(n/2)")
            return res
    raise SeparatorError("no balanced index found in the bag sweep")


@dataclass
class SeparatorTreeNode:
    host: int                 # vertex mask over the root graph
    sep: int                  # separator mask, subset of host (empty at leaves)
    left: Optional["SeparatorTreeNode"] = None
    right: Optional["SeparatorTreeNode"] = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None and self.right is None


@dataclass
class SeparatorTree:
    """Binary decomposition: every internal node splits its host in half
    with a separator of size at most c * host_size**beta."""
    root: SeparatorTreeNode
    c: Fraction
    beta: Fraction
    leaf_threshold: int

    def nodes(self) -> list[SeparatorTreeNode]:
        out = []

        def walk(node):
            out.append(node)
            if not node.is_leaf:
                walk(node.left)
                walk(node.right)

        walk(self.root)
        return out

    def to_text(self) -> str:
        lines = []
        for node in self.nodes():
            kind = "leaf" if node.is_leaf else "internal"
            lines.append(f"host={node.host:x} sep={node.sep:x} {kind}")
        return "\n".join(lines) + "\n"

    def validate(self, g: Graph) -> list[tuple[int, int, int]]:
        """Check every invariant; return (host size, sep size, max side) per node."""
        if self.root.host != g.full_vertex_mask():
            raise SeparatorError("root host is not the full vertex set")
        report = []

        def walk(node):
            hsize = node.host.bit_count()
            if node.sep & ~node.host:
                raise SeparatorError("separator leaves its host")
            if node.is_leaf:
                if hsize > self.leaf_threshold:
                    raise SeparatorError("leaf host above the leaf threshold")
                report.append((hsize, node.sep.bit_count(), 0))
                return
            if hsize <= self.leaf_threshold:
                raise SeparatorError("internal node at or below the leaf threshold")
            if not pow_leq(node.sep.bit_count(), self.c, hsize, self.beta):
                raise SeparatorError(
                    f"separator of size {node.sep.bit_count()} too large for host "
                    f"of size {hsize} under (c={self.c}, beta={self.beta})")
            a, b = node.left.host, node.right.host
            if a & b or (a | b) != node.host & ~node.sep:
                raise SeparatorError("children do not partition host minus separator")
            rest = node.host & ~node.sep
            sub = SeparatorResult(node.sep,
                                  a if (rest == 0 or a & (rest & -rest)) else b,
                                  b if (rest == 0 or a & (rest & -rest)) else a)
            piece = induced_subgraph(g, node.host)
            down = {v: i for i, v in enumerate(piece.vertex_map)}

            def to_local(mask):
                out = 0
                for v in bits(mask):
                    out |= 1 << down[v]
                return out

            local = SeparatorResult(to_local(sub.x), to_local(sub.part_a),
                                    to_local(sub.part_b))
            validate_separator(piece.graph, local, Fraction(1, 2), ceiling=True)
            report.append((hsize, node.sep.bit_count(),
                           max(a.bit_count(), b.bit_count())))
            walk(node.left)
            walk(node.right)

        walk(self.root)
        return report


def default_leaf_threshold(c: Fraction) -> int:
    return max(-(-c.numerator // c.denominator), 2)


def build_separator_tree(g: Graph, c: Fraction, beta: Fraction,
                         leaf_threshold: int | None = None,
                         oracle: SeparatorOracle | None = None) -> SeparatorTree:
    """Recursive (c, beta)-balanced separator tree.

    The oracle must return 1/2-balanced separators; each internal node
    checks the size bound |Y| <= c * |host|**beta exactly (beta rational,
    so the comparison clears the root by raising to a power).  The side
    containing the smallest vertex becomes the left child.
    """
    if not (0 < beta < 1):
        raise SeparatorError("beta must lie strictly between 0 and 1")
    if c <= 0:
        raise SeparatorError("c must be positive")
    if leaf_threshold is None:
        leaf_threshold = default_leaf_threshold(c)
    if leaf_threshold < 1:
        raise SeparatorError("leaf threshold must be at least 1")
    if oracle is None:
        oracle = find_separator_heuristic
    half = Fraction(1, 2)

    def rec(vmask: int) -> SeparatorTreeNode:
        size = vmask.bit_count()
        if size <= leaf_threshold:
            return SeparatorTreeNode(vmask, 0)
        x, sa, sb = _oracle_on_sub(g, vmask, half, oracle)
        if not pow_leq(x.bit_count(), c, size, beta):
            raise SeparatorError(
                f"oracle separator of size {x.bit_count()} breaks the "
                f"(c={c}, beta={beta}) bound on a host of size {size} "
                f"(host mask {vmask:x})")
        rest = vmask & ~x
        if rest:
            low = rest & -rest
            if not sa & low:
                sa, sb = sb, sa
        node = SeparatorTreeNode(vmask, x)
        node.left = rec(sa)
        node.right = rec(sb)
        return node

    tree = SeparatorTree(rec(g.full_vertex_mask()), c, beta, leaf_threshold)
    tree.validate(g)
    return tree


def separator_tree_from_text(text: str, g: Graph, c: Fraction, beta: Fraction,
                             leaf_threshold: int) -> SeparatorTree:
    """Parse the preorder one-node-per-line format and validate against g."""
    entries = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3 or not parts[0].startswith("host=") \
                or not parts[1].startswith("sep="):
            raise SeparatorError(f"malformed tree line {line!r}")
        host = int(parts[0][5:], 16)
        sep = int(parts[1][4:], 16)
        if parts[2] not in ("leaf", "internal"):
            raise SeparatorError(f"malformed tree line {line!r}")
        entries.append((host, sep, parts[2] == "leaf"))
    pos = 0

    def build() -> SeparatorTreeNode:
        nonlocal pos
        if pos >= len(entries):
            raise SeparatorError("truncated tree file")
        host, sep, leaf = entries[pos]
        pos += 1
        node = SeparatorTreeNode(host, sep)
        if not leaf:
            node.left = build()
            node.right = build()
        return node

    root = build()
    if pos != len(entries):
        raise SeparatorError("trailing lines in tree file")
    tree = SeparatorTree(root, c, beta, leaf_threshold)
    tree.validate(g)
    return tree
