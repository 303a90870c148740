"""Graph representation, parsing, enumeration, blocks and the slack oracle.

Vertex subsets and edge subsets are plain Python integers used as bitsets:
bit i of an edge mask selects edge i of the host graph (edge identity is
positional, so multigraph duals work by index), bit v of a vertex mask
selects vertex v.  All arithmetic that feeds verification is exact; the
only numeric type besides int is fractions.Fraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

EDGE_ENUM_CAP = 24
VERTEX_ENUM_CAP = 20


class GraphError(ValueError):
    """Malformed graph input or precondition violation."""


class CapExceeded(GraphError):
    """An exhaustive enumeration was requested above its configured cap."""


@dataclass(frozen=True)
class Graph:
    """Undirected graph with stable, positional edge indices.

    Simple graphs (multigraph=False) reject loops and parallel edges.
    Multigraphs (used for planar duals and contractions) allow both.
    """
    n: int
    edges: tuple[tuple[int, int], ...]
    multigraph: bool = False

    def __post_init__(self):
        if self.n < 0:
            raise GraphError("negative vertex count")
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u},{v}) out of range for n={self.n}")
            if not self.multigraph:
                if u == v:
                    raise GraphError(f"loop ({u},{v}) in simple graph")
                key = (min(u, v), max(u, v))
                if key in seen:
                    raise GraphError(f"duplicate edge ({u},{v}) in simple graph")
                seen.add(key)

    @property
    def m(self) -> int:
        return len(self.edges)

    def full_vertex_mask(self) -> int:
        return (1 << self.n) - 1

    def full_edge_mask(self) -> int:
        return (1 << self.m) - 1


def make_graph(n, edge_list, multigraph=False) -> Graph:
    return Graph(n, tuple((min(u, v), max(u, v)) if not multigraph else (u, v)
                          for u, v in edge_list), multigraph)


def parse_graph(text: str, multigraph: bool = False) -> Graph:
    """Parse the graph file format: header "n m", then m lines "u v".

    Lines starting with '#' are comments.  Simple/multigraph mode is a
    parameter of the parser, not encoded in the file.
    """
    rows = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rows.append(line)
    if not rows:
        raise GraphError("empty graph file")
    head = rows[0].split()
    if len(head) != 2:
        raise GraphError(f"malformed header {rows[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise GraphError(f"malformed header {rows[0]!r}") from None
    if n < 0 or m < 0:
        raise GraphError("negative counts in header")
    if len(rows) - 1 != m:
        raise GraphError(f"expected {m} edge lines, found {len(rows) - 1}")
    edges = []
    for line in rows[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"malformed edge line {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"malformed edge line {line!r}") from None
        edges.append((u, v))
    return make_graph(n, edges, multigraph)


def graph_to_text(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def bits(mask: int):
    """Iterate set bit positions of a mask, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


@lru_cache(maxsize=None)
def adjacency_masks(g: Graph) -> tuple[int, ...]:
    """Neighbour bitmask per vertex (loops contribute nothing)."""
    adj = [0] * g.n
    for u, v in g.edges:
        if u != v:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
    return tuple(adj)


@lru_cache(maxsize=None)
def incident_edges(g: Graph) -> tuple[tuple[int, ...], ...]:
    """Incident edge index list per vertex; loops listed once."""
    inc = [[] for _ in range(g.n)]
    for i, (u, v) in enumerate(g.edges):
        inc[u].append(i)
        if v != u:
            inc[v].append(i)
    return tuple(tuple(x) for x in inc)


@lru_cache(maxsize=1 << 18)
def edges_within(g: Graph, vmask: int) -> int:
    """Edge mask of E(U): edges with both endpoints inside vmask."""
    out = 0
    for i, (u, v) in enumerate(g.edges):
        if (vmask >> u) & 1 and (vmask >> v) & 1:
            out |= 1 << i
    return out


def component_of(g: Graph, start: int, vmask: int) -> int:
    """Vertex mask of the connected component of `start` inside g[vmask]."""
    adj = adjacency_masks(g)
    comp = 1 << start
    frontier = comp
    while frontier:
        nxt = 0
        for v in bits(frontier):
            nxt |= adj[v] & vmask
        frontier = nxt & ~comp
        comp |= frontier
    return comp


def connected_components(g: Graph, vmask: int | None = None) -> list[int]:
    """Vertex masks of the components of g restricted to vmask."""
    if vmask is None:
        vmask = g.full_vertex_mask()
    comps = []
    rest = vmask
    while rest:
        start = (rest & -rest).bit_length() - 1
        comp = component_of(g, start, vmask)
        comps.append(comp)
        rest &= ~comp
    return comps


def is_connected(g: Graph) -> bool:
    if g.n <= 1:
        return True
    return len(connected_components(g)) == 1


@lru_cache(maxsize=1 << 18)
def is_connected_subset(g: Graph, vmask: int) -> bool:
    """True when g[vmask] is connected (empty subsets are not)."""
    if vmask == 0:
        return False
    start = (vmask & -vmask).bit_length() - 1
    return component_of(g, start, vmask) == vmask


def is_forest_mask(g: Graph, emask: int) -> bool:
    """Union-find acyclicity test of an edge subset (loops are cycles)."""
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in bits(emask):
        u, v = g.edges[i]
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def is_spanning_tree(g: Graph, emask: int) -> bool:
    if emask.bit_count() != g.n - 1:
        return False
    if not is_forest_mask(g, emask):
        return False
    # acyclic with n-1 edges and no out-of-range bits => spanning tree
    return emask & ~g.full_edge_mask() == 0


@lru_cache(maxsize=None)
def enumerate_forests(g: Graph, cap: int = EDGE_ENUM_CAP) -> tuple[int, ...]:
    """All acyclic edge subsets of a simple graph, sorted by bitmask value.

    Enumeration backtracks over edge indices so only forests (plus pruned
    prefixes) are ever touched; the count never explodes at desk scale.
    """
    if g.multigraph:
        raise GraphError("forest enumeration expects a simple graph")
    if g.m > cap:
        raise CapExceeded(f"{g.m} edges exceeds enumeration cap {cap}")
    out = []
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    def rec(i: int, mask: int):
        out.append(mask)
        for j in range(i, g.m):
            u, v = g.edges[j]
            ru, rv = find(u), find(v)
            if ru == rv:
                continue
            parent[ru] = rv
            rec(j + 1, mask | (1 << j))
            parent[ru] = ru

    rec(0, 0)
    out.sort()
    return tuple(out)


def spanning_tree_count(g: Graph) -> int:
    """Matrix-Tree determinant of the reduced Laplacian, exact rationals.

    Independent cross-check routine for enumerate_spanning_trees.
    """
    if g.n == 0:
        return 0
    if g.n == 1:
        return 1
    k = g.n - 1
    lap = [[Fraction(0)] * k for _ in range(k)]
    for u, v in g.edges:
        if u == v:
            continue
        if u < k:
            lap[u][u] += 1
        if v < k:
            lap[v][v] += 1
        if u < k and v < k:
            lap[u][v] -= 1
            lap[v][u] -= 1
    det = Fraction(1)
    for col in range(k):
        piv = None
        for r in range(col, k):
            if lap[r][col] != 0:
                piv = r
                break
        if piv is None:
            return 0
        if piv != col:
            lap[col], lap[piv] = lap[piv], lap[col]
            det = -det
        det *= lap[col][col]
        inv = 1 / lap[col][col]
        for r in range(col + 1, k):
            f = lap[r][col] * inv
            if f:
                for c in range(col, k):
                    lap[r][c] -= f * lap[col][c]
    assert det.denominator == 1
    return int(det)


@lru_cache(maxsize=None)
def enumerate_spanning_trees(g: Graph, cap: int = EDGE_ENUM_CAP) -> tuple[int, ...]:
    """All spanning trees as edge masks; count is checked against Matrix-Tree."""
    if not is_connected(g):
        raise GraphError("spanning trees of a disconnected graph")
    forests = enumerate_forests(g, cap)
    want = g.n - 1
    trees = tuple(f for f in forests if f.bit_count() == want)
    det = spanning_tree_count(g)
    if len(trees) != det:
        raise AssertionError(f"tree count {len(trees)} != Matrix-Tree value {det}")
    return trees


@dataclass(frozen=True)
class BlockPiece:
    """One block plus index maps back into the host graph."""
    graph: Graph
    vertex_map: tuple[int, ...]   # local vertex -> host vertex
    edge_map: tuple[int, ...]     # local edge -> host edge


def blocks(g: Graph) -> list[BlockPiece]:
    """Block decomposition: maximal 2-connected subgraphs plus K1/K2 pieces.

    Every edge lands in exactly one block; isolated vertices become K1
    blocks.  Iterative DFS with an edge stack (Hopcroft-Tarjan style).
    """
    inc = incident_edges(g)
    visited = [False] * g.n
    depth = [0] * g.n
    low = [0] * g.n
    parent_edge = [-1] * g.n
    edge_seen = [False] * g.m
    stack: list[int] = []
    pieces: list[list[int]] = []

    for root in range(g.n):
        if visited[root]:
            continue
        visited[root] = True
        depth[root] = 0
        low[root] = 0
        work = [(root, iter(inc[root]))]
        touched_edge = False
        while work:
            v, it = work[-1]
            advanced = False
            for ei in it:
                if edge_seen[ei] or ei == parent_edge[v]:
                    continue
                a, b = g.edges[ei]
                w = b if a == v else a
                edge_seen[ei] = True
                touched_edge = True
                stack.append(ei)
                if not visited[w]:
                    visited[w] = True
                    depth[w] = depth[v] + 1
                    low[w] = depth[w]
                    parent_edge[w] = ei
                    work.append((w, iter(inc[w])))
                    advanced = True
                    break
                low[v] = min(low[v], depth[w])
            if advanced:
                continue
            work.pop()
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
                if low[v] >= depth[u]:
                    # u is a cut vertex (or the root): pop one block
                    pe = parent_edge[v]
                    comp = []
                    while True:
                        ei = stack.pop()
                        comp.append(ei)
                        if ei == pe:
                            break
                    pieces.append(comp)
        if not touched_edge:
            pieces.append([])  # isolated vertex: K1 block
            pieces[-1] = [-root - 1]  # sentinel carrying the vertex

    out = []
    for comp in pieces:
        if comp and comp[0] < 0:
            host_v = -comp[0] - 1
            out.append(BlockPiece(Graph(1, (), g.multigraph), (host_v,), ()))
            continue
        edge_ids = sorted(comp)
        verts = sorted({x for ei in edge_ids for x in g.edges[ei]})
        vidx = {v: i for i, v in enumerate(verts)}
        sub_edges = tuple((vidx[g.edges[ei][0]], vidx[g.edges[ei][1]]) for ei in edge_ids)
        out.append(BlockPiece(Graph(len(verts), sub_edges, g.multigraph),
                              tuple(verts), tuple(edge_ids)))
    out.sort(key=lambda b: b.vertex_map)
    return out


def slack_oracle(g: Graph, umask: int, fmask: int) -> Fraction:
    """Rank-inequality slack |U| - 1 - |E(F) ∩ E(U)| for a forest F.

    U must be a non-empty proper vertex subset; F must be a forest.
    """
    if umask == 0 or umask == g.full_vertex_mask():
        raise GraphError("U must be a non-empty proper vertex subset")
    if umask & ~g.full_vertex_mask():
        raise GraphError("U has bits outside the vertex range")
    if not is_forest_mask(g, fmask):
        raise GraphError("F is not a forest")
    return slack_value(g, umask, fmask)


def slack_value(g: Graph, umask: int, fmask: int) -> Fraction:
    """The slack formula without the properness check (U = V allowed)."""
    inside = fmask & edges_within(g, umask)
    return Fraction(umask.bit_count() - 1 - inside.bit_count())


@lru_cache(maxsize=None)
def connected_vertex_subsets(g: Graph, include_full: bool,
                             cap: int = VERTEX_ENUM_CAP) -> tuple[int, ...]:
    """All non-empty U with g[U] connected, ascending by bitmask value."""
    if g.n > cap:
        raise CapExceeded(f"{g.n} vertices exceeds enumeration cap {cap}")
    full = g.full_vertex_mask()
    adj = adjacency_masks(g)
    out = []
    for umask in range(1, 1 << g.n):
        if umask == full and not include_full:
            continue
        start = (umask & -umask).bit_length() - 1
        comp = 1 << start
        frontier = comp
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= adj[v] & umask
            frontier = nxt & ~comp
            comp |= frontier
        if comp == umask:
            out.append(umask)
    return tuple(out)


def contract(g: Graph, umask: int) -> Graph:
    """Contract the connected subgraph g[U] to one vertex (multigraph result).

    Vertices outside U keep their relative order as 0..k-1; the contracted
    vertex gets index k.  Parallel edges are kept, loops are discarded.
    """
    if umask == 0 or umask & ~g.full_vertex_mask():
        raise GraphError("invalid vertex subset")
    if len(connected_components(g, umask)) != 1:
        raise GraphError("g[U] is disconnected")
    outside = [v for v in range(g.n) if not (umask >> v) & 1]
    remap = {v: i for i, v in enumerate(outside)}
    cvert = len(outside)
    edges = []
    for u, v in g.edges:
        nu = remap.get(u, cvert)
        nv = remap.get(v, cvert)
        if nu == nv and nu == cvert:
            continue  # edge inside U becomes a loop: dropped
        edges.append((nu, nv))
    return Graph(cvert + 1, tuple(edges), multigraph=True)


@lru_cache(maxsize=1 << 16)
def induced_subgraph(g: Graph, vmask: int) -> BlockPiece:
    """Induced subgraph with vertex/edge index maps back to g."""
    verts = list(bits(vmask))
    vidx = {v: i for i, v in enumerate(verts)}
    edge_ids = list(bits(edges_within(g, vmask)))
    sub_edges = tuple((vidx[g.edges[i][0]], vidx[g.edges[i][1]]) for i in edge_ids)
    return BlockPiece(Graph(len(verts), sub_edges, g.multigraph),
                      tuple(verts), tuple(edge_ids))


def is_biconnected(g: Graph) -> bool:
    """2-connectivity with the block convention: K1 and K2 count as 2-connected.

    For n >= 3: connected and no articulation vertex (tested by removal;
    loops and parallel edges are handled naturally).
    """
    if g.n == 0:
        return False
    if g.n == 1:
        return True
    if not is_connected(g):
        return False
    if g.n == 2:
        return any(u != v for u, v in g.edges)
    full = g.full_vertex_mask()
    for v in range(g.n):
        rest = full & ~(1 << v)
        if len(connected_components(g, rest)) > 1:
            return False
    return True


def apex_completion(g: Graph, fmask: int) -> list[int]:
    """Targets of the apex edges completing forest F to a spanning tree of G+.

    The apex joins the minimum-index vertex of every component of the
    spanning forest (V, F).  Shared by the witness construction and by the
    protocols, so both sides of every check agree on the completion.
    """
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in bits(fmask):
        u, v = g.edges[i]
        ru, rv = find(u), find(v)
        if ru == rv:
            raise GraphError("edge subset is not a forest")
        parent[ru] = rv
    roots = {}
    for v in range(g.n):
        r = find(v)
        if r not in roots or v < roots[r]:
            roots[r] = v
    return sorted(roots.values())
