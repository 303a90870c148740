"""Rotation-system embeddings, dual graphs, the dual slack identity and the
one-bit planar protocol.

An embedding is given, never computed: each vertex carries a cyclic order
of its incident edge indices.  Faces are traced as dart orbits (a dart is
an edge plus a direction); Euler's identity |V| - |E| + |F| = 2 is
enforced, so only sphere embeddings of connected hosts pass.  The dual
keeps the host's edge indices, which makes tree complementation and the
edge partition checks pure index manipulation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exactlp import Report
from .exactmath import ceil_log2_fraction
from .graphs import (Graph, GraphError, bits, contract, edges_within,
                     enumerate_spanning_trees, is_biconnected, is_connected,
                     is_spanning_tree, slack_value)
from .protocols import KAPPA, ProtocolRun, _classical_outcomes, make_run

ZERO = Fraction(0)


class EmbeddingError(ValueError):
    """Rotation does not describe a sphere embedding of the host."""


@dataclass(frozen=True)
class PlanarEmbedding:
    host: Graph
    rotation: tuple[tuple[int, ...], ...]
    faces: tuple[tuple[tuple[int, int], ...], ...]   # faces as dart cycles
    face_vertices: tuple[int, ...]                   # vertex mask per face
    edge_faces: tuple[tuple[int, int], ...]          # the two faces of each edge

    @property
    def num_faces(self) -> int:
        return len(self.faces)


def trace_faces(g: Graph, rotation) -> PlanarEmbedding:
    """Trace the face orbits of a rotation system and check Euler's identity.

    A dart (e, d) leaves tail(e, d) and enters head(e, d); the next dart
    of the same face leaves the head along the edge after e in the head's
    rotation.  Loops are not supported (duals are built, never traced).
    """
    if any(u == v for u, v in g.edges):
        raise EmbeddingError("cannot trace a rotation with loops")
    if not is_connected(g):
        raise EmbeddingError("embedding of a disconnected host")
    rotation = tuple(tuple(r) for r in rotation)
    if len(rotation) != g.n:
        raise EmbeddingError("one rotation line per vertex required")
    for v in range(g.n):
        incident = sorted(i for i, (a, b) in enumerate(g.edges) if v in (a, b))
        if sorted(rotation[v]) != incident:
            raise EmbeddingError(
                f"rotation at vertex {v} does not list its incident edges")
    pos = {}
    for v in range(g.n):
        for k, e in enumerate(rotation[v]):
            pos[(v, e)] = k

    def other(e: int, v: int) -> int:
        a, b = g.edges[e]
        return b if v == a else a

    def next_dart(e: int, d: int) -> tuple[int, int]:
        a, b = g.edges[e]
        head = b if d == 0 else a
        rot = rotation[head]
        ne = rot[(pos[(head, e)] + 1) % len(rot)]
        na, nb = g.edges[ne]
        return (ne, 0 if na == head else 1)

    remaining = {(e, d) for e in range(g.m) for d in (0, 1)}
    faces = []
    while remaining:
        start = min(remaining)
        cycle = []
        dart = start
        while True:
            cycle.append(dart)
            remaining.discard(dart)
            dart = next_dart(*dart)
            if dart == start:
                break
            if dart not in remaining:
                raise EmbeddingError("malformed rotation: dart revisited")
        faces.append(tuple(cycle))
    if g.n - g.m + len(faces) != 2:
        raise EmbeddingError(
            f"Euler check failed: {g.n} - {g.m} + {len(faces)} != 2 "
            "(rotation is not spherical)")
    face_vertices = []
    for cyc in faces:
        mask = 0
        for e, d in cyc:
            a, b = g.edges[e]
            mask |= (1 << a) | (1 << b)
        face_vertices.append(mask)
    edge_faces = [[-1, -1] for _ in range(g.m)]
    for fi, cyc in enumerate(faces):
        for e, d in cyc:
            edge_faces[e][d] = fi
    return PlanarEmbedding(g, rotation, tuple(faces), tuple(face_vertices),
                           tuple((a, b) for a, b in edge_faces))


def parse_rotation_file(text: str) -> PlanarEmbedding:
    """Graph file lines followed by n lines "rot v: e1 e2 ..." per vertex."""
    graph_lines = []
    rot_lines = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        (rot_lines if line.startswith("rot ") else graph_lines).append(line)
    from .graphs import parse_graph
    g = parse_graph("\n".join(graph_lines))
    rotation: list[Optional[tuple[int, ...]]] = [None] * g.n
    for line in rot_lines:
        head, _, rest = line.partition(":")
        v = int(head.split()[1])
        if not 0 <= v < g.n or rotation[v] is not None:
            raise EmbeddingError(f"bad rotation line {line!r}")
        rotation[v] = tuple(int(tok) for tok in rest.split())
    if any(r is None for r in rotation):
        raise EmbeddingError("missing rotation lines")
    return trace_faces(g, rotation)


@dataclass(frozen=True)
class DualStructure:
    """Dual multigraph on the faces; edge i of the dual is dual to edge i
    of the host (a loop when both sides of the host edge see one face)."""
    dual: Graph
    edge_bijection: tuple[int, ...]


def build_dual(emb: PlanarEmbedding) -> DualStructure:
    edges = tuple(emb.edge_faces)
    dual = Graph(emb.num_faces, edges, multigraph=True)
    return DualStructure(dual, tuple(range(emb.host.m)))


def dual_tree(ds: DualStructure, tmask: int) -> int:
    """Complement of a host spanning tree, asserted to span the dual.

    T spans the host exactly when its complement spans the dual, so an
    invalid input T surfaces through the assertion on the complement.
    """
    comp = ds.dual.full_edge_mask() & ~tmask
    if not is_spanning_tree(ds.dual, comp):
        raise GraphError("complement is not a spanning tree of the dual")
    return comp


def facet_condition(g: Graph, umask: int) -> bool:
    """Both g[U] and g/U 2-connected, counting K1 and K2 as 2-connected.

    The dual slack identity is guaranteed on such U only when g[U] has no
    bridge; a U inducing a single edge satisfies this predicate but can
    break the identity (see lemma6_check).
    """
    if not is_biconnected(g):
        raise GraphError("host must be 2-connected")
    if umask == 0 or umask == g.full_vertex_mask() or umask & ~g.full_vertex_mask():
        raise GraphError("U must be a non-empty proper vertex subset")
    from .graphs import induced_subgraph
    piece = induced_subgraph(g, umask)
    if not is_biconnected(piece.graph):
        return False
    return is_biconnected(contract(g, umask))


def u_star(emb: PlanarEmbedding, umask: int) -> int:
    """Dual vertices of the faces having at least one vertex not in U."""
    out = 0
    for fi, fmask in enumerate(emb.face_vertices):
        if fmask & ~umask:
            out |= 1 << fi
    return out


def is_bridgeless_subset(g: Graph, umask: int) -> bool:
    """True when g[U] is connected with no bridge (vacuous for |U| = 1).

    This is the hypothesis the dual slack identity actually needs; with
    |U| = 2 the single induced edge is a bridge and the identity can fail.
    """
    from .graphs import induced_subgraph
    piece = induced_subgraph(g, umask)
    sub = piece.graph
    if not is_connected(sub):
        return False
    full = sub.full_edge_mask()
    for e in range(sub.m):
        rest_edges = full & ~(1 << e)
        parent = list(range(sub.n))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        for i in bits(rest_edges):
            a, b = sub.edges[i]
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        if len({find(v) for v in range(sub.n)}) > 1:
            return False
    return True


@dataclass(frozen=True)
class Lemma6Result:
    lhs: Fraction
    rhs: Fraction
    equal: bool
    complement_ok: bool   # |E(U)| + |E(U*)| == |E|


def lemma6_check(emb: PlanarEmbedding, umask: int, tmask: int) -> Lemma6Result:
    """Both sides of the dual slack identity plus the edge partition check.

    lhs = |U| - 1 - |E(T) ∩ E(U)| on the host, rhs the same expression on
    the dual with (U*, T*).  Equality holds whenever g[U] is bridgeless
    (singletons included); a U inducing exactly one edge passes
    facet_condition yet fails the identity for trees avoiding that edge.
    """
    g = emb.host
    if not facet_condition(g, umask):
        raise GraphError("U does not satisfy the facet condition")
    if not is_spanning_tree(g, tmask):
        raise GraphError("T is not a spanning tree of the host")
    ds = build_dual(emb)
    ustar = u_star(emb, umask)
    tstar = dual_tree(ds, tmask)
    lhs = slack_value(g, umask, tmask)
    e_u = edges_within(g, umask)
    e_ustar = edges_within(ds.dual, ustar)
    rhs = Fraction(ustar.bit_count() - 1 - (tstar & e_ustar).bit_count())
    complement_ok = e_u.bit_count() + e_ustar.bit_count() == g.m
    return Lemma6Result(lhs, rhs, lhs == rhs, complement_ok)


def default_v0_f0(emb: PlanarEmbedding) -> tuple[int, int]:
    """Vertex 0 and the first traced face whose boundary contains it."""
    for fi, fmask in enumerate(emb.face_vertices):
        if fmask & 1:
            return 0, fi
    raise EmbeddingError("no face contains vertex 0")


def williams_protocol(emb: PlanarEmbedding, v0: int, f0: int, umask: int,
                      tmask: int) -> ProtocolRun:
    """One-bit planar protocol for the spanning tree slack.

    Alice sends a single bit: v0 in U (classical finish on the host with
    her vertex fixed to v0) or not, in which case f0 lies in U* and the
    classical finish runs on the dual with (U*, T*) from f0.  Alice sends
    no vertex name, so the message cost is 1 plus Bob's arc message.
    """
    g = emb.host
    if not 0 <= v0 < g.n or not 0 <= f0 < emb.num_faces:
        raise GraphError("v0 or f0 out of range")
    if not (emb.face_vertices[f0] >> v0) & 1:
        raise GraphError("the boundary of f0 must contain v0")
    if not facet_condition(g, umask):
        raise GraphError("U does not satisfy the facet condition")
    if not is_spanning_tree(g, tmask):
        raise GraphError("T is not a spanning tree of the host")
    if (umask >> v0) & 1:
        outcomes, arc_bits = _classical_outcomes(g, umask, tmask, v0)
    else:
        ds = build_dual(emb)
        ustar = u_star(emb, umask)
        if not (ustar >> f0) & 1:
            raise AssertionError("v0 outside U must force f0 into U*")
        tstar = dual_tree(ds, tmask)
        outcomes, arc_bits = _classical_outcomes(ds.dual, ustar, tstar, f0)
    bits_used = 1 + arc_bits
    return make_run([(p, bits_used, out) for p, out in outcomes])


def williams_bits_bound(g: Graph) -> int:
    return 1 + ceil_log2_fraction(Fraction(2 * g.m)) + KAPPA


def williams_sweep(emb: PlanarEmbedding, v0: Optional[int] = None,
                   f0: Optional[int] = None,
                   bridgeless_only: bool = False, verbose: bool = True) -> Report:
    """Dual identity and protocol checks over facet subsets and all trees.

    For every U passing facet_condition and every spanning tree: the two
    slack expressions agree, the edge partition holds, the protocol's
    expectation equals the slack, and the bits stay within the budget.
    bridgeless_only additionally restricts to U with bridgeless g[U] (the
    hypothesis under which the identity is guaranteed).
    """
    g = emb.host
    if v0 is None or f0 is None:
        v0, f0 = default_v0_f0(emb)
    rep = Report(verbose=verbose)
    subsets = [u for u in range(1, g.full_vertex_mask())
               if facet_condition(g, u)]
    if bridgeless_only:
        subsets = [u for u in subsets if is_bridgeless_subset(g, u)]
    trees = enumerate_spanning_trees(g)
    rep.info(f"williams-sweep n={g.n} m={g.m} faces={emb.num_faces} "
             f"subsets={len(subsets)} trees={len(trees)} v0={v0} f0={f0}")
    bound = williams_bits_bound(g)
    max_bits = 0
    for umask in subsets:
        for tmask in trees:
            res = lemma6_check(emb, umask, tmask)
            run = williams_protocol(emb, v0, f0, umask, tmask)
            slack = slack_value(g, umask, tmask)
            max_bits = max(max_bits, run.max_bits)
            ok = res.equal and res.complement_ok and run.expectation == slack \
                and run.max_bits <= bound
            rep.check_lazy(ok, lambda: (
                f"williams {umask:x} {tmask:x} "
                f"exp={run.expectation.numerator}/{run.expectation.denominator} "
                f"slack={slack.numerator}/{slack.denominator} "
                f"lhs={res.lhs} rhs={res.rhs} bits={run.max_bits}"))
    rep.info(f"max-bits {max_bits} bound {bound}")
    return rep
