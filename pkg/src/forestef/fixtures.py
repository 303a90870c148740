"""Fixture graphs, embeddings and the seeded verification battery."""

from __future__ import annotations

import random

from .graphs import Graph, make_graph


def path_graph(n: int) -> Graph:
    return make_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return make_graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return make_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def bowtie_graph() -> Graph:
    """Two triangles sharing vertex 2."""
    return make_graph(5, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)])


def grid_graph(k: int) -> Graph:
    """k x k grid; vertex (row, col) is k*row + col.

    Edge order: for each vertex in index order, the edge to its right
    neighbour first, then to the neighbour one row up.
    """
    edges = []
    for r in range(k):
        for c in range(k):
            v = k * r + c
            if c + 1 < k:
                edges.append((v, v + 1))
            if r + 1 < k:
                edges.append((v, v + k))
    return make_graph(k * k, edges)


def grid_rotation(k: int) -> tuple[tuple[int, ...], ...]:
    """Planar rotation system of grid_graph(k): east, north, west, south."""
    g = grid_graph(k)
    eidx = {}
    for i, (u, v) in enumerate(g.edges):
        eidx[(u, v)] = i
        eidx[(v, u)] = i
    rot = []
    for r in range(k):
        for c in range(k):
            v = k * r + c
            order = []
            if c + 1 < k:
                order.append(eidx[(v, v + 1)])
            if r + 1 < k:
                order.append(eidx[(v, v + k)])
            if c - 1 >= 0:
                order.append(eidx[(v, v - 1)])
            if r - 1 >= 0:
                order.append(eidx[(v, v - k)])
            rot.append(tuple(order))
    return tuple(rot)


def cycle_rotation(n: int) -> tuple[tuple[int, ...], ...]:
    g = cycle_graph(n)
    inc = [[] for _ in range(n)]
    for i, (u, v) in enumerate(g.edges):
        inc[u].append(i)
        inc[v].append(i)
    return tuple(tuple(x) for x in inc)


def k4_rotation() -> tuple[tuple[int, ...], ...]:
    """A planar rotation of K4: vertex 3 inside the triangle 0,1,2.

    Edge order of complete_graph(4): (0,1),(0,2),(0,3),(1,2),(1,3),(2,3).
    Counterclockwise neighbour order at each vertex.
    """
    return (
        (0, 2, 1),   # at 0: to 1, to 3, to 2
        (3, 4, 0),   # at 1: to 2, to 3, to 0
        (1, 5, 3),   # at 2: to 0, to 3, to 1
        (2, 4, 5),   # at 3: to 0, to 1, to 2
    )


def figure_grid_subset() -> int:
    """The 6-vertex subset of the 3x3 grid: the two left columns.

    In grid_graph(3) coordinates (vertex = 3*row + col) these are the
    vertices with col <= 1: {0, 1, 3, 4, 6, 7}.
    """
    return sum(1 << v for v in (0, 1, 3, 4, 6, 7))


def figure_grid_tree() -> int:
    """The highlighted spanning tree of the 3x3 grid fixture.

    Edges (as vertex pairs): the two left-column verticals, the two
    mid-column verticals, the top right-column vertical, and the bottom
    row plus the top-right horizontal.
    """
    g = grid_graph(3)
    pairs = {(0, 3), (3, 6), (1, 4), (4, 7), (5, 8), (0, 1), (1, 2), (7, 8)}
    mask = 0
    for i, e in enumerate(g.edges):
        if e in pairs:
            mask |= 1 << i
    assert mask.bit_count() == 8
    return mask


def random_connected_graph(rng: random.Random, n_min: int = 3, n_max: int = 7,
                           extra_p: float = 0.35) -> Graph:
    """Random connected graph: random spanning tree plus extra edges."""
    n = rng.randint(n_min, n_max)
    edges = set()
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        j = rng.randrange(i)
        u, v = order[i], order[j]
        edges.add((min(u, v), max(u, v)))
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in edges and rng.random() < extra_p:
                edges.add((u, v))
    return make_graph(n, sorted(edges))


def battery(seed: int = 20240809, randoms: int = 30) -> list[tuple[str, Graph]]:
    """The fixture battery: paths, cycles, K3-K5, bowtie, 3x3 grid, randoms."""
    out: list[tuple[str, Graph]] = []
    for n in range(2, 8):
        out.append((f"path{n}", path_graph(n)))
    for n in range(3, 8):
        out.append((f"cycle{n}", cycle_graph(n)))
    for n in (3, 4, 5):
        out.append((f"k{n}", complete_graph(n)))
    out.append(("bowtie", bowtie_graph()))
    out.append(("grid3", grid_graph(3)))
    rng = random.Random(seed)
    for i in range(randoms):
        out.append((f"rand{i}", random_connected_graph(rng)))
    return out
