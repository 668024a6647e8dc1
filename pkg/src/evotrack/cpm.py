"""Overlapping community extraction by k-clique percolation on directed snapshots."""

from __future__ import annotations

import math
from itertools import combinations

from .model import Community, SnapshotGraph, make_communities

DIRECTED = "directed"
UNDIRECTED = "undirected"
CLIQUE_MODES = (DIRECTED, UNDIRECTED)


class UnionFind:
    def __init__(self, size):
        self.parent = list(range(size))

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


class _Adjacency:
    """Symmetrised neighbourhoods plus the one-way part of the directed edges.

    A node set admits a transitive ordering iff every pair is linked and the
    one-way edges among the set are acyclic: topologically sorting the one-way
    edges gives the order, and reciprocated pairs fit either way round.
    """

    def __init__(self, graph: SnapshotGraph, directed: bool):
        self.nbrs = {v: set() for v in graph.nodes}
        self.oneway_out = {v: set() for v in graph.nodes}
        self.oneway_in = {v: set() for v in graph.nodes}
        for (u, v) in graph.edges:
            if u == v:
                continue
            self.nbrs[u].add(v)
            self.nbrs[v].add(u)
            if directed and (v, u) not in graph.edges:
                self.oneway_out[u].add(v)
                self.oneway_in[v].add(u)
        self.directed = directed

    def extends(self, members, w) -> bool:
        """Whether valid set ``members`` plus linked node ``w`` is still valid."""
        if not self.directed:
            return True
        into = self.oneway_in[w]
        if not any(x in into for x in members):
            return True
        start = [x for x in self.oneway_out[w] if x in members]
        if not start:
            return True
        # a one-way cycle through w needs a path w -> ... -> x with x -> w
        inside = set(members)
        seen = set(start)
        stack = start
        while stack:
            x = stack.pop()
            if x in into:
                return False
            for y in self.oneway_out[x]:
                if y in inside and y not in seen:
                    seen.add(y)
                    stack.append(y)
        return True


def enumerate_directed_k_cliques(graph: SnapshotGraph, k: int, mode: str = DIRECTED) -> list[tuple]:
    """All k-node sets satisfying the clique criterion, as sorted tuples in sorted order.

    Candidates are grown in node order over the symmetrised graph. In
    directed mode every partial set must already admit a transitive
    ordering, which prunes early since the property is hereditary.
    """
    if k < 3:
        raise ValueError(f"k must be >= 3, got {k}")
    if mode not in CLIQUE_MODES:
        raise ValueError(f"unknown clique mode {mode!r}")
    adj = _Adjacency(graph, mode == DIRECTED)
    nbrs = adj.nbrs
    order = sorted(graph.nodes)
    rank = {v: i for i, v in enumerate(order)}
    found = []

    def extend(clique, cands):
        if len(clique) == k:
            found.append(tuple(clique))
            return
        need = k - len(clique)
        for i, w in enumerate(cands):
            if len(cands) - i < need:
                break
            if not adj.extends(clique, w):
                continue
            nw = nbrs[w]
            extend(clique + [w], [x for x in cands[i + 1:] if x in nw])

    for v in order:
        higher = sorted((w for w in nbrs[v] if rank[w] > rank[v]), key=rank.__getitem__)
        if len(higher) >= k - 1:
            extend([v], higher)
    return found


def _undirected_maximal_cliques(nbrs, min_size):
    """Bron-Kerbosch with Tomita pivoting over the symmetrised graph."""
    found = []

    def expand(members, cands, excluded):
        if not cands:
            if not excluded and len(members) >= min_size:
                found.append(members)
            return
        if len(members) + len(cands) < min_size:
            return
        pivot = max(cands | excluded, key=lambda u: (len(cands & nbrs[u]), u))
        for v in sorted(cands - nbrs[pivot]):
            nv = nbrs[v]
            expand(members + [v], cands & nv, excluded & nv)
            cands = cands - {v}
            excluded = excluded | {v}

    expand([], set(nbrs), set())
    return found


def _acyclic(members, adj) -> bool:
    inside = set(members)
    indeg = {v: sum(1 for u in adj.oneway_in[v] if u in inside) for v in members}
    ready = [v for v, d in indeg.items() if d == 0]
    done = 0
    while ready:
        v = ready.pop()
        done += 1
        for w in adj.oneway_out[v]:
            if w in inside:
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
    return done == len(members)


def _maximal_valid_subsets(members, adj, min_size):
    """Maximal subsets of a symmetrised clique whose one-way edges are acyclic.

    Plain Bron-Kerbosch: the criterion is hereditary but not pairwise, so
    pivoting is unsound here. Only reached for cliques containing a one-way
    cycle, which are rare and small in comment graphs.
    """
    found = []

    def expand(chosen, cands, excluded):
        if not cands and not excluded:
            if len(chosen) >= min_size:
                found.append(chosen)
            return
        if len(chosen) + len(cands) < min_size:
            return
        while cands:
            v, cands = cands[0], cands[1:]
            grown = chosen + [v]
            expand(grown,
                   [w for w in cands if adj.extends(grown, w)],
                   [x for x in excluded if adj.extends(grown, x)])
            excluded = excluded + [v]

    expand([], sorted(members), [])
    return found


def clique_cover(graph: SnapshotGraph, mode: str = DIRECTED, min_size: int = 3) -> list[tuple]:
    """Valid node sets (size >= ``min_size``) covering every valid k-set, k >= ``min_size``.

    Every valid set lies inside a maximal clique of the symmetrised graph;
    such a clique is kept whole when its one-way edges are acyclic and is
    otherwise replaced by its maximal valid subsets. Percolating these sets
    by shared-node count gives the same communities as percolating all
    k-cliques, whether or not the sets are globally maximal.
    """
    if mode not in CLIQUE_MODES:
        raise ValueError(f"unknown clique mode {mode!r}")
    adj = _Adjacency(graph, mode == DIRECTED)
    cover = set()
    for members in _undirected_maximal_cliques(adj.nbrs, min_size):
        if not adj.directed or _acyclic(members, adj):
            cover.add(tuple(sorted(members)))
        else:
            cover.update(tuple(sorted(m)) for m in _maximal_valid_subsets(members, adj, min_size))
    return sorted(cover)


def clique_intensity(clique, graph: SnapshotGraph) -> float:
    """Geometric mean of the weights of all directed edges inside ``clique``."""
    weights = [graph.edges[(u, v)] for u in clique for v in clique if (u, v) in graph.edges]
    if not weights:
        return 0.0
    return math.exp(sum(math.log(w) for w in weights) / len(weights))


def percolate(cliques, k: int) -> list[frozenset]:
    """Union the cliques of each component of the (k-1)-overlap adjacency graph."""
    cliques = [tuple(sorted(c)) for c in cliques]
    for c in cliques:
        if len(c) != k:
            raise ValueError(f"clique {c} does not have {k} nodes")
    uf = UnionFind(len(cliques))
    seen = {}
    for i, c in enumerate(cliques):
        # two distinct k-sets share k-1 nodes iff they share a (k-1)-subset
        for face in combinations(c, k - 1):
            j = seen.setdefault(face, i)
            if j != i:
                uf.union(i, j)
    groups = {}
    for i, c in enumerate(cliques):
        groups.setdefault(uf.find(i), set()).update(c)
    return sorted((frozenset(g) for g in groups.values()), key=lambda g: tuple(sorted(g)))


def percolate_maximal(max_cliques, k: int) -> list[frozenset]:
    """Same communities as ``percolate`` over every k-subset of the given valid sets.

    k-cliques inside one valid set are always chained together, and two
    sets chain their k-cliques iff they share at least k-1 nodes.
    """
    sets = [frozenset(c) for c in max_cliques if len(c) >= k]
    holders = {}
    for i, c in enumerate(sets):
        for v in c:
            holders.setdefault(v, []).append(i)
    uf = UnionFind(len(sets))
    for i, c in enumerate(sets):
        shared = {}
        for v in c:
            for j in holders[v]:
                if j > i:
                    shared[j] = shared.get(j, 0) + 1
        for j, n in shared.items():
            if n >= k - 1:
                uf.union(i, j)
    groups = {}
    for i, c in enumerate(sets):
        groups.setdefault(uf.find(i), set()).update(c)
    return sorted((frozenset(g) for g in groups.values()), key=lambda g: tuple(sorted(g)))


def extract_communities(
    graph: SnapshotGraph,
    k: int,
    mode: str = DIRECTED,
    min_intensity: float | None = None,
) -> list[Community]:
    if k < 3:
        raise ValueError(f"k must be >= 3, got {k}")
    if min_intensity is not None:
        cliques = enumerate_directed_k_cliques(graph, k, mode)
        cliques = [c for c in cliques if clique_intensity(c, graph) >= min_intensity]
        return make_communities(percolate(cliques, k), graph.slot_index, k)
    return make_communities(percolate_maximal(clique_cover(graph, mode, k), k), graph.slot_index, k)


def extract_all(graph: SnapshotGraph, ks, mode: str = DIRECTED, min_intensity: float | None = None) -> dict:
    """Communities for several k, sharing one maximal-clique enumeration."""
    if min_intensity is not None:
        return {k: extract_communities(graph, k, mode, min_intensity) for k in ks}
    if any(k < 3 for k in ks):
        raise ValueError("every k must be >= 3")
    maximal = clique_cover(graph, mode, min(ks)) if ks else []
    return {k: make_communities(percolate_maximal(maximal, k), graph.slot_index, k) for k in ks}
