"""Precomputed arc structures: double brooms, cycles, antiparallel pairs, minimal cuts."""
from __future__ import annotations

from itertools import combinations
from typing import Iterable

import networkx as nx
import numpy as np

from ..instance import Instance

MAX_EXHAUSTIVE_ARCS = 12


def vertices_of(inst: Instance, arcs: Iterable[int]) -> set[int]:
    out = set()
    for k in arcs:
        out.update(inst.graph.arcs[k])
    return out


def _is_linear_forest(inst: Instance, arcs) -> bool:
    indeg: dict[int, int] = {}
    succ: dict[int, int] = {}
    for k in arcs:
        t, h = inst.graph.arcs[k]
        if t in succ or indeg.get(h, 0):
            return False
        succ[t] = h
        indeg[h] = 1
    # with in/out degree <= 1 the components are paths or cycles
    seen_arcs = 0
    for start in succ:
        if indeg.get(start, 0):
            continue
        node = start
        while node in succ:
            node = succ[node]
            seen_arcs += 1
    return seen_arcs == len(succ)


def max_path_system(inst: Instance, arcs) -> tuple[int, int, int]:
    """Vertex-disjoint directed paths inside ``arcs`` with the most arcs, by exhaustive search.

    Returns (arc count, covered vertices, path count); arc count equals
    covered vertices minus path count.
    """
    arcs = sorted(arcs)
    if len(arcs) > MAX_EXHAUSTIVE_ARCS:
        raise ValueError(f"exhaustive search limited to {MAX_EXHAUSTIVE_ARCS} arcs")
    for size in range(len(arcs), 0, -1):
        for combo in combinations(arcs, size):
            if _is_linear_forest(inst, combo):
                nv = len(vertices_of(inst, combo))
                return size, nv, nv - size
    return 0, 0, 0


def double_brooms(inst: Instance) -> list[tuple[str, int, frozenset]]:
    """(kind, defining arc, arc set) for every incoming and outgoing double broom."""
    g = inst.graph
    out = []
    seen = set()
    for k, (i, j) in enumerate(g.arcs):
        star_j = set(g.in_arcs(j)) | set(g.out_arcs(j))
        for kind, side in (("in", g.in_arcs(i)), ("out", g.out_arcs(i))):
            arcs = frozenset(star_j | set(side))
            if (kind, arcs) not in seen:
                seen.add((kind, arcs))
                out.append((kind, k, arcs))
    return out


def directed_cycles(inst: Instance, max_len: int = 6, limit: int = 2000) -> list[tuple[int, ...]]:
    """Simple directed cycles with 3..max_len arcs, as arc-index tuples."""
    g = inst.graph
    found: list[tuple[int, ...]] = []

    def dfs(start, node, visited, path):
        if len(found) >= limit:
            return
        for k in g.out_arcs(node):
            h = g.arcs[k][1]
            if h == start and len(path) >= 2:
                found.append(tuple(path + [k]))
            elif h > start and h not in visited and len(path) + 1 < max_len:
                visited.add(h)
                dfs(start, h, visited, path + [k])
                visited.discard(h)

    for s in range(g.n):
        dfs(s, s, {s}, [])
    return found


def undirected_cycles(inst: Instance, max_len: int = 6, limit: int = 2000) -> list[tuple[int, ...]]:
    """Cycles of the underlying simple graph (>= 3 vertices), as vertex tuples."""
    g = inst.graph
    nbrs: dict[int, set[int]] = {v: set() for v in range(g.n)}
    for t, h in g.arcs:
        nbrs[t].add(h)
        nbrs[h].add(t)
    found: list[tuple[int, ...]] = []

    def dfs(start, node, path):
        if len(found) >= limit:
            return
        for w in sorted(nbrs[node]):
            if w == start and len(path) >= 3 and path[1] < path[-1]:
                found.append(tuple(path))
            elif w > start and w not in path and len(path) < max_len:
                dfs(start, w, path + [w])

    for s in range(g.n):
        dfs(s, s, [s])
    return found


def arcs_between(inst: Instance, cycle_vertices) -> frozenset:
    g = inst.graph
    cyc = list(cycle_vertices)
    arcs = set()
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        for t, h in ((a, b), (b, a)):
            k = g.arc_index(t, h)
            if k is not None:
                arcs.add(k)
    return frozenset(arcs)


def induced_arcs(inst: Instance, vertices) -> frozenset:
    vs = set(vertices)
    return frozenset(k for k, (t, h) in enumerate(inst.graph.arcs) if t in vs and h in vs)


def antiparallel_pairs(inst: Instance) -> list[tuple[int, int]]:
    g = inst.graph
    out = []
    for k, (t, h) in enumerate(g.arcs):
        r = g.arc_index(h, t)
        if r is not None and k < r:
            out.append((k, r))
    return out


def cycle_structures(inst: Instance, max_len: int = 6) -> list[frozenset]:
    """Arc sets from directed cycles, undirected cycles and the arcs induced by cycle vertices."""
    g = inst.graph
    seen: dict[frozenset, None] = {}
    vsets = []
    for cyc in directed_cycles(inst, max_len):
        seen.setdefault(frozenset(cyc), None)
        vsets.append(frozenset(g.arcs[k][0] for k in cyc))
    for cyc in undirected_cycles(inst, max_len):
        seen.setdefault(arcs_between(inst, cyc), None)
        vsets.append(frozenset(cyc))
    for vs in dict.fromkeys(vsets):
        seen.setdefault(induced_arcs(inst, vs), None)
    return list(seen)


def simple_paths(inst: Instance, src: int, dst: int, limit: int | None = None) -> list[tuple[int, ...]]:
    """All simple directed src->dst paths as arc tuples, in DFS order by arc index.

    Raises OverflowError if more than ``limit`` paths exist.
    """
    g = inst.graph
    out: list[tuple[int, ...]] = []

    def dfs(node, visited, path):
        if node == dst:
            out.append(tuple(path))
            if limit is not None and len(out) > limit:
                raise OverflowError(f"more than {limit} simple paths")
            return
        for k in g.out_arcs(node):
            h = g.arcs[k][1]
            if h not in visited:
                visited.add(h)
                path.append(k)
                dfs(h, visited, path)
                path.pop()
                visited.discard(h)

    dfs(src, {src}, [])
    return out


def crosses_exactly_once(inst: Instance, cut: frozenset, src: int, dst: int,
                         path_limit: int = 5000) -> bool:
    """Every simple src->dst path uses exactly one arc of ``cut``."""
    try:
        paths = simple_paths(inst, src, dst, limit=path_limit)
    except OverflowError:
        paths = None
    if paths is not None:
        return all(sum(1 for k in p if k in cut) == 1 for p in paths)
    # fallback: no walk can re-enter the source side (sufficient condition)
    g = inst.graph
    tails = {g.arcs[k][0] for k in cut}
    side = _source_side(inst, cut, src)
    if side is None or dst in side or not tails <= side:
        return False
    reach = g.reachable(src)
    co = _coreachable(inst, dst)
    for t, h in g.arcs:
        if t not in side and h in side and t in reach and h in co:
            return False
    return True


def _source_side(inst: Instance, cut: frozenset, src: int):
    g = inst.graph
    side = {src}
    todo = [src]
    while todo:
        u = todo.pop()
        for k in g.out_arcs(u):
            if k in cut:
                continue
            h = g.arcs[k][1]
            if h not in side:
                side.add(h)
                todo.append(h)
    return side


def _coreachable(inst: Instance, dst: int) -> set[int]:
    g = inst.graph
    seen = {dst}
    todo = [dst]
    while todo:
        u = todo.pop()
        for k in g.in_arcs(u):
            t = g.arcs[k][0]
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return seen


def minimal_cuts(inst: Instance, d: int, rng: np.random.Generator, trials: int = 30,
                 cap: int = 20, patience: int = 5) -> list[frozenset]:
    """delta+(s(d)), delta-(t(d)) and randomly harvested min cuts crossed once by every path.

    Harvesting stops after ``patience`` consecutive trials without a new cut.
    """
    g = inst.graph
    dem = inst.demands[d]
    cuts: list[frozenset] = []
    for c in (frozenset(g.out_arcs(dem.source)), frozenset(g.in_arcs(dem.target))):
        if c and c not in cuts:
            cuts.append(c)
    G = nx.DiGraph()
    G.add_nodes_from(range(g.n))
    stale = 0
    for _ in range(trials):
        if len(cuts) >= cap or stale >= patience:
            break
        stale += 1
        caps = 1.0 + rng.random(g.m)
        G.clear_edges()
        for k, (t, h) in enumerate(g.arcs):
            G.add_edge(t, h, capacity=float(caps[k]))
        value, (side, _) = nx.minimum_cut(G, dem.source, dem.target)
        if value <= 0:
            break
        side = set(side)
        c = frozenset(k for k, (t, h) in enumerate(g.arcs) if t in side and h not in side)
        if c and c not in cuts and crosses_exactly_once(inst, c, dem.source, dem.target):
            cuts.append(c)
            stale = 0
    return cuts[:cap]
