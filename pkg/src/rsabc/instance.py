"""RSA instances: digraph, demands, slot count, text I/O and the random generator.

Instance file format (0-based indices, ``#`` starts a comment)::

    rsa <n> <|E|> <|D|> <slots>
    arc <tail> <head>          # |E| lines
    demand <src> <dst> <vol>   # |D| lines

A leading ``# name: <label>`` comment sets the instance label.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class InstanceError(ValueError):
    """Semantic problem with an instance (dangling node, self-loop, ...)."""


class InstanceSyntaxError(InstanceError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class GeneratorError(RuntimeError):
    pass


@dataclass(frozen=True)
class Digraph:
    n: int
    arcs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n <= 0:
            raise InstanceError("node count must be positive")
        seen = set()
        for t, h in self.arcs:
            if not (0 <= t < self.n and 0 <= h < self.n):
                raise InstanceError(f"dangling node-id in arc ({t},{h})")
            if t == h:
                raise InstanceError(f"self-loop at node {t}")
            if (t, h) in seen:
                raise InstanceError(f"duplicate arc ({t},{h})")
            seen.add((t, h))
        out_arcs = [[] for _ in range(self.n)]
        in_arcs = [[] for _ in range(self.n)]
        for k, (t, h) in enumerate(self.arcs):
            out_arcs[t].append(k)
            in_arcs[h].append(k)
        object.__setattr__(self, "_out", tuple(tuple(a) for a in out_arcs))
        object.__setattr__(self, "_in", tuple(tuple(a) for a in in_arcs))
        object.__setattr__(self, "_index", {a: k for k, a in enumerate(self.arcs)})

    @property
    def m(self) -> int:
        return len(self.arcs)

    def out_arcs(self, i: int) -> tuple[int, ...]:
        return self._out[i]

    def in_arcs(self, i: int) -> tuple[int, ...]:
        return self._in[i]

    def arc_index(self, tail: int, head: int) -> int | None:
        return self._index.get((tail, head))

    def reachable(self, src: int) -> set[int]:
        seen = {src}
        todo = deque([src])
        while todo:
            u = todo.popleft()
            for k in self._out[u]:
                w = self.arcs[k][1]
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return seen


@dataclass(frozen=True)
class Demand:
    source: int
    target: int
    volume: int


@dataclass(frozen=True)
class Instance:
    graph: Digraph
    demands: tuple[Demand, ...]
    slots: int
    name: str = ""

    def __post_init__(self):
        if self.slots <= 0:
            raise InstanceError("slot count must be positive")
        for k, d in enumerate(self.demands):
            if not (0 <= d.source < self.graph.n and 0 <= d.target < self.graph.n):
                raise InstanceError(f"demand {k}: dangling node-id")
            if d.source == d.target:
                raise InstanceError(f"demand {k}: source equals target")
            if d.volume < 1:
                raise InstanceError(f"demand {k}: volume must be >= 1")
            if d.volume > self.slots:
                raise InstanceError(f"demand {k}: volume exceeds slots")

    @property
    def n_demands(self) -> int:
        return len(self.demands)

    @property
    def n_vars(self) -> int:
        return len(self.demands) * self.graph.m * self.slots

    def same_data(self, other: "Instance") -> bool:
        return (self.graph == other.graph and self.demands == other.demands
                and self.slots == other.slots)


@dataclass(frozen=True)
class CanonicalSolution:
    """One simple path (arc indices, in order) and a start slot (1-based) per demand."""
    paths: tuple[tuple[int, ...], ...]
    starts: tuple[int, ...]

    def objective(self) -> int:
        return sum(len(p) for p in self.paths)


@dataclass(frozen=True)
class GeneratorParams:
    nodes: int
    density: float
    demands: int
    vmin: int
    vmax: int
    slots: int
    seed: int = 0
    retries: int = 50

    def validate(self):
        if self.nodes < 2:
            raise ValueError("need at least two nodes")
        if not 0.0 < self.density <= 1.0:
            raise ValueError("density must lie in (0, 1]")
        if self.demands < 0:
            raise ValueError("demand count must be non-negative")
        if not 1 <= self.vmin <= self.vmax <= self.slots:
            raise ValueError("need 1 <= vmin <= vmax <= slots")


def make_instance(n: int, arcs: Iterable[Sequence[int]], demands: Iterable[Sequence[int]],
                  slots: int, name: str = "") -> Instance:
    graph = Digraph(n, tuple((int(t), int(h)) for t, h in arcs))
    dem = tuple(Demand(int(s), int(t), int(v)) for s, t, v in demands)
    return Instance(graph, dem, int(slots), name)


def parse_instance(text: str, name: str = "") -> Instance:
    header = None
    arcs: list[tuple[int, int]] = []
    demands: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if body.startswith("name:") and not name:
                name = body[5:].strip()
            continue
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        key, args = line[0], line[1:]
        try:
            vals = [int(a) for a in args]
        except ValueError:
            raise InstanceSyntaxError(lineno, f"non-integer field in {raw.strip()!r}") from None
        if key == "rsa":
            if header is not None:
                raise InstanceSyntaxError(lineno, "duplicate header")
            if len(vals) != 4:
                raise InstanceSyntaxError(lineno, "header needs: rsa <n> <|E|> <|D|> <slots>")
            header = vals
        elif header is None:
            raise InstanceSyntaxError(lineno, "missing 'rsa' header")
        elif key == "arc":
            if len(vals) != 2:
                raise InstanceSyntaxError(lineno, "arc needs: arc <tail> <head>")
            if demands:
                raise InstanceSyntaxError(lineno, "arc lines must precede demand lines")
            arcs.append((vals[0], vals[1]))
        elif key == "demand":
            if len(vals) != 3:
                raise InstanceSyntaxError(lineno, "demand needs: demand <src> <dst> <volume>")
            demands.append((vals[0], vals[1], vals[2]))
        else:
            raise InstanceSyntaxError(lineno, f"unknown record {key!r}")
    if header is None:
        raise InstanceSyntaxError(0, "missing 'rsa' header")
    n, n_arcs, n_dem, slots = header
    if len(arcs) != n_arcs:
        raise InstanceError(f"header declares {n_arcs} arcs, found {len(arcs)}")
    if len(demands) != n_dem:
        raise InstanceError(f"header declares {n_dem} demands, found {len(demands)}")
    return make_instance(n, arcs, demands, slots, name)


def serialize_instance(inst: Instance) -> str:
    g = inst.graph
    out = []
    if inst.name:
        out.append(f"# name: {inst.name}")
    out.append(f"rsa {g.n} {g.m} {inst.n_demands} {inst.slots}")
    out += [f"arc {t} {h}" for t, h in g.arcs]
    out += [f"demand {d.source} {d.target} {d.volume}" for d in inst.demands]
    return "\n".join(out) + "\n"


def load_instance(path) -> Instance:
    from pathlib import Path
    p = Path(path)
    return parse_instance(p.read_text(), name=p.stem)


def generate_instance(params: GeneratorParams) -> Instance:
    """Random digraph with floor(density * n(n-1)) arcs and uniformly drawn demands.

    Each demand's endpoints are redrawn until the target is reachable from the
    source; ``params.retries`` draws are allowed per demand.
    """
    params.validate()
    rng = np.random.default_rng(params.seed)
    n = params.nodes
    pairs = [(t, h) for t in range(n) for h in range(n) if t != h]
    n_arcs = int(np.floor(params.density * len(pairs) + 1e-9))
    chosen = sorted(rng.choice(len(pairs), size=n_arcs, replace=False).tolist()) if n_arcs else []
    graph = Digraph(n, tuple(pairs[k] for k in chosen))
    reach = [graph.reachable(i) for i in range(n)]
    demands = []
    for k in range(params.demands):
        for _ in range(params.retries):
            s, t = (int(x) for x in rng.choice(n, size=2, replace=False))
            if t in reach[s]:
                break
        else:
            raise GeneratorError(f"retry budget exhausted for demand {k}")
        v = int(rng.integers(params.vmin, params.vmax + 1))
        demands.append(Demand(s, t, v))
    name = (f"gen-n{n}-p{params.density:g}-k{params.demands}-v{params.vmin}_{params.vmax}"
            f"-s{params.slots}-seed{params.seed}")
    return Instance(graph, tuple(demands), params.slots, name)


def is_simple_path(inst: Instance, d: int, path: Sequence[int]) -> bool:
    g = inst.graph
    dem = inst.demands[d]
    if not path:
        return False
    node = dem.source
    visited = {node}
    for k in path:
        if not 0 <= k < g.m:
            return False
        t, h = g.arcs[k]
        if t != node or h in visited:
            return False
        visited.add(h)
        node = h
    return node == dem.target


def check_canonical_feasible(inst: Instance, sol: CanonicalSolution) -> tuple[bool, list[str]]:
    """Check paths, slot windows and pairwise non-overlap on shared arcs."""
    report: list[str] = []
    if len(sol.paths) != inst.n_demands or len(sol.starts) != inst.n_demands:
        return False, ["solution must have one entry per demand"]
    windows = []
    for d, dem in enumerate(inst.demands):
        if not is_simple_path(inst, d, sol.paths[d]):
            report.append(f"demand {d}: not a simple {dem.source}->{dem.target} path")
        lo, hi = sol.starts[d], sol.starts[d] + dem.volume - 1
        if lo < 1 or hi > inst.slots:
            report.append(f"demand {d}: slots [{lo},{hi}] outside [1,{inst.slots}]")
        windows.append((lo, hi))
    for d1 in range(inst.n_demands):
        for d2 in range(d1 + 1, inst.n_demands):
            shared = set(sol.paths[d1]) & set(sol.paths[d2])
            (a, b), (c, e) = windows[d1], windows[d2]
            if shared and a <= e and c <= b:
                report.append(f"demands {d1},{d2}: slots [{a},{b}] and [{c},{e}] overlap "
                              f"on arc {min(shared)}")
    return not report, report
