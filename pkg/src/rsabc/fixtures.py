"""Hand-written micro instances used by tests, the CLI and the benchmark suites."""
from __future__ import annotations

from .instance import Instance, make_instance, parse_instance

_TEXTS = {
    # a=0, b=1, c=2; arcs ab, bc, ac
    "INST-A": """\
rsa 3 3 1 3
arc 0 1
arc 1 2
arc 0 2
demand 0 2 2
""",
    "INST-B": """\
rsa 2 1 2 3
arc 0 1
demand 0 1 2
demand 0 1 1
""",
    "INST-C": """\
rsa 2 1 2 2
arc 0 1
demand 0 1 2
demand 0 1 1
""",
    # two disjoint 2-arc routes 0-1-3 and 0-2-3; volumes 2 and 3 cannot share an arc
    "DIAMOND-2D": """\
rsa 4 4 2 4
arc 0 1
arc 1 3
arc 0 2
arc 2 3
demand 0 3 2
demand 0 3 3
""",
}


def ring(n: int, slots: int, demands, bidirectional: bool = True, name: str = "") -> Instance:
    arcs = [(i, (i + 1) % n) for i in range(n)]
    if bidirectional:
        arcs += [((i + 1) % n, i) for i in range(n)]
    return make_instance(n, arcs, demands, slots, name or f"ring{n}")


def grid(rows: int, cols: int, slots: int, demands, name: str = "") -> Instance:
    """Bidirected rows x cols grid; node id = r * cols + c."""
    arcs = []
    for r in range(rows):
        for c in range(cols):
            u = r * cols + c
            if c + 1 < cols:
                arcs += [(u, u + 1), (u + 1, u)]
            if r + 1 < rows:
                arcs += [(u, u + cols), (u + cols, u)]
    return make_instance(rows * cols, arcs, demands, slots, name or f"grid{rows}x{cols}")


def _ring4() -> Instance:
    return ring(4, 4, [(0, 2, 2), (1, 3, 2), (0, 1, 1)], name="RING-4")


def _grid22() -> Instance:
    return grid(2, 2, 4, [(0, 3, 2), (1, 2, 2), (0, 1, 1)], name="GRID-2x2")


_BUILDERS = {"RING-4": _ring4, "GRID-2x2": _grid22}

NAMES = tuple(_TEXTS) + tuple(_BUILDERS)


def fixture(name: str) -> Instance:
    if name in _TEXTS:
        return parse_instance(_TEXTS[name], name=name)
    if name in _BUILDERS:
        return _BUILDERS[name]()
    raise KeyError(f"unknown fixture {name!r}")


def fixture_text(name: str) -> str:
    return _TEXTS[name]
