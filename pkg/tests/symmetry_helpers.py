"""Seeded random cuts with the coefficient patterns required by the symmetry transforms.

Each cut gets the tightest valid rhs: the maximum of its lhs over all canonical solutions.
"""
import numpy as np

from rsabc.model import var_index
from rsabc.rows import LE, make_row
from rsabc.oracle import audit_rows


def _tight(table, coef: dict, tag: str):
    row = make_row(coef, LE, 0.0, tag)
    vec = np.zeros(table.inst.n_vars)
    for i, c in row.coeffs:
        vec[i] = c
    lhs = table.embeddings @ vec
    return make_row(coef, LE, float(lhs.max()), tag)


def _noise(inst, rng, skip_arcs=(), density=0.3):
    coef = {}
    for d in range(inst.n_demands):
        for e in range(inst.graph.m):
            if e in skip_arcs:
                continue
            for s in range(1, inst.slots + 1):
                if rng.random() < density:
                    coef[var_index(inst, d, e, s)] = float(rng.integers(-2, 3))
    return coef


def transit_nodes(inst):
    ends = {x for dem in inst.demands for x in (dem.source, dem.target)}
    g = inst.graph
    return [j for j in range(inst.graph.n)
            if j not in ends and g.in_arcs(j) and g.out_arcs(j)]


def slot_cut(table, rng):
    return _tight(table, _noise(table.inst, rng), "randomSlot")


def node_flow_cut(table, rng, j):
    inst, g = table.inst, table.inst.graph
    outs, ins = g.out_arcs(j), g.in_arcs(j)
    coef = _noise(inst, rng, skip_arcs=set(outs) | set(ins))
    for d in range(inst.n_demands):
        for s in range(1, inst.slots + 1):
            a, b = float(rng.integers(-2, 3)), float(rng.integers(-2, 3))
            for e in outs:
                coef[var_index(inst, d, e, s)] = a
            for e in ins:
                coef[var_index(inst, d, e, s)] = b
    return _tight(table, coef, "randomNodeFlow")


def endpoint_cut(table, rng, d):
    inst, g = table.inst, table.inst.graph
    dem = inst.demands[d]
    outs, ins = g.out_arcs(dem.source), g.in_arcs(dem.target)
    touching = set(outs) | set(ins) | set(g.in_arcs(dem.source)) | set(g.out_arcs(dem.target))
    coef = _noise(inst, rng, skip_arcs=touching)
    shared = bool(set(outs) & set(ins))
    for s in range(1, inst.slots + 1):
        a = float(rng.integers(-2, 3))
        b = a if shared else float(rng.integers(-2, 3))
        for e in outs:
            coef[var_index(inst, d, e, s)] = a
        for e in ins:
            coef[var_index(inst, d, e, s)] = b
    return _tight(table, coef, "randomEndpoint")


def lhs_values(table, row):
    vec = np.zeros(table.inst.n_vars)
    for i, c in row.coeffs:
        vec[i] = c
    return table.embeddings @ vec


def holds_everywhere(table, row) -> bool:
    return bool(audit_rows(table, [row]).all())


def mirror_audit(tables, transform: str, n_cuts: int, seed: int):
    """Generate ``n_cuts`` pattern cuts round-robin over ``tables`` and audit their mirrors.

    Returns (cuts checked, mirrored cuts failing the audit, cuts whose lhs profile changed).
    """
    from rsabc.symmetry import mirror_demand_endpoints, mirror_node_flow, mirror_slots

    rng = np.random.default_rng(seed)
    pool = [t for t in tables if t.solutions]
    if transform == "node_flow":
        pool = [t for t in pool if transit_nodes(t.inst)]
    checked = failures = changed = 0
    while checked < n_cuts:
        table = pool[checked % len(pool)]
        inst = table.inst
        if transform == "slots":
            row = slot_cut(table, rng)
            mirrored = mirror_slots(row, inst.slots)
            same = np.allclose(np.sort(lhs_values(table, row)), np.sort(lhs_values(table, mirrored)))
        elif transform == "node_flow":
            nodes = transit_nodes(inst)
            j = nodes[int(rng.integers(len(nodes)))]
            row = node_flow_cut(table, rng, j)
            mirrored = mirror_node_flow(row, inst, j)
            same = np.allclose(lhs_values(table, row), lhs_values(table, mirrored))
        else:
            d = int(rng.integers(inst.n_demands))
            row = endpoint_cut(table, rng, d)
            mirrored = mirror_demand_endpoints(row, inst, d)
            same = np.allclose(lhs_values(table, row), lhs_values(table, mirrored))
        assert holds_everywhere(table, row)
        checked += 1
        failures += not holds_everywhere(table, mirrored)
        changed += not same
    return checked, failures, changed
