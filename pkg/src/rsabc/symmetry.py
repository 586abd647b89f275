"""Cut transformers from the slot, transit-node and endpoint symmetries of the model."""
from __future__ import annotations

from dataclasses import replace

from .instance import Instance
from .model import unravel, var_index
from .rows import Cut, LinearRow, make_row

COEF_TOL = 1e-12


class SymmetryError(ValueError):
    """A cut does not have the coefficient pattern a transform requires."""


def _split(cut):
    return (cut.row, cut) if isinstance(cut, Cut) else (cut, None)


def _wrap(row: LinearRow, original: Cut | None):
    return row if original is None else replace(original, row=row)


def mirror_slots(cut, slots: int):
    """Send the coefficient of slot s to slot slots - s + 1; rhs, sense and kind are kept."""
    row, orig = _split(cut)
    coeffs = []
    for idx, c in row.coeffs:
        s0 = idx % slots
        coeffs.append((idx - s0 + (slots - 1 - s0), c))
    return _wrap(make_row(coeffs, row.sense, row.rhs, row.tag), orig)


def _constant(inst: Instance, coef: dict, d: int, arcs, s: int, what: str) -> float:
    vals = [(e, coef.get(var_index(inst, d, e, s), 0.0)) for e in arcs]
    if not vals:
        return 0.0
    ref = vals[0][1]
    for e, v in vals[1:]:
        if abs(v - ref) > COEF_TOL:
            raise SymmetryError(f"coefficient not constant on {what}: demand {d}, slot {s}, arc {e}")
    return ref


def mirror_node_flow(cut, inst: Instance, j: int):
    """Swap the constant coefficients on the out-arcs and in-arcs of a transit node ``j``."""
    row, orig = _split(cut)
    for dem in inst.demands:
        if j in (dem.source, dem.target):
            raise SymmetryError(f"node {j} is an endpoint of a demand")
    g = inst.graph
    out_arcs, in_arcs = g.out_arcs(j), g.in_arcs(j)
    coef = row.as_dict()
    new = dict(coef)
    for d in range(inst.n_demands):
        for s in range(1, inst.slots + 1):
            alpha = _constant(inst, coef, d, out_arcs, s, f"out-arcs of {j}")
            beta = _constant(inst, coef, d, in_arcs, s, f"in-arcs of {j}")
            for e in in_arcs:
                new[var_index(inst, d, e, s)] = alpha
            for e in out_arcs:
                new[var_index(inst, d, e, s)] = beta
    return _wrap(make_row(new, row.sense, row.rhs, row.tag), orig)


def mirror_demand_endpoints(cut, inst: Instance, d: int):
    """Move the source-side coefficients of demand ``d`` to its target side and back."""
    row, orig = _split(cut)
    g = inst.graph
    dem = inst.demands[d]
    src_out, dst_in = g.out_arcs(dem.source), g.in_arcs(dem.target)
    zero_arcs = set(g.in_arcs(dem.source)) | set(g.out_arcs(dem.target))
    touching = zero_arcs | set(src_out) | set(dst_in)
    coef = row.as_dict()
    for idx, c in coef.items():
        dd, e, s = unravel(inst, idx)
        if abs(c) <= COEF_TOL or e not in touching:
            continue
        if dd != d:
            raise SymmetryError(f"demand {dd} has coefficient on arc {e} next to the endpoints of {d}")
        if e in zero_arcs and e not in src_out and e not in dst_in:
            raise SymmetryError(f"nonzero coefficient on arc {e}, slot {s}, which must be zero")
    new = dict(coef)
    for s in range(1, inst.slots + 1):
        alpha = _constant(inst, coef, d, src_out, s, "source out-arcs")
        beta = _constant(inst, coef, d, dst_in, s, "target in-arcs")
        for e in dst_in:
            new[var_index(inst, d, e, s)] = alpha
        for e in src_out:
            new[var_index(inst, d, e, s)] = beta
    return _wrap(make_row(new, row.sense, row.rhs, row.tag), orig)
