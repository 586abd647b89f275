"""Sparse linear rows over the u-variables, cuts, and vectorised row blocks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp

LE, EQ, GE = "<=", "=", ">="
_SENSE_CODE = {LE: 1, EQ: 0, GE: -1}
_CODE_SENSE = {1: LE, 0: EQ, -1: GE}

VALID, EQUATION, OPTIMALITY = "valid", "equation", "optimality"
KINDS = (VALID, EQUATION, OPTIMALITY)


@dataclass(frozen=True)
class LinearRow:
    coeffs: tuple[tuple[int, float], ...]
    sense: str
    rhs: float
    tag: str = ""

    def key(self):
        return (self.coeffs, self.sense, self.rhs)

    @property
    def indices(self) -> np.ndarray:
        return np.fromiter((i for i, _ in self.coeffs), dtype=np.int64, count=len(self.coeffs))

    @property
    def values(self) -> np.ndarray:
        return np.fromiter((c for _, c in self.coeffs), dtype=float, count=len(self.coeffs))

    def lhs(self, point) -> float:
        if not self.coeffs:
            return 0.0
        return float(np.dot(self.values, np.asarray(point, float)[self.indices]))

    def violation(self, point) -> float:
        return violation_of(self.lhs(point), self.sense, self.rhs)

    def as_dict(self) -> dict[int, float]:
        return dict(self.coeffs)


def violation_of(lhs: float, sense: str, rhs: float) -> float:
    if sense == LE:
        return max(0.0, lhs - rhs)
    if sense == GE:
        return max(0.0, rhs - lhs)
    return abs(lhs - rhs)


def make_row(coeffs: Mapping[int, float] | Iterable[tuple[int, float]], sense: str, rhs: float,
             tag: str = "") -> LinearRow:
    if sense not in _SENSE_CODE:
        raise ValueError(f"bad sense {sense!r}")
    merged: dict[int, float] = {}
    items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
    for i, c in items:
        merged[int(i)] = merged.get(int(i), 0.0) + float(c)
    clean = tuple(sorted((i, c) for i, c in merged.items() if c != 0.0))
    for _, c in clean:
        if not np.isfinite(c):
            raise ValueError("non-finite coefficient")
    return LinearRow(clean, sense, float(rhs), tag)


def evaluate_row(row: LinearRow, point) -> tuple[float, float]:
    """Return (lhs, violation) of ``row`` at ``point``."""
    point = np.asarray(point, float)
    if row.coeffs and (row.coeffs[-1][0] >= len(point) or row.coeffs[0][0] < 0):
        raise IndexError("row index out of range for point")
    lhs = row.lhs(point)
    return lhs, violation_of(lhs, row.sense, row.rhs)


@dataclass(frozen=True)
class Cut:
    row: LinearRow
    kind: str
    violation: float = 0.0

    @property
    def family(self) -> str:
        return self.row.tag


def redundant_in_box(coeffs: Mapping[int, float], sense: str, rhs: float, tol: float = 1e-12) -> bool:
    """True if the row holds for every point of the unit box."""
    pos = sum(c for c in coeffs.values() if c > 0)
    neg = sum(c for c in coeffs.values() if c < 0)
    if sense == LE:
        return pos <= rhs + tol
    if sense == GE:
        return neg >= rhs - tol
    return not any(coeffs.values()) and abs(rhs) <= tol


class RowBlock:
    """A family's candidate rows stacked into one CSR matrix for fast separation."""

    def __init__(self, tag: str, n: int, matrix: sp.csr_matrix, rhs: np.ndarray,
                 senses: np.ndarray, groups: np.ndarray):
        self.tag = tag
        self.n = n
        self.matrix = matrix
        self.rhs = rhs
        self.senses = senses
        self.groups = groups

    def __len__(self):
        return self.matrix.shape[0]

    def lhs(self, point) -> np.ndarray:
        return self.matrix @ np.asarray(point, float)

    def violations(self, point) -> np.ndarray:
        lhs = self.lhs(point)
        diff = lhs - self.rhs
        return np.where(self.senses == 1, np.maximum(diff, 0.0),
                        np.where(self.senses == -1, np.maximum(-diff, 0.0), np.abs(diff)))

    def row(self, k: int) -> LinearRow:
        lo, hi = self.matrix.indptr[k], self.matrix.indptr[k + 1]
        coeffs = tuple(zip(self.matrix.indices[lo:hi].tolist(), self.matrix.data[lo:hi].tolist()))
        return LinearRow(tuple(sorted(coeffs)), _CODE_SENSE[int(self.senses[k])],
                         float(self.rhs[k]), self.tag)

    def rows(self) -> list[LinearRow]:
        return [self.row(k) for k in range(len(self))]


class RowBuilder:
    def __init__(self, tag: str, n: int, drop_redundant: bool = True):
        self.tag = tag
        self.n = n
        self.drop_redundant = drop_redundant
        self._seen: set = set()
        self._indptr = [0]
        self._indices: list[int] = []
        self._data: list[float] = []
        self._rhs: list[float] = []
        self._senses: list[int] = []
        self._groups: list[int] = []

    def add(self, coeffs: Mapping[int, float], sense: str, rhs: float, group: int = -1) -> bool:
        clean = {i: c for i, c in coeffs.items() if c != 0.0}
        if self.drop_redundant and redundant_in_box(clean, sense, rhs):
            return False
        items = tuple(sorted(clean.items()))
        key = (items, sense, float(rhs))
        if key in self._seen:
            return False
        self._seen.add(key)
        for i, c in items:
            self._indices.append(i)
            self._data.append(c)
        self._indptr.append(len(self._indices))
        self._rhs.append(float(rhs))
        self._senses.append(_SENSE_CODE[sense])
        self._groups.append(group)
        return True

    def add_row(self, row: LinearRow, group: int = -1) -> bool:
        return self.add(dict(row.coeffs), row.sense, row.rhs, group)

    def __len__(self):
        return len(self._rhs)

    def build(self) -> RowBlock:
        k = len(self._rhs)
        mat = sp.csr_matrix((np.array(self._data, float), np.array(self._indices, np.int64),
                             np.array(self._indptr, np.int64)), shape=(k, self.n))
        return RowBlock(self.tag, self.n, mat, np.array(self._rhs, float),
                        np.array(self._senses, np.int8), np.array(self._groups, np.int64))


def rows_to_csr(rows: list[LinearRow], n: int) -> sp.csr_matrix:
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for r in rows:
        for i, c in r.coeffs:
            indices.append(i)
            data.append(c)
        indptr.append(len(indices))
    return sp.csr_matrix((np.array(data, float), np.array(indices, np.int64),
                          np.array(indptr, np.int64)), shape=(len(rows), n))


def format_row(row: LinearRow, unravel=None) -> str:
    terms = []
    for i, c in row.coeffs:
        name = "u[%d,%d,%d]" % unravel(i) if unravel else f"x{i}"
        terms.append(f"{c:g}*{name}")
    body = " + ".join(terms) if terms else "0"
    return f"{row.tag}: {body} {row.sense} {row.rhs:g}"
