"""Separator scheduling strategies and per-family effectiveness bookkeeping."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

BRUTE_FORCE, RND, EFF, EFF_RND, WEIGHTED = "BRUTE_FORCE", "RND", "EFF", "EFF_RND", "WEIGHTED"
STRATEGIES = (BRUTE_FORCE, RND, EFF, EFF_RND, WEIGHTED)
CLI_NAMES = {"brute-force": BRUTE_FORCE, "rnd": RND, "eff": EFF, "eff-rnd": EFF_RND,
             "weighted": WEIGHTED}


def strategy_from_name(name: str) -> str:
    key = name.strip()
    if key in CLI_NAMES:
        return CLI_NAMES[key]
    if key.upper().replace("-", "_") in STRATEGIES:
        return key.upper().replace("-", "_")
    raise ValueError(f"unknown strategy {name!r}; choose from {', '.join(CLI_NAMES)}")


@dataclass
class StrategyConfig:
    kind: str = EFF
    h: int = 5
    presort: tuple[str, ...] | None = None
    random_call_prob: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.kind not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.kind!r}")
        if self.h < 1:
            raise ValueError("h must be at least 1")
        if not 0.0 <= self.random_call_prob <= 1.0:
            raise ValueError("random_call_prob must lie in [0, 1]")


class EffectivenessStats:
    """Calls and cuts per family; the coefficient is always derived from the counters."""

    def __init__(self, families: Iterable[str]):
        self.calls: dict[str, int] = {f: 0 for f in families}
        self.cuts: dict[str, int] = {f: 0 for f in self.calls}

    def _check(self, family: str):
        if family not in self.calls:
            raise KeyError(f"unknown cut family {family!r}")

    def record_outcome(self, family: str, n_cuts: int) -> "EffectivenessStats":
        self._check(family)
        if n_cuts < 0:
            raise ValueError("cut count must be non-negative")
        self.calls[family] += 1
        self.cuts[family] += int(n_cuts)
        return self

    def coefficient(self, family: str) -> float:
        self._check(family)
        calls = self.calls[family]
        return self.cuts[family] / calls if calls else 0.0

    def reset(self):
        for f in self.calls:
            self.calls[f] = 0
            self.cuts[f] = 0

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["family", "calls", "cuts", "coefficient"])
            for f in self.calls:
                w.writerow([f, self.calls[f], self.cuts[f], f"{self.coefficient(f):.6f}"])


def load_presort(path) -> tuple[str, ...]:
    """Family order from a stats CSV (sorted by coefficient) or a plain one-tag-per-line file."""
    text = Path(path).read_text()
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if lines and lines[0].startswith("family"):
        rows = list(csv.DictReader(lines))
        rows.sort(key=lambda r: (-float(r["coefficient"]), r["family"]))
        return tuple(r["family"] for r in rows)
    return tuple(lines)


def sorted_by_effectiveness(stats: EffectivenessStats, families: Sequence[str]) -> list[str]:
    return sorted(families, key=lambda f: (-stats.coefficient(f), f))


class CallPlan:
    """Lazy sequence of separator calls for one cut round.

    Iterate to get the next family; call ``report(family, n_cuts)`` after each call.
    The plan stops once ``h`` distinct families produced cuts (except BRUTE_FORCE).
    """

    def __init__(self, config: StrategyConfig, stats: EffectivenessStats, families: Sequence[str],
                 rng: np.random.Generator):
        if not families:
            raise ValueError("at least one family must be enabled")
        self.config = config
        self.stats = stats
        self.rng = rng
        self.productive: set[str] = set()
        self.called: list[str] = []
        self._order = self._base_order(list(families))

    def _base_order(self, families: list[str]) -> list[str]:
        kind = self.config.kind
        if kind == BRUTE_FORCE:
            return families
        if kind == RND:
            return [families[i] for i in self.rng.permutation(len(families))]
        if self.config.presort is not None:
            rank = {f: k for k, f in enumerate(self.config.presort)}
            return sorted(families, key=lambda f: (rank.get(f, len(rank)), f))
        return sorted_by_effectiveness(self.stats, families)

    def done(self) -> bool:
        return self.config.kind != BRUTE_FORCE and len(self.productive) >= self.config.h

    def report(self, family: str, n_cuts: int):
        self.stats.record_outcome(family, n_cuts)
        if n_cuts > 0:
            self.productive.add(family)

    def __iter__(self) -> Iterator[str]:
        kind = self.config.kind
        remaining = list(self._order)
        if kind == WEIGHTED:
            coeffs = {f: self.stats.coefficient(f) for f in remaining}
            top = max(coeffs.values())
        while remaining and not self.done():
            if kind == EFF_RND and len(remaining) > 1 and self.rng.random() < self.config.random_call_prob:
                fam = remaining.pop(int(self.rng.integers(len(remaining))))
            else:
                fam = remaining.pop(0)
            if kind == WEIGHTED:
                p = 1.0 if top <= 0 else 0.1 + 0.9 * coeffs[fam] / top
                if self.rng.random() >= p:
                    continue
            self.called.append(fam)
            yield fam


def plan_calls(config: StrategyConfig, stats: EffectivenessStats, families: Sequence[str],
               rng: np.random.Generator | None = None) -> CallPlan:
    return CallPlan(config, stats, families, rng if rng is not None else np.random.default_rng(config.seed))
