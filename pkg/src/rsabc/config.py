"""Solver configuration, loadable from key=value files and overridable by flags."""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Mapping

from .cuts.registry import resolve_families
from .strategy import EFF, StrategyConfig, strategy_from_name


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_eps(items) -> dict[str, float]:
    """``["fam=0.5", "fam2=1"]`` or ``"fam=0.5,fam2=1"`` -> {fam: value}."""
    if isinstance(items, str):
        items = [p for p in items.split(",") if p.strip()]
    out = {}
    for item in items:
        if "=" not in item:
            raise ValueError(f"expected family=value, got {item!r}")
        tag, val = item.split("=", 1)
        tag = tag.strip()
        resolve_families([tag])
        v = float(val)
        if v < 0:
            raise ValueError(f"epsilon for {tag} must be non-negative")
        out[tag] = v
    return out


@dataclass
class SolverConfig:
    time_limit: float | None = None          # minutes; None means no limit
    strategy: str = EFF
    h: int = 5
    eps: dict[str, float] = field(default_factory=dict)
    families: tuple[str, ...] | None = None  # None enables every family
    seed: int = 0
    use_optimality_cuts: bool = True
    static_rows: bool = True
    presort: tuple[str, ...] | None = None
    random_call_prob: float = 0.1
    root_rounds: int = 10
    node_rounds: int = 2
    tailoff: float = 1e-4
    max_nodes: int | None = None
    cut_cap: int = 500
    max_structures: int = 200
    log_every: int = 100

    def __post_init__(self):
        self.strategy = strategy_from_name(self.strategy)
        if self.families is not None:
            self.families = tuple(resolve_families(self.families))
        if self.time_limit is not None and self.time_limit < 0:
            raise ValueError("time limit must be non-negative")
        self.strategy_config()

    def enabled_families(self) -> list[str]:
        return resolve_families(None) if self.families is None else list(self.families)

    def eps_for(self, tag: str) -> float:
        return self.eps.get(tag, 0.0)

    def strategy_config(self) -> StrategyConfig:
        return StrategyConfig(self.strategy, self.h, self.presort, self.random_call_prob, self.seed)

    def updated(self, **changes) -> "SolverConfig":
        return replace(self, **changes)

    @classmethod
    def from_mapping(cls, data: Mapping[str, str], base: "SolverConfig | None" = None) -> "SolverConfig":
        """Build from string values; ``eps.<family>`` keys set single thresholds."""
        cfg = base or cls()
        kw: dict = {}
        eps = dict(cfg.eps)
        types = {f.name: f.type for f in fields(cls)}
        for key, raw in data.items():
            key = key.strip().replace("-", "_")
            raw = str(raw).strip()
            if key.startswith("eps."):
                eps.update(parse_eps([f"{key[4:]}={raw}"]))
            elif key == "eps":
                eps.update(parse_eps(raw))
            elif key in ("families", "presort"):
                kw[key] = None if raw in ("", "all") and key == "families" else tuple(
                    resolve_families(raw) if key == "families" else raw.replace(",", " ").split())
            elif key in ("use_optimality_cuts", "static_rows"):
                kw[key] = _parse_bool(raw)
            elif key in ("time_limit",):
                kw[key] = None if raw.lower() in ("", "none") else float(raw)
            elif key in ("max_nodes",):
                kw[key] = None if raw.lower() in ("", "none") else int(raw)
            elif key in types:
                t = types[key]
                kw[key] = float(raw) if "float" in str(t) else int(raw) if "int" in str(t) else raw
            else:
                raise ValueError(f"unknown config key {key!r}")
        kw["eps"] = eps
        return replace(cfg, **kw)


def load_config_file(path, base: SolverConfig | None = None) -> SolverConfig:
    data = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        k, v = line.split("=", 1)
        data[k.strip()] = v.strip()
    return SolverConfig.from_mapping(data, base)
