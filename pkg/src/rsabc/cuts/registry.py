"""Every separable family by tag, in a fixed order used as the default call order."""
from __future__ import annotations

from . import contiguity, flow, nonoverlap
from .base import FamilySpec

FAMILIES: dict[str, FamilySpec] = {}
for _mod in (flow, contiguity, nonoverlap):
    for _tag, _kind, _build, _sampled in _mod.FAMILY_SPECS:
        FAMILIES[_tag] = FamilySpec(_tag, _kind, _build, _sampled, _mod.__name__.rsplit(".", 1)[-1])

FAMILY_TAGS: tuple[str, ...] = tuple(FAMILIES)


def family_kind(tag: str) -> str:
    try:
        return FAMILIES[tag].kind
    except KeyError:
        raise KeyError(f"unknown cut family {tag!r}") from None


def resolve_families(names) -> list[str]:
    """Expand a list of tags or the words 'all' / 'none' / a module name."""
    if names is None:
        return list(FAMILY_TAGS)
    if isinstance(names, str):
        names = [n for n in names.replace(",", " ").split() if n]
    out: list[str] = []
    for n in names:
        if n == "all":
            out.extend(FAMILY_TAGS)
        elif n == "none":
            continue
        elif n in ("flow", "contiguity", "nonoverlap"):
            out.extend(t for t, s in FAMILIES.items() if s.module == n)
        elif n in FAMILIES:
            out.append(n)
        else:
            raise KeyError(f"unknown cut family {n!r}")
    return list(dict.fromkeys(out))
