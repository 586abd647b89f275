"""Cut families and their separation routines."""
from .base import VIOLATION_TOL, CutContext, FamilySpec, separate_block, separate_family
from .registry import FAMILIES, FAMILY_TAGS, family_kind, resolve_families

__all__ = ["VIOLATION_TOL", "CutContext", "FamilySpec", "separate_block", "separate_family",
           "FAMILIES", "FAMILY_TAGS", "family_kind", "resolve_families"]
