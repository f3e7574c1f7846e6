"""Canonical ordering and serialization helpers.

Every user visible artifact (reports, certificates, instance files) is
emitted in a fixed canonical order so repeated runs are byte identical.
"""

from __future__ import annotations

import json
from typing import Iterable


def set_key(s: Iterable[str]) -> tuple[str, ...]:
    """Canonical key for a set of point or condition identifiers."""
    return tuple(sorted(s))


def family_key(family: Iterable[Iterable[str]]) -> tuple[tuple[str, ...], ...]:
    """Canonical key for a family of sets: member keys in sorted order."""
    return tuple(sorted(set_key(m) for m in family))


def sorted_sets(family: Iterable[frozenset]) -> tuple[frozenset, ...]:
    """Family members in canonical order, duplicates removed."""
    seen = {}
    for m in family:
        seen[set_key(m)] = frozenset(m)
    return tuple(seen[k] for k in sorted(seen))


def set_list(s: Iterable[str]) -> list[str]:
    """JSON friendly form of a set: a sorted list."""
    return sorted(s)


def family_list(family: Iterable[Iterable[str]]) -> list[list[str]]:
    """JSON friendly form of a family of sets."""
    return [list(k) for k in sorted(set_key(m) for m in family)]


def canonical_json(obj) -> str:
    """Dump with sorted keys and no incidental whitespace."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def canonical_json_pretty(obj) -> str:
    """Dump with sorted keys, indented for human reading."""
    return json.dumps(obj, sort_keys=True, indent=2)
