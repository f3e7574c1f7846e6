"""Posets of finite partial 0/1 assignments on a small index set.

A condition is a partial function from the index set to {0, 1}; p <= q means
p extends q as a function.  The empty assignment is the top condition and
the total assignments are the atoms.  Condition literals look like
"0:1,2:0" (index:value entries sorted by index, comma separated); the empty
assignment is the empty string.
"""

from __future__ import annotations

from itertools import combinations, product
from typing import Iterable, Mapping

from .bounds import DEFAULT_LIMITS, Limits
from .errors import DataError, ResourceError
from .poset import Poset, Stratification, make_stratification


def format_condition(assignment: Mapping[int, int]) -> str:
    return ",".join(f"{i}:{assignment[i]}" for i in sorted(assignment))


def parse_condition(literal: str) -> dict[int, int]:
    """Parse a condition literal; raises DataError on malformed input."""
    if literal == "":
        return {}
    assignment: dict[int, int] = {}
    for part in literal.split(","):
        idx, sep, val = part.partition(":")
        if not sep:
            raise DataError(f"bad condition entry {part!r} in {literal!r}")
        try:
            i = int(idx)
            v = int(val)
        except ValueError as exc:
            raise DataError(f"bad condition entry {part!r} in {literal!r}") from exc
        if v not in (0, 1):
            raise DataError(f"condition value must be 0 or 1, got {v} in {literal!r}")
        if i in assignment:
            raise DataError(f"duplicate index {i} in {literal!r}")
        assignment[i] = v
    return assignment


class CohenPoset:
    """All partial 0/1 assignments on a finite index set, strongest = largest.

    Canonical condition order: by support size, then support tuple, then
    value tuple, so the top condition comes first and atoms come last.
    """

    def __init__(self, indices: Iterable[int], limits: Limits = DEFAULT_LIMITS):
        idx = sorted(set(indices))
        if not idx:
            raise DataError("index set must be nonempty")
        if any(not isinstance(i, int) for i in idx):
            raise DataError("indices must be integers")
        if len(idx) > limits.max_indices:
            raise ResourceError(f"index set capped at {limits.max_indices} entries, got {len(idx)}")
        self.indices: tuple[int, ...] = tuple(idx)
        literals: list[str] = []
        assignments: dict[str, dict[int, int]] = {}
        for size in range(len(idx) + 1):
            for support in combinations(idx, size):
                for values in product((0, 1), repeat=size):
                    assignment = dict(zip(support, values))
                    literal = format_condition(assignment)
                    literals.append(literal)
                    assignments[literal] = assignment
        pairs = []
        for literal, assignment in assignments.items():
            support = sorted(assignment)
            for size in range(len(support)):
                for sub in combinations(support, size):
                    pairs.append((literal, format_condition({i: assignment[i] for i in sub})))
        self.poset = Poset(literals, pairs)
        self._assignments = assignments

    def assignment(self, literal: str) -> dict[int, int]:
        if literal not in self._assignments:
            raise DataError(f"unknown condition: {literal!r}")
        return dict(self._assignments[literal])

    def support(self, literal: str) -> frozenset[int]:
        if literal not in self._assignments:
            raise DataError(f"unknown condition: {literal!r}")
        return frozenset(self._assignments[literal])

    def stratification(self) -> Stratification:
        """Level n holds the conditions with support size at most n.

        Stabilizes exactly at the size of the index set.
        """
        levels = [
            [p for p in self.poset.elements if len(self._assignments[p]) <= n]
            for n in range(len(self.indices) + 1)
        ]
        return make_stratification(self.poset, levels)
