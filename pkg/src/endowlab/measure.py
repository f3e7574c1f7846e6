"""Finite measure algebras: nonempty sets of length-k bit strings.

A condition is a nonempty subset of the 2^k point cube, ordered by
inclusion (smaller set = stronger condition); the full cube is the top and
the singletons are the atoms.  The measure of a cell is its size over 2^k,
kept exact as a Fraction.  Cell literals list the member bit strings sorted
and comma separated, for example "00,01".
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from typing import Iterable

from .bounds import DEFAULT_LIMITS, Limits
from .errors import DataError, ResourceError
from .poset import Poset, Stratification, make_stratification


def format_cell(cell: Iterable[str]) -> str:
    return ",".join(sorted(cell))


def parse_cell(literal: str, k: int) -> frozenset[str]:
    """Parse a cell literal for the k cube; raises DataError on bad input."""
    if literal == "":
        raise DataError("cell must be nonempty")
    members = literal.split(",")
    for m in members:
        if len(m) != k or any(c not in "01" for c in m):
            raise DataError(f"bad cube point {m!r} for k={k}")
    if len(set(members)) != len(members):
        raise DataError(f"duplicate cube point in {literal!r}")
    return frozenset(members)


class MeasurePoset:
    """All nonempty cells of the k cube under inclusion, with exact measure.

    Canonical condition order: by descending measure, then sorted member
    tuple, so the top condition comes first and atoms come last.  A dense
    extensional order table caps k at the configured limit (default 3,
    already 255 conditions); raise the limit only if you accept the memory
    cost.
    """

    def __init__(self, k: int, limits: Limits = DEFAULT_LIMITS):
        if not isinstance(k, int) or k < 0:
            raise DataError(f"k must be a nonnegative integer, got {k!r}")
        if k > limits.max_k:
            raise ResourceError(f"measure algebra exponent capped at {limits.max_k}, got {k}")
        self.k = k
        self.points: tuple[str, ...] = tuple("".join(bits) for bits in product("01", repeat=k))
        cells: list[frozenset[str]] = []
        for size in range(len(self.points), 0, -1):
            for combo in combinations(self.points, size):
                cells.append(frozenset(combo))
        literals = [format_cell(c) for c in cells]
        cell_of = dict(zip(literals, cells))
        literal_of = {c: lit for lit, c in cell_of.items()}
        pairs = []
        for literal, cell in cell_of.items():
            members = sorted(cell)
            for size in range(1, len(members)):
                for sub in combinations(members, size):
                    pairs.append((literal_of[frozenset(sub)], literal))
        self.poset = Poset(literals, pairs)
        self._cells = cell_of

    def cell(self, literal: str) -> frozenset[str]:
        if literal not in self._cells:
            raise DataError(f"unknown condition: {literal!r}")
        return self._cells[literal]

    def measure(self, literal: str) -> Fraction:
        return Fraction(len(self.cell(literal)), 2 ** self.k)

    def stratification(self) -> Stratification:
        """Level n holds the cells of measure at least 2^-n.

        Stabilizes exactly at k: the singletons enter last.
        """
        levels = [
            [p for p in self.poset.elements if self.measure(p) >= Fraction(1, 2 ** n)]
            for n in range(self.k + 1)
        ]
        return make_stratification(self.poset, levels)


def measure_endowment_member(algebra: MeasurePoset, n: int, conditions: Iterable[str]) -> bool:
    """Membership test: an antichain whose total measure exceeds 1 - 2^-n.

    The bound is strict.  Any antichain passing it meets every condition of
    measure at least 2^-n: the cells left uncovered have total measure below
    2^-n, too small to swallow such a condition.  Non antichain input is
    rejected.
    """
    if n < 0:
        raise DataError(f"level must be nonnegative, got {n}")
    items = frozenset(conditions)
    if not algebra.poset.is_antichain(items):
        raise DataError("membership test needs an antichain")
    total = sum((algebra.measure(p) for p in items), Fraction(0))
    return total > 1 - Fraction(1, 2 ** n)


def extract_measure_endowment(algebra: MeasurePoset, n: int, antichain: Iterable[str]) -> frozenset[str]:
    """Greedy member extraction from a maximal antichain.

    Takes cells largest first (canonical order breaks ties) until the total
    measure strictly exceeds 1 - 2^-n.  A maximal antichain in this algebra
    partitions the cube, so its total is exactly 1 and the prefix always
    exists.
    """
    if n < 0:
        raise DataError(f"level must be nonnegative, got {n}")
    items = frozenset(antichain)
    if not algebra.poset.is_maximal_antichain(items):
        raise DataError("extraction needs a maximal antichain")
    ordered = sorted(items, key=lambda p: (-algebra.measure(p), tuple(sorted(algebra.cell(p)))))
    chosen: list[str] = []
    total = Fraction(0)
    bound = 1 - Fraction(1, 2 ** n)
    for p in ordered:
        if total > bound:
            break
        chosen.append(p)
        total += algebra.measure(p)
    if total <= bound:
        raise DataError("maximal antichain has total measure at most the bound; not a partition")
    return frozenset(chosen)
