"""Finitized selection principle solvers over finite spaces.

A selection problem fixes a finite space, a sequence of open covers (one
per level), a floor M, and a mode.  Picks below the floor are free moves
that never count toward covering; the covering requirement quantifies over
levels at or above the floor only.

Modes:
  rothberger             one member per level; members picked at or above
                         the floor must cover the space.
  menger                 one finite subfamily per level; their union at or
                         above the floor must cover the space.  The solver
                         minimizes the total number of chosen sets exactly
                         when at most 12 candidate sets are in play and
                         greedily beyond that.
  selective-screenability
                         one pairwise disjoint family of nonempty open
                         sets per level, each member inside some cover
                         member of that level; the families at or above
                         the floor must jointly cover the space.

All solvers are deterministic: they return the canonically least solution
for a fixed canonical order on members and families, or None when no
solution exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .canon import family_key, sorted_sets
from .errors import DataError
from .topology import FiniteSpace, covers

MODES = ("rothberger", "menger", "selective-screenability")

EXACT_MENGER_POOL = 12


@dataclass(frozen=True)
class SelectionProblem:
    space: FiniteSpace
    covers: tuple[tuple[frozenset[str], ...], ...]
    floor: int
    mode: str


def make_selection_problem(
    space: FiniteSpace,
    level_covers: Sequence[Iterable[frozenset[str]]],
    floor: int,
    mode: str,
) -> SelectionProblem:
    """Validate covers and package a problem.

    Every level must be an open cover of the space.  The floor may point
    past the last level; solvers then report unsolvability.
    """
    if mode not in MODES:
        raise DataError(f"unknown mode {mode!r}; expected one of {MODES}")
    if floor < 0:
        raise DataError(f"floor must be nonnegative, got {floor}")
    if not level_covers:
        raise DataError("selection problem needs at least one level")
    packaged = []
    for n, level in enumerate(level_covers):
        members = sorted_sets(frozenset(u) for u in level)
        for u in members:
            if not space.is_open(u):
                raise DataError(f"level {n} member {sorted(u)} is not open")
        if not covers(space, members):
            raise DataError(f"level {n} does not cover the space")
        packaged.append(members)
    return SelectionProblem(space, tuple(packaged), floor, mode)


# -- rothberger ---------------------------------------------------------------


def rothberger_select(problem: SelectionProblem) -> tuple[frozenset[str], ...] | None:
    """One pick per level, canonically least solution first.

    Below the floor the canonically least member is fixed; at or above it
    the solver backtracks over members in canonical order.
    """
    space, level_covers, floor = problem.space, problem.covers, problem.floor
    n_levels = len(level_covers)
    if floor >= n_levels:
        return None
    suffix_union: list[frozenset[str]] = [frozenset()] * (n_levels + 1)
    for i in range(n_levels - 1, -1, -1):
        own = frozenset().union(*level_covers[i]) if i >= floor else frozenset()
        suffix_union[i] = suffix_union[i + 1] | own

    picks: list[frozenset[str]] = []

    def extend(i: int, uncovered: frozenset[str]) -> bool:
        if i == n_levels:
            return not uncovered
        if not uncovered <= suffix_union[i]:
            return False
        if i < floor:
            picks.append(level_covers[i][0])
            if extend(i + 1, uncovered):
                return True
            picks.pop()
            return False
        for u in level_covers[i]:
            picks.append(u)
            if extend(i + 1, uncovered - u):
                return True
            picks.pop()
        return False

    if extend(0, space.points):
        return tuple(picks)
    return None


def check_rothberger(problem: SelectionProblem, picks: Sequence[frozenset[str]]) -> tuple[bool, str | None]:
    if len(picks) != len(problem.covers):
        return False, f"expected {len(problem.covers)} picks, got {len(picks)}"
    for i, u in enumerate(picks):
        if frozenset(u) not in set(problem.covers[i]):
            return False, f"level {i} pick is not a cover member"
    hit = frozenset().union(*(frozenset(u) for i, u in enumerate(picks) if i >= problem.floor)) \
        if problem.floor < len(picks) else frozenset()
    if not problem.space.points <= hit:
        missing = sorted(problem.space.points - hit)
        return False, f"points not covered at or above the floor: {missing}"
    return True, None


# -- menger -------------------------------------------------------------------


def menger_select(problem: SelectionProblem) -> tuple[tuple[frozenset[str], ...], ...] | None:
    """One finite subfamily per level; total size minimized.

    Exact minimum set cover over the pooled (level, member) pairs when the
    pool has at most EXACT_MENGER_POOL entries, greedy otherwise.  Levels
    below the floor get the empty family.
    """
    space, level_covers, floor = problem.space, problem.covers, problem.floor
    n_levels = len(level_covers)
    pool: list[tuple[int, frozenset[str]]] = [
        (i, u) for i in range(floor, n_levels) for u in level_covers[i]
    ]
    if not pool or not space.points <= frozenset().union(*(u for _, u in pool)):
        return None
    chosen: list[tuple[int, frozenset[str]]] | None = None
    if len(pool) <= EXACT_MENGER_POOL:
        for size in range(len(pool) + 1):
            for combo in combinations(range(len(pool)), size):
                hit = frozenset().union(*(pool[j][1] for j in combo)) if combo else frozenset()
                if space.points <= hit:
                    chosen = [pool[j] for j in combo]
                    break
            if chosen is not None:
                break
    else:
        uncovered = set(space.points)
        chosen = []
        while uncovered:
            best = max(pool, key=lambda entry: (len(uncovered & entry[1]), ))
            if not uncovered & best[1]:
                return None
            chosen.append(best)
            uncovered -= best[1]
    families: list[tuple[frozenset[str], ...]] = [() for _ in range(n_levels)]
    for i, u in chosen:
        families[i] = families[i] + (u,)
    return tuple(sorted_sets(f) for f in families)


def check_menger(problem: SelectionProblem, families: Sequence[Sequence[frozenset[str]]]) -> tuple[bool, str | None]:
    if len(families) != len(problem.covers):
        return False, f"expected {len(problem.covers)} families, got {len(families)}"
    for i, fam in enumerate(families):
        allowed = set(problem.covers[i])
        for u in fam:
            if frozenset(u) not in allowed:
                return False, f"level {i} family member is not a cover member"
    hit: set[str] = set()
    for i, fam in enumerate(families):
        if i >= problem.floor:
            for u in fam:
                hit.update(u)
    if not problem.space.points <= hit:
        missing = sorted(problem.space.points - hit)
        return False, f"points not covered at or above the floor: {missing}"
    return True, None


# -- selective screenability --------------------------------------------------


def _disjoint_families(candidates: Sequence[frozenset[str]]) -> list[tuple[frozenset[str], ...]]:
    """All pairwise disjoint subfamilies of the candidates, canonically sorted
    by (size, member keys).  The empty family comes first."""
    out: list[tuple[frozenset[str], ...]] = []

    def extend(start: int, chosen: list[frozenset[str]]) -> None:
        out.append(tuple(chosen))
        for j in range(start, len(candidates)):
            c = candidates[j]
            if all(c.isdisjoint(v) for v in chosen):
                chosen.append(c)
                extend(j + 1, chosen)
                chosen.pop()

    extend(0, [])
    return sorted(out, key=lambda fam: (len(fam), family_key(fam)))


def screenability_select(problem: SelectionProblem) -> tuple[tuple[frozenset[str], ...], ...] | None:
    """One disjoint open refining family per level, canonically least first.

    Candidates at a level are the nonempty open sets contained in some
    cover member of that level.  Levels below the floor get the empty
    family.
    """
    space, level_covers, floor = problem.space, problem.covers, problem.floor
    n_levels = len(level_covers)
    if floor >= n_levels:
        return None
    opens = [v for v in space.opens if v]
    level_candidates: list[list[frozenset[str]]] = []
    level_families: list[list[tuple[frozenset[str], ...]]] = []
    for i in range(n_levels):
        cands = [v for v in opens if any(v <= u for u in level_covers[i])]
        level_candidates.append(cands)
        level_families.append(_disjoint_families(cands) if i >= floor else [()])
    suffix_union: list[frozenset[str]] = [frozenset()] * (n_levels + 1)
    for i in range(n_levels - 1, -1, -1):
        own = frozenset().union(*level_candidates[i]) if i >= floor and level_candidates[i] else frozenset()
        suffix_union[i] = suffix_union[i + 1] | own

    chosen: list[tuple[frozenset[str], ...]] = []
    dead: set[tuple[int, frozenset[str]]] = set()

    def extend(i: int, uncovered: frozenset[str]) -> bool:
        if i == n_levels:
            return not uncovered
        if not uncovered <= suffix_union[i] or (i, uncovered) in dead:
            return False
        for fam in level_families[i]:
            chosen.append(fam)
            gained = frozenset().union(*fam) if fam and i >= floor else frozenset()
            if extend(i + 1, uncovered - gained):
                return True
            chosen.pop()
        dead.add((i, uncovered))
        return False

    if extend(0, space.points):
        return tuple(chosen)
    return None


def check_screenability(problem: SelectionProblem, families: Sequence[Sequence[frozenset[str]]]) -> tuple[bool, str | None]:
    if len(families) != len(problem.covers):
        return False, f"expected {len(problem.covers)} families, got {len(families)}"
    for i, fam in enumerate(families):
        members = [frozenset(v) for v in fam]
        for v in members:
            if not v:
                return False, f"level {i} has an empty member"
            if not problem.space.is_open(v):
                return False, f"level {i} member {sorted(v)} is not open"
            if not any(v <= u for u in problem.covers[i]):
                return False, f"level {i} member {sorted(v)} refines no cover member"
        for a, b in combinations(members, 2):
            if not a.isdisjoint(b):
                return False, f"level {i} members overlap: {sorted(a)} and {sorted(b)}"
    hit: set[str] = set()
    for i, fam in enumerate(families):
        if i >= problem.floor:
            for v in fam:
                hit.update(v)
    if not problem.space.points <= hit:
        missing = sorted(problem.space.points - hit)
        return False, f"points not covered at or above the floor: {missing}"
    return True, None


def solve_selection(problem: SelectionProblem):
    """Dispatch to the mode's solver."""
    if problem.mode == "rothberger":
        return rothberger_select(problem)
    if problem.mode == "menger":
        return menger_select(problem)
    if problem.mode == "selective-screenability":
        return screenability_select(problem)
    raise DataError(f"unknown mode {problem.mode!r}")


def check_selection(problem: SelectionProblem, solution) -> tuple[bool, str | None]:
    """Independent validity check for a solver output."""
    if problem.mode == "rothberger":
        return check_rothberger(problem, solution)
    if problem.mode == "menger":
        return check_menger(problem, solution)
    if problem.mode == "selective-screenability":
        return check_screenability(problem, solution)
    raise DataError(f"unknown mode {problem.mode!r}")
