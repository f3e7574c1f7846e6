"""Endowment families and their verification.

An endowment family assigns to each level n a collection of finite
antichains.  The weak property asks that every maximal antichain contains a
member hitting every condition of the level (clause by clause: members are
antichains; extraction from a maximal antichain yields a member inside it;
every level-n condition is compatible with some member element).  The full
property additionally asks that level-n members combine: any n of them and
any level-n condition admit a common extension scheme.

The verifier is generic over the family interface, so the same code checks
the staged construction on partial assignment posets, the measure bound
family, the trivial maximal antichain family, and the adversarial singleton
family used as a negative control.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable

from .canon import set_list
from .cohen import CohenPoset
from .errors import DataError, ResourceError
from .measure import MeasurePoset, extract_measure_endowment, measure_endowment_member
from .poset import Condition, Poset, Stratification


@dataclass(frozen=True)
class EndowmentFamily:
    """A labeled family given by a membership test and an extractor.

    `member(n, L)` decides whether L belongs to level n; `extract(n, A)`
    picks a candidate member out of a maximal antichain A.
    """

    label: str
    member: Callable[[int, frozenset[str]], bool]
    extract: Callable[[int, frozenset[str]], frozenset[str]]


@dataclass(frozen=True)
class DowStage:
    """One stage of the staged construction: the conditions whose chosen
    antichain elements were added, the elements, and the support so far."""

    handled: tuple[Condition, ...]
    added: tuple[Condition, ...]
    support: tuple[int, ...]


@dataclass(frozen=True)
class DowTrace:
    seed: Condition
    stages: tuple[DowStage, ...]
    result: frozenset[Condition]

    def to_jsonable(self) -> dict:
        return {
            "seed": self.seed,
            "stages": [
                {"handled": list(s.handled), "added": list(s.added), "support": list(s.support)}
                for s in self.stages
            ],
            "result": set_list(self.result),
        }


def dow_construct(cohen: CohenPoset, antichain: Iterable[Condition], n: int) -> DowTrace:
    """Thin a maximal antichain to a small hitting set, in n+1 stages.

    Stage 0 keeps the canonically least element; its support opens the
    support set.  Each later stage scans every condition supported inside
    the current support set and keeps the canonically least antichain
    element compatible with it, then widens the support set by the keepers'
    supports.  The result is compatible with every condition of support
    size at most n: such a condition misses one of the n+1 disjoint support
    increments, and the keeper chosen for its restriction to the stage
    below works.
    """
    if n < 0:
        raise DataError(f"stage count must be nonnegative, got {n}")
    poset = cohen.poset
    items = frozenset(antichain)
    if not poset.is_maximal_antichain(items):
        raise DataError("staged construction needs a maximal antichain")
    by_canon = sorted(items, key=poset.sort_key)
    seed = by_canon[0]
    chosen: set[Condition] = {seed}
    support: set[int] = set(cohen.support(seed))
    stages = [DowStage((), (seed,), tuple(sorted(support)))]
    for _ in range(1, n + 1):
        handled = [p for p in poset.elements if cohen.support(p) <= support]
        added: list[Condition] = []
        for p in handled:
            pick = next(a for a in by_canon if poset.compatible(p, a))
            if pick not in chosen:
                chosen.add(pick)
                added.append(pick)
            support.update(cohen.support(pick))
        stages.append(DowStage(tuple(handled), tuple(added), tuple(sorted(support))))
    return DowTrace(seed, tuple(stages), frozenset(chosen))


def hits_level(poset: Poset, level: Iterable[Condition], conditions: Iterable[Condition]) -> bool:
    """True when every condition of the level is compatible with a member."""
    members = frozenset(conditions)
    return all(any(poset.compatible(p, q) for q in members) for p in level)


# -- concrete families -------------------------------------------------------


def cohen_dow_family(cohen: CohenPoset) -> EndowmentFamily:
    """Level n: antichains hitting every condition of support size at most n.

    The extractor runs the staged construction; the membership test checks
    the hitting property directly, so the two sides stay independent.
    """
    strat = cohen.stratification()

    def member(n: int, conditions: frozenset[str]) -> bool:
        if not cohen.poset.is_antichain(conditions):
            return False
        return hits_level(cohen.poset, strat.at(n), conditions)

    def extract(n: int, antichain: frozenset[str]) -> frozenset[str]:
        return dow_construct(cohen, antichain, n).result

    return EndowmentFamily("staged-hitting", member, extract)


def measure_total_family(algebra: MeasurePoset) -> EndowmentFamily:
    """Level n: antichains of total measure strictly above 1 - 2^-n."""

    def member(n: int, conditions: frozenset[str]) -> bool:
        return measure_endowment_member(algebra, n, conditions)

    def extract(n: int, antichain: frozenset[str]) -> frozenset[str]:
        return extract_measure_endowment(algebra, n, antichain)

    return EndowmentFamily("measure-total", member, extract)


def maximal_antichain_family(poset: Poset) -> EndowmentFamily:
    """Every level: all maximal antichains; extraction is the identity."""

    def member(n: int, conditions: frozenset[str]) -> bool:
        return poset.is_maximal_antichain(conditions)

    def extract(n: int, antichain: frozenset[str]) -> frozenset[str]:
        return frozenset(antichain)

    return EndowmentFamily("maximal-antichain", member, extract)


def adversarial_singleton_family(poset: Poset) -> EndowmentFamily:
    """Negative control: keeps only the canonically least antichain element.

    A singleton generally fails to hit whole levels, so the weak verifier
    must flag it.
    """

    def member(n: int, conditions: frozenset[str]) -> bool:
        return len(conditions) == 1 and all(p in poset for p in conditions)

    def extract(n: int, antichain: frozenset[str]) -> frozenset[str]:
        return frozenset([min(antichain, key=poset.sort_key)])

    return EndowmentFamily("adversarial-singleton", member, extract)


# -- verification ------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    clause: str
    antichain: tuple[Condition, ...]
    witness: Condition | None
    detail: str

    def to_jsonable(self) -> dict:
        return {
            "clause": self.clause,
            "antichain": list(self.antichain),
            "witness": self.witness,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class EndowmentReport:
    family: str
    level: int
    checked: int
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_jsonable(self) -> dict:
        return {
            "family": self.family,
            "level": self.level,
            "antichains_checked": self.checked,
            "ok": self.ok,
            "violations": [v.to_jsonable() for v in self.violations],
        }


def verify_weak_endowment(
    poset: Poset,
    strat: Stratification,
    family: EndowmentFamily,
    n: int,
    antichains: Iterable[frozenset[Condition]],
) -> EndowmentReport:
    """Check the weak property clause by clause over the given antichains.

    Every input must be a maximal antichain.  For each one the extractor
    runs once and the result is checked to be an antichain (clause 1), a
    family member lying inside the input (clause 2), and compatible with
    every level-n condition (clause 3').
    """
    if n < 0:
        raise DataError(f"level must be nonnegative, got {n}")
    level = sorted(strat.at(n), key=poset.sort_key)
    violations: list[Violation] = []
    checked = 0
    for antichain in antichains:
        items = frozenset(antichain)
        if not poset.is_maximal_antichain(items):
            raise DataError("weak verification needs maximal antichains")
        checked += 1
        key = tuple(sorted(items, key=poset.sort_key))
        chosen = frozenset(family.extract(n, items))
        if not poset.is_antichain(chosen):
            violations.append(Violation("1", key, None, "extraction is not an antichain"))
        if not chosen <= items:
            stray = min(chosen - items, key=poset.sort_key)
            violations.append(Violation("2", key, stray, "extraction leaves the antichain"))
        if not family.member(n, chosen):
            violations.append(Violation("2", key, None, "extraction is not a family member"))
        for p in level:
            if not any(poset.compatible(p, q) for q in chosen):
                violations.append(Violation("3'", key, p, "level condition incompatible with every member"))
    return EndowmentReport(family.label, n, checked, tuple(violations))


DEFAULT_FULL_BUDGET = 2_000_000


def verify_full_endowment(
    poset: Poset,
    strat: Stratification,
    family: EndowmentFamily,
    n: int,
    antichains: Iterable[frozenset[Condition]],
    budget: int = DEFAULT_FULL_BUDGET,
) -> EndowmentReport:
    """Check the joint extension clause over extractions from the antichains.

    For every level-n condition p and every n-tuple of extraction results
    there must be a common lower bound scheme: some r <= p lying below a
    member of each tuple entry.  The scan is budgeted; exceeding the budget
    raises ResourceError carrying the partial report.
    """
    if n < 0:
        raise DataError(f"level must be nonnegative, got {n}")
    level = sorted(strat.at(n), key=poset.sort_key)
    outputs: list[frozenset[Condition]] = []
    seen: set[frozenset[Condition]] = set()
    checked = 0
    for antichain in antichains:
        items = frozenset(antichain)
        if not poset.is_maximal_antichain(items):
            raise DataError("full verification needs maximal antichains")
        checked += 1
        chosen = frozenset(family.extract(n, items))
        if chosen not in seen:
            seen.add(chosen)
            outputs.append(chosen)
    violations: list[Violation] = []
    steps = 0
    for combo in product(outputs, repeat=n):
        for p in level:
            found = False
            for r in sorted(poset.down(p), key=poset.sort_key):
                steps += 1
                if all(not poset.up(r).isdisjoint(part) for part in combo):
                    found = True
                    break
            if steps > budget:
                partial = EndowmentReport(family.label, n, checked, tuple(violations))
                raise ResourceError(f"joint extension scan exceeded budget {budget}", partial=partial)
            if not found:
                flat = tuple(sorted(frozenset().union(*combo), key=poset.sort_key)) if combo else ()
                violations.append(Violation("3", flat, p, "no common extension scheme for tuple"))
    return EndowmentReport(family.label, n, checked, tuple(violations))
