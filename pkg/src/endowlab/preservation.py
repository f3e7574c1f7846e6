"""End to end preservation runs with replayable certificates.

A scenario packages a poset recipe, a finite space, one cover name per
level, and a selection mode.  The runner approximates every name on the
ground, solves the selection problem with the floor at the stabilization
index, refines every name over the selected ground families, and certifies
per atom that the refined names cover the space at or above the floor.
The certificate is canonical JSON: replaying the embedded scenario must
reproduce it byte for byte.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, fields

from .bounds import DEFAULT_LIMITS, Limits
from .canon import canonical_json
from .cohen import CohenPoset
from .endowment import (
    EndowmentFamily,
    cohen_dow_family,
    maximal_antichain_family,
    measure_total_family,
)
from .errors import DataError, ResourceError, ScenarioError
from .measure import MeasurePoset
from .names import (
    Approximation,
    ApproxCertificate,
    PipelineResult,
    approximate,
    check_approximation,
    derive_point_names,
    make_cover_name,
    run_pipeline,
)
from .poset import Name, Poset, Stratification, evaluate_name, make_stratification
from .selection import MODES, check_selection, make_selection_problem, solve_selection
from .topology import FiniteSpace

FORMAT_VERSION = 1

POSET_KINDS = ("cohen", "measure", "explicit")


@dataclass(frozen=True)
class PosetSpec:
    """A recipe for one of the three supported poset kinds."""

    kind: str
    indices: tuple[int, ...] = ()
    k: int = 0
    elements: tuple[str, ...] = ()
    leq: tuple[tuple[str, str], ...] = ()

    def to_jsonable(self) -> dict:
        if self.kind == "cohen":
            return {"kind": "cohen", "indices": list(self.indices)}
        if self.kind == "measure":
            return {"kind": "measure", "k": self.k}
        return {
            "kind": "explicit",
            "elements": list(self.elements),
            "leq": [list(pair) for pair in self.leq],
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "PosetSpec":
        if not isinstance(data, dict) or data.get("kind") not in POSET_KINDS:
            raise DataError(f"poset recipe needs a kind in {POSET_KINDS}")
        kind = data["kind"]
        if kind == "cohen":
            if "indices" not in data:
                raise DataError("cohen recipe needs 'indices'")
            return cls("cohen", indices=tuple(data["indices"]))
        if kind == "measure":
            if "k" not in data:
                raise DataError("measure recipe needs 'k'")
            return cls("measure", k=data["k"])
        if "elements" not in data or "leq" not in data:
            raise DataError("explicit recipe needs 'elements' and 'leq'")
        return cls(
            "explicit",
            elements=tuple(data["elements"]),
            leq=tuple((a, b) for a, b in data["leq"]),
        )


@dataclass(frozen=True)
class PosetBundle:
    poset: Poset
    strat: Stratification
    family: EndowmentFamily


def build_bundle(spec: PosetSpec, limits: Limits = DEFAULT_LIMITS) -> PosetBundle:
    """Materialize a poset recipe with its stratification and default family."""
    if spec.kind == "cohen":
        cohen = CohenPoset(spec.indices, limits)
        return PosetBundle(cohen.poset, cohen.stratification(), cohen_dow_family(cohen))
    if spec.kind == "measure":
        algebra = MeasurePoset(spec.k, limits)
        return PosetBundle(algebra.poset, algebra.stratification(), measure_total_family(algebra))
    if spec.kind == "explicit":
        if len(spec.elements) > limits.max_poset:
            raise ResourceError(
                f"explicit posets capped at {limits.max_poset} conditions, got {len(spec.elements)}")
        poset = Poset(spec.elements, spec.leq)
        strat = make_stratification(poset, [poset.elements])
        return PosetBundle(poset, strat, maximal_antichain_family(poset))
    raise DataError(f"unknown poset kind {spec.kind!r}")


@dataclass(frozen=True)
class Scenario:
    poset: PosetSpec
    points: tuple[str, ...]
    base: tuple[frozenset[str], ...]
    names: tuple[Name, ...]
    mode: str

    def to_jsonable(self) -> dict:
        return {
            "poset": self.poset.to_jsonable(),
            "space": {"points": sorted(self.points), "base": [sorted(b) for b in self.base]},
            "names": [name.to_jsonable() for name in self.names],
            "property": self.mode,
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "Scenario":
        for key in ("poset", "space", "names", "property"):
            if not isinstance(data, dict) or key not in data:
                raise DataError(f"scenario data needs {key!r}")
        space = data["space"]
        if not isinstance(space, dict) or "points" not in space or "base" not in space:
            raise DataError("scenario space needs 'points' and 'base'")
        if data["property"] not in MODES:
            raise DataError(f"unknown property {data['property']!r}; expected one of {MODES}")
        return cls(
            PosetSpec.from_jsonable(data["poset"]),
            tuple(sorted(space["points"])),
            tuple(frozenset(b) for b in space["base"]),
            tuple(Name.from_jsonable(entry) for entry in data["names"]),
            data["property"],
        )


@dataclass(frozen=True)
class AtomRow:
    """One certified covering fact: at this atom, this point lies in this
    evaluated set of the refined name at this level."""

    atom: str
    point: str
    level: int | None
    covering: frozenset[str] | None

    def to_jsonable(self) -> dict:
        return {
            "atom": self.atom,
            "point": self.point,
            "level": self.level,
            "set": None if self.covering is None else sorted(self.covering),
        }


def _selection_jsonable(mode: str, solution) -> list:
    if mode == "rothberger":
        return [sorted(u) for u in solution]
    return [[sorted(u) for u in fam] for fam in solution]


@dataclass(frozen=True)
class PreservationCertificate:
    scenario: Scenario
    floor: int
    family_label: str
    approximations: tuple[Approximation, ...]
    approximation_certificates: tuple[ApproxCertificate, ...]
    selection: tuple
    selection_checked: bool
    ground_families: tuple[tuple[frozenset[str], ...], ...]
    pipeline: PipelineResult
    atom_table: tuple[AtomRow, ...]
    verdict: str

    def to_jsonable(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "kind": "preservation-certificate",
            "scenario": self.scenario.to_jsonable(),
            "floor": self.floor,
            "family": self.family_label,
            "approximations": [a.to_jsonable() for a in self.approximations],
            "approximation_certificates": [c.to_jsonable() for c in self.approximation_certificates],
            "selection": {
                "mode": self.scenario.mode,
                "checked": self.selection_checked,
                "solution": _selection_jsonable(self.scenario.mode, self.selection),
            },
            "ground_families": [[sorted(h) for h in fam] for fam in self.ground_families],
            "refined_names": [w.to_jsonable() for w in self.pipeline.refined],
            "refinement_certificates": [c.to_jsonable() for c in self.pipeline.certificates],
            "subfamily_everywhere": list(self.pipeline.subfamily_everywhere),
            "union_covers": self.pipeline.union_covers,
            "atom_table": [row.to_jsonable() for row in self.atom_table],
            "verdict": self.verdict,
        }


def run_preservation(scenario: Scenario, limits: Limits = DEFAULT_LIMITS) -> PreservationCertificate:
    """Run the full preservation argument and certify every step.

    Raises ScenarioError when the name sequence is too short for the
    stabilization floor or the selection problem has no solution; malformed
    scenarios raise DataError.
    """
    bundle = build_bundle(scenario.poset, limits)
    space = FiniteSpace(scenario.points, scenario.base, limits)
    if scenario.mode not in MODES:
        raise DataError(f"unknown property {scenario.mode!r}; expected one of {MODES}")
    if not scenario.names:
        raise DataError("scenario needs at least one name")
    names = [make_cover_name(bundle.poset, space, name.pairs) for name in scenario.names]
    floor = bundle.strat.stabilization_index
    if floor >= len(names):
        raise ScenarioError(
            f"stabilization floor {floor} leaves no usable level among {len(names)} names")
    approximations = []
    approx_certs = []
    for n, name in enumerate(names):
        point_names = derive_point_names(bundle.poset, space, name)
        approx = approximate(bundle.poset, point_names, n, bundle.family)
        approximations.append(approx)
        approx_certs.append(check_approximation(bundle.poset, bundle.strat, name, approx))
    problem = make_selection_problem(
        space, [a.cover for a in approximations], floor, scenario.mode)
    solution = solve_selection(problem)
    if solution is None:
        raise ScenarioError("selection problem has no solution at or above the floor")
    checked, _ = check_selection(problem, solution)
    if scenario.mode == "rothberger":
        ground_families = tuple((u,) for u in solution)
    else:
        ground_families = tuple(tuple(fam) for fam in solution)
    pipeline = run_pipeline(
        bundle.poset, bundle.strat, space, names, ground_families, check_horizon=False)
    atom_rows = []
    complete = True
    for atom in bundle.poset.atoms:
        evaluations = [
            evaluate_name(bundle.poset, pipeline.refined[n], atom)
            for n in range(len(names))
        ]
        for x in sorted(space.points):
            hit = next(
                ((n, h) for n in range(floor, len(names)) for h in evaluations[n] if x in h),
                None,
            )
            if hit is None:
                atom_rows.append(AtomRow(atom, x, None, None))
                complete = False
            else:
                atom_rows.append(AtomRow(atom, x, hit[0], hit[1]))
    positive = (
        all(c.positive for c in approx_certs)
        and checked
        and pipeline.positive
        and complete
    )
    return PreservationCertificate(
        scenario,
        floor,
        bundle.family.label,
        tuple(approximations),
        tuple(approx_certs),
        tuple(solution),
        checked,
        ground_families,
        pipeline,
        tuple(atom_rows),
        "positive" if positive else "negative",
    )


@dataclass(frozen=True)
class ReplayReport:
    ok: bool
    mismatches: tuple[str, ...]

    def to_jsonable(self) -> dict:
        return {"ok": self.ok, "mismatches": list(self.mismatches)}


def replay_certificate(data: dict, limits: Limits = DEFAULT_LIMITS) -> ReplayReport:
    """Re-run the embedded scenario and compare byte for byte.

    Mismatching top level sections are listed by key; an exactly matching
    replay returns ok.
    """
    if not isinstance(data, dict) or data.get("kind") != "preservation-certificate":
        raise DataError("not a preservation certificate")
    if data.get("format_version") != FORMAT_VERSION:
        raise DataError(f"unsupported certificate format version {data.get('format_version')!r}")
    if "scenario" not in data:
        raise DataError("certificate needs an embedded scenario")
    scenario = Scenario.from_jsonable(data["scenario"])
    fresh = run_preservation(scenario, limits).to_jsonable()
    if canonical_json(fresh) == canonical_json(data):
        return ReplayReport(True, ())
    keys = sorted(set(fresh) | set(data))
    mismatches = tuple(
        key for key in keys
        if canonical_json(fresh.get(key)) != canonical_json(data.get(key))
    )
    return ReplayReport(False, mismatches)


# -- seeded scenario generation ----------------------------------------------

POINT_LETTERS = ("x", "y", "z", "u", "v", "w")


def _check_bounds(bounds: Limits, limits: Limits) -> None:
    for f in fields(Limits):
        if getattr(bounds, f.name) > getattr(limits, f.name):
            raise ResourceError(
                f"generation bound {f.name}={getattr(bounds, f.name)} exceeds the "
                f"resource limit {getattr(limits, f.name)}")


def _random_base(rng: random.Random, points: tuple[str, ...], cap: int) -> tuple[frozenset[str], ...]:
    sets: list[frozenset[str]] = []
    for _ in range(rng.randint(2, 4)):
        members = frozenset(x for x in points if rng.random() < 0.6)
        if members:
            sets.append(members)
    covered = frozenset().union(*sets) if sets else frozenset()
    for x in points:
        if x not in covered:
            extra = frozenset({x} | {y for y in points if rng.random() < 0.3})
            sets.append(extra)
            covered |= extra
    unique = []
    seen = set()
    for s in sets:
        if s not in seen:
            seen.add(s)
            unique.append(s)
    if len(unique) > cap:
        # keep coverage first, then fill up to the cap
        kept: list[frozenset[str]] = []
        covered_now: set[str] = set()
        for s in unique:
            if not s <= covered_now:
                kept.append(s)
                covered_now |= s
        for s in unique:
            if len(kept) >= cap:
                break
            if s not in kept:
                kept.append(s)
        unique = kept[:cap]
    return tuple(unique)


def _random_explicit(rng: random.Random, cap: int) -> PosetSpec:
    size = rng.randint(3, min(10, cap))
    elements = tuple(f"e{i}" for i in range(size))
    pairs = []
    for j in range(size):
        for i in range(j):
            if rng.random() < 0.3:
                pairs.append((elements[j], elements[i]))
    return PosetSpec("explicit", elements=elements, leq=tuple(pairs))


def generate_scenario(
    seed: int,
    mode: str | None = None,
    bounds: Limits = DEFAULT_LIMITS,
    limits: Limits = DEFAULT_LIMITS,
) -> Scenario:
    """Draw a scenario that provably satisfies the theorem hypotheses.

    The level count leaves headroom: at least the stabilization floor plus
    one level per point, which guarantees the selection step succeeds.  The
    same seed always yields the same scenario.
    """
    _check_bounds(bounds, limits)
    rng = random.Random(seed)
    if mode is None:
        mode = rng.choice(MODES)
    if mode not in MODES:
        raise DataError(f"unknown property {mode!r}; expected one of {MODES}")
    kinds = []
    if bounds.max_indices >= 1:
        kinds.append(PosetSpec("cohen", indices=(0,)))
    if bounds.max_indices >= 2:
        kinds.append(PosetSpec("cohen", indices=(0, 1)))
    if bounds.max_k >= 1:
        kinds.append(PosetSpec("measure", k=1))
    if bounds.max_k >= 2:
        kinds.append(PosetSpec("measure", k=2))
    if bounds.max_poset >= 3:
        kinds.append(_random_explicit(rng, bounds.max_poset))
    if not kinds:
        raise DataError("generation bounds leave no poset kind available")
    spec = rng.choice(kinds)
    if spec.kind == "cohen":
        floor = len(spec.indices)
    elif spec.kind == "measure":
        floor = spec.k
    else:
        floor = 0
    n_points = rng.randint(2, min(3, bounds.max_points))
    while floor + n_points > bounds.max_levels and n_points > 1:
        n_points -= 1
    if floor + n_points > bounds.max_levels:
        raise DataError("generation bounds leave no room for the headroom guarantee")
    points = POINT_LETTERS[:n_points]
    base = _random_base(rng, points, bounds.max_base)
    bundle = build_bundle(spec, limits)
    slack = bounds.max_levels - (floor + n_points)
    n_levels = floor + n_points + rng.randint(0, min(2, slack))
    names = []
    for _ in range(n_levels):
        antichain = sorted(
            bundle.poset.random_maximal_antichain(rng), key=bundle.poset.sort_key)
        pairs = []
        for q in antichain:
            for x in points:
                pairs.append((q, rng.choice([b for b in base if x in b])))
        if rng.random() < 0.5:
            extra_q = rng.choice(bundle.poset.elements)
            pairs.append((extra_q, rng.choice(base)))
        names.append(Name(tuple(pairs)))
    return Scenario(spec, points, base, tuple(names), mode)
