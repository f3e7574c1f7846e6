"""Instance files: strict schemas, load/save helpers, and fixed fixtures.

Every instance file is a JSON object {"format_version": 1, "kind": K,
"payload": P} with K one of poset, space, name, scenario.  Payloads are
validated strictly against the schemas below before any object is built.
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from .errors import DataError
from .poset import Name
from .preservation import PosetSpec, Scenario

FORMAT_VERSION = 1

_SET = {"type": "array", "items": {"type": "string"}}
_FAMILY = {"type": "array", "items": _SET}

_NAME_PAYLOAD = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["condition", "set"],
        "properties": {"condition": {"type": "string"}, "set": _SET},
        "additionalProperties": False,
    },
}

_POSET_PAYLOAD = {
    "type": "object",
    "required": ["elements", "leq"],
    "properties": {
        "elements": {"type": "array", "items": {"type": "string"}},
        "leq": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
        },
    },
    "additionalProperties": False,
}

_SPACE_PAYLOAD = {
    "type": "object",
    "required": ["points", "base"],
    "properties": {"points": _SET, "base": _FAMILY},
    "additionalProperties": False,
}

_POSET_RECIPE = {
    "oneOf": [
        {
            "type": "object",
            "required": ["kind", "indices"],
            "properties": {
                "kind": {"const": "cohen"},
                "indices": {"type": "array", "items": {"type": "integer"}},
            },
            "additionalProperties": False,
        },
        {
            "type": "object",
            "required": ["kind", "k"],
            "properties": {"kind": {"const": "measure"}, "k": {"type": "integer"}},
            "additionalProperties": False,
        },
        {
            "type": "object",
            "required": ["kind", "elements", "leq"],
            "properties": {
                "kind": {"const": "explicit"},
                "elements": _POSET_PAYLOAD["properties"]["elements"],
                "leq": _POSET_PAYLOAD["properties"]["leq"],
            },
            "additionalProperties": False,
        },
    ]
}

_SCENARIO_PAYLOAD = {
    "type": "object",
    "required": ["poset", "space", "names", "property"],
    "properties": {
        "poset": _POSET_RECIPE,
        "space": _SPACE_PAYLOAD,
        "names": {"type": "array", "items": _NAME_PAYLOAD},
        "property": {"enum": ["rothberger", "menger", "selective-screenability"]},
    },
    "additionalProperties": False,
}

PAYLOAD_SCHEMAS = {
    "poset": _POSET_PAYLOAD,
    "space": _SPACE_PAYLOAD,
    "name": _NAME_PAYLOAD,
    "scenario": _SCENARIO_PAYLOAD,
}


def _file_schema(kind: str) -> dict:
    return {
        "type": "object",
        "required": ["format_version", "kind", "payload"],
        "properties": {
            "format_version": {"const": FORMAT_VERSION},
            "kind": {"const": kind},
            "payload": PAYLOAD_SCHEMAS[kind],
        },
        "additionalProperties": False,
    }


def wrap_instance(kind: str, payload) -> dict:
    if kind not in PAYLOAD_SCHEMAS:
        raise DataError(f"unknown instance kind {kind!r}")
    return {"format_version": FORMAT_VERSION, "kind": kind, "payload": payload}


def validate_instance(data, kind: str | None = None) -> str:
    """Validate a loaded instance object; returns the kind."""
    if not isinstance(data, dict) or "kind" not in data:
        raise DataError("instance file must be an object with a 'kind'")
    actual = data["kind"]
    if actual not in PAYLOAD_SCHEMAS:
        raise DataError(f"unknown instance kind {actual!r}")
    if kind is not None and actual != kind:
        raise DataError(f"expected a {kind} instance, got {actual}")
    try:
        jsonschema.validate(data, _file_schema(actual))
    except jsonschema.ValidationError as exc:
        raise DataError(f"instance file invalid: {exc.message}") from exc
    return actual


def load_instance(path: str | Path, kind: str | None = None) -> dict:
    """Read, parse, and validate an instance file; returns the payload."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from exc
    validate_instance(data, kind)
    return data["payload"]


def save_instance(path: str | Path, kind: str, payload) -> None:
    data = wrap_instance(kind, payload)
    Path(path).write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")


# -- fixtures ----------------------------------------------------------------


def pair_space_payload() -> dict:
    return {"points": ["x", "y"], "base": [["x"], ["x", "y"]]}


def cohen_pair_name_payload() -> list[dict]:
    """One branching name over the two point space: the empty side commits
    the small set and both full commitments carry the big one."""
    return [
        {"condition": "0:0", "set": ["x"]},
        {"condition": "0:0", "set": ["x", "y"]},
        {"condition": "0:1", "set": ["x", "y"]},
    ]


def measure_pair_name_payload() -> list[dict]:
    return [
        {"condition": "0", "set": ["x"]},
        {"condition": "0", "set": ["x", "y"]},
        {"condition": "1", "set": ["x", "y"]},
    ]


def fixture_cohen_pair(levels: int = 3, mode: str = "rothberger") -> Scenario:
    """Two index assignments poset over the two point space, one branching
    name repeated per level."""
    payload = {
        "poset": {"kind": "cohen", "indices": [0, 1]},
        "space": pair_space_payload(),
        "names": [cohen_pair_name_payload() for _ in range(levels)],
        "property": mode,
    }
    return Scenario.from_jsonable(payload)


def fixture_measure_pair(levels: int = 3, mode: str = "rothberger") -> Scenario:
    """Measure algebra on one coin over the two point space, the matching
    branching name repeated per level."""
    payload = {
        "poset": {"kind": "measure", "k": 1},
        "space": pair_space_payload(),
        "names": [measure_pair_name_payload() for _ in range(levels)],
        "property": mode,
    }
    return Scenario.from_jsonable(payload)


def fixture_discrete_triple() -> tuple[PosetSpec, dict, Name]:
    """Three point discrete space with a name forced everywhere.

    Used by tamper tests: every singleton is committed at the top, so any
    candidate piece not contained in a singleton is genuinely undominated.
    """
    spec = PosetSpec("cohen", indices=(0,))
    space_payload = {"points": ["x", "y", "z"], "base": [["x"], ["y"], ["z"]]}
    name = Name((("", frozenset({"x"})), ("", frozenset({"y"})), ("", frozenset({"z"}))))
    return spec, space_payload, name
