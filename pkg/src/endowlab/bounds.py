"""Resource limits for desk scale runs.

All constructors and the scenario generator take a Limits value; the CLI
builds one from the ENDOWLAB_BOUNDS environment variable (a JSON object
overriding any subset of the fields).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields

from .errors import DataError


@dataclass(frozen=True)
class Limits:
    max_indices: int = 5   # Cohen style index sets
    max_k: int = 3         # measure algebra exponent; 2^(2^k)-1 conditions
    max_points: int = 6    # space size
    max_base: int = 12     # subbase size
    max_poset: int = 40    # explicit posets and exhaustive enumeration
    max_levels: int = 8    # scenario name sequences


DEFAULT_LIMITS = Limits()

ENV_VAR = "ENDOWLAB_BOUNDS"


def limits_from_env(environ) -> Limits:
    """Build limits from the environment, falling back to the defaults."""
    raw = environ.get(ENV_VAR)
    if not raw:
        return DEFAULT_LIMITS
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise DataError(f"{ENV_VAR} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise DataError(f"{ENV_VAR} must be a JSON object")
    known = {f.name for f in fields(Limits)}
    unknown = set(data) - known
    if unknown:
        raise DataError(f"{ENV_VAR} has unknown keys: {sorted(unknown)}")
    for key, value in data.items():
        if not isinstance(value, int) or value < 0:
            raise DataError(f"{ENV_VAR} entry {key} must be a nonnegative integer")
    return Limits(**{**{f.name: getattr(DEFAULT_LIMITS, f.name) for f in fields(Limits)}, **data})
