"""Shared environment plumbing: errors, value parsing, direction math."""

from __future__ import annotations

import re
from typing import Union

Location = tuple[int, int]

# Screen-style grid: origin top-left, x grows right, y grows down.
DIRECTION_DELTAS = {
    "left": (-1, 0),
    "right": (1, 0),
    "above": (0, -1),
    "below": (0, 1),
}


class WorldError(Exception):
    """Base class for environment failures."""


class OutOfBoundsError(WorldError):
    pass


class CellOccupiedError(WorldError):
    pass


class UnknownIdError(WorldError):
    pass


class DuplicateNameError(WorldError):
    pass


class AmbiguousReferenceError(WorldError):
    pass


class UnknownApiError(WorldError):
    pass


class BadArgumentError(WorldError):
    pass


_LOCATION = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")


def parse_location(value) -> Location:
    """Accept "(2, 3)" strings, (2, 3) tuples or [2, 3] lists."""
    if isinstance(value, (tuple, list)) and len(value) == 2:
        return int(value[0]), int(value[1])
    if isinstance(value, str):
        m = _LOCATION.search(value)
        if m:
            return int(m.group(1)), int(m.group(2))
    raise BadArgumentError(f"not a location: {value!r}")


def parse_number(value) -> int:
    if isinstance(value, int):
        return value
    if isinstance(value, str) and value.strip().isdigit():
        return int(value.strip())
    raise BadArgumentError(f"not a number: {value!r}")


def parse_id_set(value) -> set[int]:
    if isinstance(value, (set, frozenset)):
        return set(int(v) for v in value)
    if isinstance(value, (list, tuple)):
        return set(int(v) for v in value)
    if isinstance(value, int):
        return {value}
    raise BadArgumentError(f"not an id set: {value!r}")


def parse_direction(value) -> str:
    if isinstance(value, str) and value.strip().lower() in DIRECTION_DELTAS:
        return value.strip().lower()
    raise BadArgumentError(f"not a direction: {value!r}")


def adjacent_cell(location: Location, direction: str) -> Location:
    dx, dy = DIRECTION_DELTAS[direction]
    return location[0] + dx, location[1] + dy


def ordered_args(args: Union[dict, list, tuple]) -> list:
    """Argument values in slot-name order (X1, X2, ...)."""
    if isinstance(args, dict):
        return [args[k] for k in sorted(args)]
    return list(args)
