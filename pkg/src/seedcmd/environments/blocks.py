"""Blocks-World: colored, shaped, optionally named tiles on a bounded 2D grid."""

from __future__ import annotations

import copy
from dataclasses import dataclass
from typing import Optional

from .base import (
    AmbiguousReferenceError,
    BadArgumentError,
    CellOccupiedError,
    DuplicateNameError,
    Location,
    OutOfBoundsError,
    UnknownApiError,
    UnknownIdError,
    adjacent_cell,
    ordered_args,
    parse_direction,
    parse_id_set,
    parse_location,
    parse_number,
)

COLORS = ("red", "green", "orange", "blue", "yellow")
SHAPES = ("triangular", "circular", "cube", "square", "rectangular")


@dataclass
class Block:
    id: int
    color: str
    shape: str
    location: Location
    name: Optional[str] = None


class BlocksWorld:
    """Grid of blocks with the seven action APIs and five utility APIs."""

    ACTION_APIS = (
        "Add", "Remove", "Move", "MoveByUnits", "UpdateColor", "UpdateShape", "Rename",
    )
    UTILITY_APIS = (
        "GetBlocksbyColor", "GetBlocksbyShape", "GetBlocksbyName",
        "GetBlocksbyLocation", "GetLocation",
    )

    def __init__(self, width: int = 10, height: int = 10,
                 default_color: str = "red", default_shape: str = "square"):
        self.width = width
        self.height = height
        self.default_color = default_color
        self.default_shape = default_shape
        self.blocks: dict[int, Block] = {}
        self._next_id = 1

    # -- construction -----------------------------------------------------

    def add_block(self, location, color=None, shape=None, name=None, id=None) -> Block:
        loc = parse_location(location)
        self._check_bounds(loc)
        self._check_free(loc)
        bid = id if id is not None else self._next_id
        if bid in self.blocks:
            raise BadArgumentError(f"block id {bid} already used")
        if name is not None:
            self._check_name_free(name)
        block = Block(
            id=bid,
            color=(color or self.default_color).lower(),
            shape=(shape or self.default_shape).lower(),
            location=loc,
            name=name.upper() if name else None,
        )
        self.blocks[bid] = block
        self._next_id = max(self._next_id, bid + 1)
        return block

    def snapshot(self) -> dict:
        return {
            "app": "blocksworld",
            "width": self.width,
            "height": self.height,
            "blocks": [
                {
                    "id": b.id,
                    "color": b.color,
                    "shape": b.shape,
                    "name": b.name,
                    "location": list(b.location),
                }
                for b in sorted(self.blocks.values(), key=lambda b: b.id)
            ],
        }

    @classmethod
    def from_snapshot(cls, snap: dict) -> "BlocksWorld":
        world = cls(width=snap.get("width", 10), height=snap.get("height", 10))
        for entry in snap.get("blocks", []):
            world.add_block(
                entry["location"],
                color=entry.get("color"),
                shape=entry.get("shape"),
                name=entry.get("name"),
                id=entry.get("id"),
            )
        return world

    def copy(self) -> "BlocksWorld":
        return copy.deepcopy(self)

    # -- checks -----------------------------------------------------------

    def _check_bounds(self, loc: Location):
        x, y = loc
        if not (0 <= x < self.width and 0 <= y < self.height):
            raise OutOfBoundsError(f"cell {loc} outside {self.width}x{self.height} grid")

    def _check_free(self, loc: Location, ignore: Optional[set[int]] = None):
        for b in self.blocks.values():
            if b.location == loc and (not ignore or b.id not in ignore):
                raise CellOccupiedError(f"cell {loc} already holds block {b.id}")

    def _check_name_free(self, name: str, ignore: Optional[int] = None):
        for b in self.blocks.values():
            if b.name == name.upper() and b.id != ignore:
                raise DuplicateNameError(f"name {name!r} already taken by block {b.id}")

    def _resolve_ids(self, ids) -> list[Block]:
        out = []
        for bid in sorted(parse_id_set(ids)):
            if bid not in self.blocks:
                raise UnknownIdError(f"no block with id {bid}")
            out.append(self.blocks[bid])
        return out

    # -- actions ----------------------------------------------------------

    def execute_action(self, api_name: str, args) -> None:
        handler = getattr(self, f"_act_{api_name}", None)
        if handler is None or api_name not in self.ACTION_APIS:
            raise UnknownApiError(f"unknown action API {api_name!r}")
        handler(*ordered_args(args))

    def _act_Add(self, location):
        loc = parse_location(location)
        self._check_bounds(loc)
        self._check_free(loc)
        self.add_block(loc)

    def _act_Remove(self, block_set):
        blocks = self._resolve_ids(block_set)
        for b in blocks:
            del self.blocks[b.id]

    def _act_Move(self, block_set, location):
        loc = parse_location(location)
        self._check_bounds(loc)
        blocks = self._resolve_ids(block_set)
        if not blocks:
            raise BadArgumentError("empty block set")
        moving = {b.id for b in blocks}
        self._check_free(loc, ignore=moving)
        # A single cell holds one block: the lowest id moves, the rest are
        # rejected (no disambiguation dialogue at this level).
        first, rest = blocks[0], blocks[1:]
        first.location = loc
        if rest:
            raise CellOccupiedError(
                f"moved block {first.id} to {loc}; {len(rest)} remaining "
                f"block(s) not moved (cell now occupied)"
            )

    def _act_MoveByUnits(self, block_set, direction, units):
        d = parse_direction(direction)
        n = parse_number(units)
        blocks = self._resolve_ids(block_set)
        targets = {}
        for b in blocks:
            loc = b.location
            for _ in range(n):
                loc = adjacent_cell(loc, d)
            self._check_bounds(loc)
            targets[b.id] = loc
        if len(set(targets.values())) != len(targets):
            raise CellOccupiedError("two blocks would land on the same cell")
        moving = set(targets)
        for bid, loc in targets.items():
            self._check_free(loc, ignore=moving)
        for bid, loc in targets.items():
            self.blocks[bid].location = loc

    def _act_UpdateColor(self, block_set, color):
        value = str(color).lower()
        if value not in COLORS:
            raise BadArgumentError(f"unknown color {color!r}")
        for b in self._resolve_ids(block_set):
            b.color = value

    def _act_UpdateShape(self, block_set, shape):
        value = str(shape).lower()
        if value not in SHAPES:
            raise BadArgumentError(f"unknown shape {shape!r}")
        for b in self._resolve_ids(block_set):
            b.shape = value

    def _act_Rename(self, block_set, name):
        blocks = self._resolve_ids(block_set)
        if len(blocks) != 1:
            raise AmbiguousReferenceError("rename needs exactly one block")
        value = str(name).strip().upper()
        if len(value) != 1 or not value.isalpha():
            raise BadArgumentError(f"block names are single letters, got {name!r}")
        self._check_name_free(value, ignore=blocks[0].id)
        blocks[0].name = value

    # -- utilities (read-only) ---------------------------------------------

    def execute_utility(self, api_name: str, args):
        handler = getattr(self, f"_util_{api_name}", None)
        if handler is None or api_name not in self.UTILITY_APIS:
            raise UnknownApiError(f"unknown utility API {api_name!r}")
        return handler(*ordered_args(args))

    def _util_GetBlocksbyColor(self, color):
        value = str(color).lower()
        return {b.id for b in self.blocks.values() if b.color == value}

    def _util_GetBlocksbyShape(self, shape):
        value = str(shape).lower()
        return {b.id for b in self.blocks.values() if b.shape == value}

    def _util_GetBlocksbyName(self, name):
        value = str(name).strip().upper()
        return {b.id for b in self.blocks.values() if b.name == value}

    def _util_GetBlocksbyLocation(self, location):
        loc = parse_location(location)
        return {b.id for b in self.blocks.values() if b.location == loc}

    def _util_GetLocation(self, direction, block_set):
        d = parse_direction(direction)
        blocks = self._resolve_ids(block_set)
        if len(blocks) != 1:
            raise AmbiguousReferenceError(
                f"location relative to {len(blocks)} blocks is ambiguous"
            )
        loc = adjacent_cell(blocks[0].location, d)
        self._check_bounds(loc)
        return loc

    # -- rendering helpers ---------------------------------------------------

    def display_value(self, value) -> str:
        """Human-readable rendering of an argument value for dialogue text."""
        if isinstance(value, (set, frozenset)):
            names = []
            for bid in sorted(value):
                b = self.blocks.get(bid)
                names.append(b.name if b and b.name else f"block {bid}")
            return ", ".join(names) if names else "nothing"
        if isinstance(value, tuple) and len(value) == 2:
            return f"({value[0]}, {value[1]})"
        return str(value)
