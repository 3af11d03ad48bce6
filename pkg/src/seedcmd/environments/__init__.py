"""Reference application environments (Blocks-World, Webpage design)."""

from .base import (
    AmbiguousReferenceError,
    BadArgumentError,
    CellOccupiedError,
    DIRECTION_DELTAS,
    DuplicateNameError,
    OutOfBoundsError,
    UnknownApiError,
    UnknownIdError,
    WorldError,
    adjacent_cell,
    parse_location,
    parse_number,
)
from .blocks import Block, BlocksWorld
from .webpage import Page, PageElement


def environment_from_snapshot(snap: dict):
    """Rebuild an environment from its serialized state."""
    app = snap.get("app")
    if app == "blocksworld" or "blocks" in snap:
        return BlocksWorld.from_snapshot(snap)
    if app == "webpage" or "elements" in snap:
        return Page.from_snapshot(snap)
    raise ValueError(f"unrecognized snapshot: keys {sorted(snap)}")


def environment_for_app(app_name: str):
    """Fresh default environment for a bundled application."""
    if app_name == "blocksworld":
        return BlocksWorld()
    if app_name == "webpage":
        return Page()
    raise ValueError(f"no environment registered for app {app_name!r}")


__all__ = [
    "AmbiguousReferenceError",
    "BadArgumentError",
    "Block",
    "BlocksWorld",
    "CellOccupiedError",
    "DIRECTION_DELTAS",
    "DuplicateNameError",
    "OutOfBoundsError",
    "Page",
    "PageElement",
    "UnknownApiError",
    "UnknownIdError",
    "WorldError",
    "adjacent_cell",
    "environment_for_app",
    "environment_from_snapshot",
    "parse_location",
    "parse_number",
]
