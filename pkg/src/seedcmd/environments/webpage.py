"""Webpage design surface: html-like elements positioned on a canvas."""

from __future__ import annotations

import copy
import re
from dataclasses import dataclass
from typing import Optional

from .base import (
    AmbiguousReferenceError,
    BadArgumentError,
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

COLORS = ("red", "green", "brown", "blue", "black")
TYPES = ("image", "button", "title", "paragraph")
FONT_SIZES = ("small", "medium", "large")
GRAPHICS_SIZES = ("height", "width")

_FILENAME = re.compile(r"[A-Za-z0-9_\-]+\.(?:jpe?g|png)$", re.IGNORECASE)
_TYPE_NUMBER = re.compile(r"(image|button|title|paragraph)\s+(\d+)$", re.IGNORECASE)


@dataclass
class PageElement:
    id: int
    type: str
    location: Location
    number: int
    color: str = "black"
    text: str = ""
    font_size: str = "medium"
    height: int = 10
    width: int = 20
    filename: Optional[str] = None

    @property
    def name(self) -> str:
        return self.filename if self.filename else f"{self.type} {self.number}"


def _strip_quotes(value: str) -> str:
    value = str(value).strip()
    if len(value) >= 2 and value[0] == '"' and value[-1] == '"':
        return value[1:-1]
    return value


class Page:
    """Canvas of page elements with the ten action APIs and eight utility APIs."""

    ACTION_APIS = (
        "Add", "Write", "Remove", "Move", "MoveByUnits",
        "UpdateColor", "UpdateFont", "SetGraphicsSize", "IncreaseSize", "DecreaseSize",
    )
    UTILITY_APIS = (
        "GetElementbyLocation", "GetElementbyType", "GetElementbyFont",
        "GetElementbyGraphicsSize", "GetElementbyColor", "GetElementbyText",
        "GetLocation", "GetElementbyName",
    )

    def __init__(self, canvas_width: int = 100, canvas_height: int = 100):
        self.canvas_width = canvas_width
        self.canvas_height = canvas_height
        self.elements: dict[int, PageElement] = {}
        self._next_id = 1
        self._type_counters = {t: 0 for t in TYPES}

    # -- construction -----------------------------------------------------

    def add_element(self, type, location, color=None, text="", font_size=None,
                    height=None, width=None, filename=None, id=None) -> PageElement:
        etype = str(type).lower()
        if etype not in TYPES:
            raise BadArgumentError(f"unknown element type {type!r}")
        loc = parse_location(location)
        self._check_bounds(loc)
        eid = id if id is not None else self._next_id
        if eid in self.elements:
            raise BadArgumentError(f"element id {eid} already used")
        self._type_counters[etype] += 1
        element = PageElement(
            id=eid,
            type=etype,
            location=loc,
            number=self._type_counters[etype],
            color=(color or "black").lower(),
            text=_strip_quotes(text) if text else "",
            font_size=(font_size or "medium").lower(),
            height=height if height is not None else 10,
            width=width if width is not None else 20,
            filename=filename,
        )
        self.elements[eid] = element
        self._next_id = max(self._next_id, eid + 1)
        return element

    def snapshot(self) -> dict:
        return {
            "app": "webpage",
            "canvas_width": self.canvas_width,
            "canvas_height": self.canvas_height,
            "elements": [
                {
                    "id": e.id,
                    "type": e.type,
                    "name": e.name,
                    "location": list(e.location),
                    "color": e.color,
                    "text": e.text,
                    "font_size": e.font_size,
                    "height": e.height,
                    "width": e.width,
                    "filename": e.filename,
                }
                for e in sorted(self.elements.values(), key=lambda e: e.id)
            ],
        }

    @classmethod
    def from_snapshot(cls, snap: dict) -> "Page":
        page = cls(
            canvas_width=snap.get("canvas_width", 100),
            canvas_height=snap.get("canvas_height", 100),
        )
        for entry in snap.get("elements", []):
            page.add_element(
                entry["type"],
                entry["location"],
                color=entry.get("color"),
                text=entry.get("text", ""),
                font_size=entry.get("font_size"),
                height=entry.get("height"),
                width=entry.get("width"),
                filename=entry.get("filename"),
                id=entry.get("id"),
            )
        return page

    def copy(self) -> "Page":
        return copy.deepcopy(self)

    # -- checks -----------------------------------------------------------

    def _check_bounds(self, loc: Location):
        x, y = loc
        if not (0 <= x < self.canvas_width and 0 <= y < self.canvas_height):
            raise OutOfBoundsError(
                f"location {loc} outside {self.canvas_width}x{self.canvas_height} canvas"
            )

    def _resolve_ids(self, ids) -> list[PageElement]:
        out = []
        for eid in sorted(parse_id_set(ids)):
            if eid not in self.elements:
                raise UnknownIdError(f"no element with id {eid}")
            out.append(self.elements[eid])
        return out

    # -- actions ----------------------------------------------------------

    def execute_action(self, api_name: str, args) -> None:
        handler = getattr(self, f"_act_{api_name}", None)
        if handler is None or api_name not in self.ACTION_APIS:
            raise UnknownApiError(f"unknown action API {api_name!r}")
        handler(*ordered_args(args))

    def _act_Add(self, type, location):
        self.add_element(type, location)

    def _act_Write(self, text, element_set):
        value = _strip_quotes(text)
        for e in self._resolve_ids(element_set):
            e.text = value

    def _act_Remove(self, element_set):
        for e in self._resolve_ids(element_set):
            del self.elements[e.id]

    def _act_Move(self, element_set, location):
        loc = parse_location(location)
        self._check_bounds(loc)
        for e in self._resolve_ids(element_set):
            e.location = loc

    def _act_MoveByUnits(self, element_set, direction, units):
        d = parse_direction(direction)
        n = parse_number(units)
        elements = self._resolve_ids(element_set)
        targets = {}
        for e in elements:
            loc = e.location
            for _ in range(n):
                loc = adjacent_cell(loc, d)
            self._check_bounds(loc)
            targets[e.id] = loc
        for eid, loc in targets.items():
            self.elements[eid].location = loc

    def _act_UpdateColor(self, element_set, color):
        value = str(color).lower()
        if value not in COLORS:
            raise BadArgumentError(f"unknown color {color!r}")
        for e in self._resolve_ids(element_set):
            e.color = value

    def _act_UpdateFont(self, element_set, font_size):
        value = str(font_size).lower()
        if value not in FONT_SIZES:
            raise BadArgumentError(f"unknown font size {font_size!r}")
        for e in self._resolve_ids(element_set):
            e.font_size = value

    def _set_dimension(self, gs, element, value):
        if value < 0:
            raise BadArgumentError("size cannot go negative")
        setattr(element, gs, value)

    def _act_SetGraphicsSize(self, graphics_size, element_set, units):
        gs = str(graphics_size).lower()
        if gs not in GRAPHICS_SIZES:
            raise BadArgumentError(f"unknown dimension {graphics_size!r}")
        n = parse_number(units)
        for e in self._resolve_ids(element_set):
            self._set_dimension(gs, e, n)

    def _act_IncreaseSize(self, graphics_size, element_set, units):
        gs = str(graphics_size).lower()
        if gs not in GRAPHICS_SIZES:
            raise BadArgumentError(f"unknown dimension {graphics_size!r}")
        n = parse_number(units)
        for e in self._resolve_ids(element_set):
            self._set_dimension(gs, e, getattr(e, gs) + n)

    def _act_DecreaseSize(self, graphics_size, element_set, units):
        gs = str(graphics_size).lower()
        if gs not in GRAPHICS_SIZES:
            raise BadArgumentError(f"unknown dimension {graphics_size!r}")
        n = parse_number(units)
        elements = self._resolve_ids(element_set)
        for e in elements:
            if getattr(e, gs) - n < 0:
                raise BadArgumentError("size cannot go negative")
        for e in elements:
            self._set_dimension(gs, e, getattr(e, gs) - n)

    # -- utilities (read-only) ---------------------------------------------

    def execute_utility(self, api_name: str, args):
        handler = getattr(self, f"_util_{api_name}", None)
        if handler is None or api_name not in self.UTILITY_APIS:
            raise UnknownApiError(f"unknown utility API {api_name!r}")
        return handler(*ordered_args(args))

    def _util_GetElementbyLocation(self, location):
        loc = parse_location(location)
        return {e.id for e in self.elements.values() if e.location == loc}

    def _util_GetElementbyType(self, type):
        value = str(type).lower()
        return {e.id for e in self.elements.values() if e.type == value}

    def _util_GetElementbyFont(self, font_size):
        value = str(font_size).lower()
        return {e.id for e in self.elements.values() if e.font_size == value}

    def _util_GetElementbyGraphicsSize(self, graphics_size, units):
        gs = str(graphics_size).lower()
        if gs not in GRAPHICS_SIZES:
            raise BadArgumentError(f"unknown dimension {graphics_size!r}")
        n = parse_number(units)
        return {e.id for e in self.elements.values() if getattr(e, gs) == n}

    def _util_GetElementbyColor(self, color):
        value = str(color).lower()
        return {e.id for e in self.elements.values() if e.color == value}

    def _util_GetElementbyText(self, text):
        value = _strip_quotes(text).lower()
        return {e.id for e in self.elements.values() if e.text.lower() == value}

    def _util_GetLocation(self, direction, element_set):
        d = parse_direction(direction)
        elements = self._resolve_ids(element_set)
        if len(elements) != 1:
            raise AmbiguousReferenceError(
                f"location relative to {len(elements)} elements is ambiguous"
            )
        loc = adjacent_cell(elements[0].location, d)
        self._check_bounds(loc)
        return loc

    def _util_GetElementbyName(self, name):
        value = str(name).strip().lower()
        m = _TYPE_NUMBER.match(value)
        if m:
            etype, number = m.group(1), int(m.group(2))
            return {
                e.id
                for e in self.elements.values()
                if e.type == etype and e.number == number
            }
        # "image photo.png" and bare "photo.png" both refer to the filename.
        parts = value.split()
        candidate = parts[-1] if parts else value
        if _FILENAME.match(candidate):
            return {
                e.id
                for e in self.elements.values()
                if e.filename and e.filename.lower() == candidate
            }
        return set()

    # -- rendering helpers ---------------------------------------------------

    def display_value(self, value) -> str:
        if isinstance(value, (set, frozenset)):
            names = []
            for eid in sorted(value):
                e = self.elements.get(eid)
                names.append(e.name if e else f"element {eid}")
            return ", ".join(names) if names else "nothing"
        if isinstance(value, tuple) and len(value) == 2:
            return f"({value[0]}, {value[1]})"
        return str(value)
