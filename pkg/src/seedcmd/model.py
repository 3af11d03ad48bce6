"""Core data model for API seed-command specifications.

An application exposes its callable surface as a set of seed commands:
natural-language templates with typed variable slots, each bound to an API
identifier (AID).  Action seed commands mutate application state; utility
seed commands resolve referential expressions by returning values (object-id
sets, locations) without side effects.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Optional, Union

BUILTIN_NUMBER_TYPE = "number"
NUMBER_PATTERN = re.compile(r"\d+")


class SpecError(Exception):
    """Base class for specification problems."""


class SpecSyntaxError(SpecError):
    """The spec document itself is malformed (bad YAML, missing keys)."""


class SpecValidationError(SpecError):
    """The spec parsed but violates an invariant (duplicate AID, bad type...)."""

    def __init__(self, message, aid=None):
        super().__init__(message)
        self.aid = aid


@dataclass(frozen=True)
class PropertyDomain:
    """A named property with its value domain.

    Enumerated domains list literal values; pattern domains carry a regex
    that recognizes values in command text (locations, quoted text, names).
    """

    name: str
    scope: str  # "object" | "action"
    kind: str  # "enumerated" | "pattern"
    values: tuple[str, ...] = ()
    pattern: Optional[str] = None

    def __post_init__(self):
        if self.scope not in ("object", "action"):
            raise SpecValidationError(
                f"domain {self.name!r}: scope must be 'object' or 'action'"
            )
        if self.kind == "enumerated":
            if not self.values:
                raise SpecValidationError(f"domain {self.name!r}: no values")
            lowered = [v.lower() for v in self.values]
            if len(set(lowered)) != len(lowered):
                raise SpecValidationError(f"domain {self.name!r}: duplicate values")
        elif self.kind == "pattern":
            if not self.pattern:
                raise SpecValidationError(f"domain {self.name!r}: missing pattern")
            try:
                re.compile(self.pattern)
            except re.error as exc:
                raise SpecValidationError(
                    f"domain {self.name!r}: bad pattern: {exc}"
                ) from exc
        else:
            raise SpecValidationError(f"domain {self.name!r}: unknown kind {self.kind!r}")

    def compiled(self) -> Optional[re.Pattern]:
        return re.compile(self.pattern) if self.kind == "pattern" else None


@dataclass(frozen=True)
class VariableSlot:
    """One typed argument slot of a seed command.

    ``starred`` marks a utility constraint: the matching fragment of a user
    command must not be rewritten by utility seed commands.  Stars are always
    recomputed by the constraint marker, never trusted from the spec file.
    """

    name: str
    type: str
    direction: str = "input"  # "input" | "output"
    starred: bool = False


@dataclass(frozen=True)
class SlotRef:
    """Reference to a slot inside a template token stream."""

    name: str


TemplateToken = Union[str, SlotRef]


@dataclass(frozen=True)
class AscTemplate:
    """One natural-language phrasing of a seed command.

    ``tokens`` interleaves lowercase word tokens with SlotRef markers; every
    input slot of the owning seed command appears exactly once.
    """

    tokens: tuple[TemplateToken, ...]
    source: str = ""

    def slot_names(self) -> list[str]:
        return [t.name for t in self.tokens if isinstance(t, SlotRef)]

    def word_tokens(self) -> list[str]:
        return [t for t in self.tokens if isinstance(t, str)]

    def render(self) -> str:
        return self.source or " ".join(
            t if isinstance(t, str) else "{%s}" % t.name for t in self.tokens
        )


@dataclass(frozen=True)
class Asc:
    """An API seed command: templates plus the typed API signature."""

    aid: int
    kind: str  # "action" | "utility"
    api_name: str
    templates: tuple[AscTemplate, ...]
    inputs: tuple[VariableSlot, ...]
    outputs: tuple[VariableSlot, ...] = ()

    def input_slot(self, name: str) -> VariableSlot:
        for slot in self.inputs:
            if slot.name == name:
                return slot
        raise KeyError(name)

    def input_types(self) -> list[str]:
        """Declared input types in slot-name order (X1, X2, ...)."""
        return [s.type for s in sorted(self.inputs, key=lambda s: s.name)]

    def output_type(self) -> str:
        return self.outputs[0].type

    def starred_slots(self) -> list[VariableSlot]:
        return [s for s in self.inputs if s.starred]


@dataclass(frozen=True)
class AppSpec:
    """The full seed-command specification for one application."""

    app_name: str
    domains: tuple[PropertyDomain, ...]
    ascs: tuple[Asc, ...]
    synonym_lexicon_path: Optional[str] = None
    embedding_path: Optional[str] = None

    def domain(self, name: str) -> Optional[PropertyDomain]:
        for d in self.domains:
            if d.name == name:
                return d
        return None

    @property
    def action_ascs(self) -> list[Asc]:
        return [a for a in self.ascs if a.kind == "action"]

    @property
    def utility_ascs(self) -> list[Asc]:
        return [a for a in self.ascs if a.kind == "utility"]

    def asc(self, aid: int) -> Asc:
        for a in self.ascs:
            if a.aid == aid:
                return a
        raise KeyError(f"no ASC with AID {aid}")

    def derived_set_types(self) -> set[str]:
        """Types produced by utilities that are not property domains.

        These name sets of object ids (e.g. block_set) and only ever come
        into a command through a utility reduction.
        """
        domain_names = {d.name for d in self.domains}
        out = set()
        for u in self.utility_ascs:
            for slot in u.outputs:
                if slot.type not in domain_names and slot.type != BUILTIN_NUMBER_TYPE:
                    out.add(slot.type)
        return out

    def declared_types(self) -> set[str]:
        types = {d.name for d in self.domains}
        types.add(BUILTIN_NUMBER_TYPE)
        for u in self.utility_ascs:
            types.update(slot.type for slot in u.outputs)
        return types

    def with_ascs(self, ascs: tuple[Asc, ...]) -> "AppSpec":
        return replace(self, ascs=ascs)


def type_sequence(asc: Asc, template: AscTemplate) -> list[str]:
    """Input-slot types in left-to-right template order (outputs excluded)."""
    if template not in asc.templates:
        raise ValueError(f"template does not belong to ASC {asc.aid}")
    by_name = {s.name: s for s in asc.inputs}
    return [by_name[t.name].type for t in template.tokens if isinstance(t, SlotRef)]


def validate_spec(spec: AppSpec) -> AppSpec:
    """Check every structural invariant; raise SpecValidationError on failure."""
    seen_aids = set()
    for asc in spec.ascs:
        if asc.aid in seen_aids:
            raise SpecValidationError(f"duplicate AID {asc.aid}", aid=asc.aid)
        if asc.aid <= 0:
            raise SpecValidationError(f"AID must be positive: {asc.aid}", aid=asc.aid)
        seen_aids.add(asc.aid)

    if not spec.action_ascs:
        raise SpecValidationError("spec declares no action ASCs")

    known = spec.declared_types()
    for asc in spec.ascs:
        if asc.kind == "action" and asc.outputs:
            raise SpecValidationError(
                f"action ASC {asc.aid} must not declare outputs", aid=asc.aid
            )
        if asc.kind == "utility" and not asc.outputs:
            raise SpecValidationError(
                f"utility ASC {asc.aid} must declare an output", aid=asc.aid
            )
        slot_names = [s.name for s in asc.inputs] + [s.name for s in asc.outputs]
        if len(set(slot_names)) != len(slot_names):
            raise SpecValidationError(
                f"ASC {asc.aid}: duplicate slot names", aid=asc.aid
            )
        for slot in list(asc.inputs) + list(asc.outputs):
            if slot.type not in known:
                raise SpecValidationError(
                    f"ASC {asc.aid}: undeclared type {slot.type!r}", aid=asc.aid
                )
        if not asc.templates:
            raise SpecValidationError(f"ASC {asc.aid}: no templates", aid=asc.aid)
        declared = sorted(s.name for s in asc.inputs)
        for tmpl in asc.templates:
            if not tmpl.tokens:
                raise SpecValidationError(f"ASC {asc.aid}: empty template", aid=asc.aid)
            used = tmpl.slot_names()
            if sorted(used) != declared or len(set(used)) != len(used):
                raise SpecValidationError(
                    f"ASC {asc.aid}: template {tmpl.render()!r} must use exactly "
                    f"the declared input slots {declared}",
                    aid=asc.aid,
                )
    return spec
