"""Loading seed-command specifications from YAML files.

The on-disk format is a key-value tree with top-level keys ``app``,
``domains``, ``action_ascs`` and ``utility_ascs``.  Templates are plain
strings using ``{X1:type}`` slot syntax so developers can write them the way
they would write the command itself::

    action_ascs:
      - aid: 3
        api: Move
        templates: ["move {X1:block_set} to {X2:location}"]
        args: {X1: block_set, X2: location}

Any ``*`` suffix on an arg type in the file is ignored; utility-constraint
stars are always recomputed by the marker.
"""

from __future__ import annotations

import os
import re
from typing import Optional, Union

import yaml

from .model import (
    AppSpec,
    Asc,
    AscTemplate,
    PropertyDomain,
    SlotRef,
    SpecSyntaxError,
    SpecValidationError,
    VariableSlot,
    validate_spec,
)

SLOT_TOKEN = re.compile(r"^\{([A-Za-z][A-Za-z0-9]*)(?::([A-Za-z_][A-Za-z0-9_]*))?\}$")


def parse_template(text: str, args: dict[str, str], aid=None) -> AscTemplate:
    """Expand one slot-syntax string into an AscTemplate."""
    tokens = []
    for raw in text.split():
        m = SLOT_TOKEN.match(raw)
        if m:
            name, ann = m.group(1), m.group(2)
            if name not in args:
                raise SpecValidationError(
                    f"template {text!r}: slot {name!r} not in args", aid=aid
                )
            if ann and ann != args[name]:
                raise SpecValidationError(
                    f"template {text!r}: slot {name!r} annotated {ann!r} but "
                    f"declared {args[name]!r}",
                    aid=aid,
                )
            tokens.append(SlotRef(name))
        else:
            word = raw.strip(".,!?;").lower()
            if word:
                tokens.append(word)
    if not tokens:
        raise SpecValidationError(f"template {text!r} is empty", aid=aid)
    return AscTemplate(tokens=tuple(tokens), source=text)


def _clean_type(value: str) -> str:
    # A trailing * in the file is tolerated and dropped; stars are recomputed.
    return str(value).strip().rstrip("*").strip()


def _parse_domain(entry: dict) -> PropertyDomain:
    if not isinstance(entry, dict) or "name" not in entry:
        raise SpecSyntaxError(f"bad domain entry: {entry!r}")
    name = str(entry["name"])
    scope = str(entry.get("scope", "object"))
    if "values" in entry:
        values = tuple(str(v).lower() for v in entry["values"])
        return PropertyDomain(name=name, scope=scope, kind="enumerated", values=values)
    if "pattern" in entry:
        return PropertyDomain(
            name=name, scope=scope, kind="pattern", pattern=str(entry["pattern"])
        )
    raise SpecSyntaxError(f"domain {name!r} needs 'values' or 'pattern'")


def _parse_asc(entry: dict, kind: str) -> Asc:
    for key in ("aid", "api", "templates", "args"):
        if key not in entry:
            raise SpecSyntaxError(
                f"{kind} ASC entry missing {key!r}: {entry!r}"
            )
    aid = entry["aid"]
    if not isinstance(aid, int):
        raise SpecSyntaxError(f"AID must be an integer: {aid!r}")
    args = {str(k): _clean_type(v) for k, v in (entry["args"] or {}).items()}
    inputs = tuple(
        VariableSlot(name=name, type=typ, direction="input")
        for name, typ in sorted(args.items())
    )
    outputs = ()
    if kind == "utility":
        if "outputs" not in entry:
            raise SpecSyntaxError(f"utility ASC {aid} missing 'outputs'")
        outputs = tuple(
            VariableSlot(name=str(name), type=_clean_type(typ), direction="output")
            for name, typ in sorted((entry["outputs"] or {}).items())
        )
    templates = entry["templates"]
    if isinstance(templates, str):
        templates = [templates]
    parsed = tuple(parse_template(str(t), args, aid=aid) for t in templates)
    return Asc(
        aid=aid,
        kind=kind,
        api_name=str(entry["api"]),
        templates=parsed,
        inputs=inputs,
        outputs=outputs,
    )


def parse_spec(source: Union[str, os.PathLike], base_dir: Optional[str] = None) -> AppSpec:
    """Parse a spec document (YAML text or a path to a YAML file).

    Returns a validated AppSpec.  Constraint stars are NOT set here; run
    ``marking.mark_utility_constraints`` on the result.
    """
    path = None
    text = source
    if isinstance(source, os.PathLike) or (
        isinstance(source, str) and "\n" not in source and source.endswith((".yaml", ".yml"))
    ):
        path = os.fspath(source)
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()

    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SpecSyntaxError(f"malformed spec document: {exc}") from exc
    if doc is None:
        raise SpecSyntaxError("empty spec document")
    if not isinstance(doc, dict):
        raise SpecSyntaxError("spec document must be a mapping")
    for key in ("app", "domains", "action_ascs"):
        if key not in doc:
            raise SpecSyntaxError(f"spec document missing top-level key {key!r}")

    domains = tuple(_parse_domain(d) for d in doc["domains"] or [])
    ascs = [_parse_asc(e, "action") for e in doc["action_ascs"] or []]
    ascs += [_parse_asc(e, "utility") for e in doc.get("utility_ascs") or []]

    def _resolve(p):
        if p is None:
            return None
        p = str(p)
        root = base_dir or (os.path.dirname(path) if path else None)
        if root and not os.path.isabs(p):
            return os.path.join(root, p)
        return p

    spec = AppSpec(
        app_name=str(doc["app"]),
        domains=domains,
        ascs=tuple(sorted(ascs, key=lambda a: a.aid)),
        synonym_lexicon_path=_resolve(doc.get("synonyms")),
        embedding_path=_resolve(doc.get("embeddings")),
    )
    return validate_spec(spec)


def data_path(name: str) -> str:
    """Path of a bundled data file (specs, lexicon, datasets)."""
    return os.path.join(os.path.dirname(__file__), "data", name)


def load_bundled_spec(app: str) -> AppSpec:
    """Load one of the bundled application specs by name."""
    return parse_spec(data_path(f"{app}.yaml"))
