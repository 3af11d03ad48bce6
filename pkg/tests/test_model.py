import pytest

from seedcmd.model import (
    PropertyDomain,
    SpecSyntaxError,
    SpecValidationError,
    type_sequence,
)
from seedcmd.specfile import parse_spec, parse_template

MINIMAL = """
app: mini
domains:
  - name: color
    scope: object
    values: [red, blue]
action_ascs:
  - aid: 1
    api: Remove
    templates: ["remove {X1:thing_set}"]
    args: {X1: thing_set}
utility_ascs:
  - aid: 2
    api: GetByColor
    templates: ["{X1:color}"]
    args: {X1: color}
    outputs: {O1: thing_set}
"""


def test_parse_minimal_spec():
    spec = parse_spec(MINIMAL)
    assert spec.app_name == "mini"
    assert [a.aid for a in spec.action_ascs] == [1]
    assert [a.aid for a in spec.utility_ascs] == [2]
    assert spec.derived_set_types() == {"thing_set"}


def test_bundled_blocksworld_shape(blocks_spec):
    assert len(blocks_spec.action_ascs) == 7
    assert len(blocks_spec.utility_ascs) == 5
    assert [a.aid for a in blocks_spec.action_ascs] == [1, 2, 3, 4, 5, 6, 7]
    assert [a.aid for a in blocks_spec.utility_ascs] == [8, 9, 10, 11, 12]
    assert {a.api_name for a in blocks_spec.action_ascs} == {
        "Add", "Remove", "Move", "MoveByUnits", "UpdateColor", "UpdateShape", "Rename",
    }


def test_bundled_webpage_shape(webpage_spec):
    assert len(webpage_spec.action_ascs) == 10
    assert len(webpage_spec.utility_ascs) == 8
    assert [a.aid for a in webpage_spec.action_ascs] == list(range(1, 11))
    assert [a.aid for a in webpage_spec.utility_ascs] == list(range(11, 19))


def test_empty_document_is_syntax_error():
    with pytest.raises(SpecSyntaxError):
        parse_spec("")


def test_missing_top_level_key():
    with pytest.raises(SpecSyntaxError):
        parse_spec("app: x\ndomains: []\n")


def test_duplicate_aid_rejected():
    doc = MINIMAL.replace("aid: 2", "aid: 1")
    with pytest.raises(SpecValidationError) as err:
        parse_spec(doc)
    assert err.value.aid == 1


def test_undeclared_type_rejected():
    doc = MINIMAL.replace("{X1: color}", "{X1: flavor}").replace("{X1:color}", "{X1:flavor}")
    with pytest.raises(SpecValidationError):
        parse_spec(doc)


def test_template_slot_mismatch_rejected():
    doc = MINIMAL.replace('templates: ["remove {X1:thing_set}"]', 'templates: ["remove it"]')
    with pytest.raises(SpecValidationError):
        parse_spec(doc)


def test_utility_without_output_rejected():
    doc = MINIMAL.replace("    outputs: {O1: thing_set}\n", "")
    with pytest.raises(SpecSyntaxError):
        parse_spec(doc)


def test_no_action_asc_rejected():
    doc = """
app: x
domains:
  - name: color
    scope: object
    values: [red]
action_ascs: []
utility_ascs:
  - aid: 1
    api: G
    templates: ["{X1:color}"]
    args: {X1: color}
    outputs: {O1: color}
"""
    with pytest.raises(SpecValidationError):
        parse_spec(doc)


def test_bad_pattern_rejected():
    with pytest.raises(SpecValidationError):
        PropertyDomain(name="broken", scope="object", kind="pattern", pattern="([")


def test_enumerated_domain_must_be_nonempty():
    with pytest.raises(SpecValidationError):
        PropertyDomain(name="empty", scope="object", kind="enumerated", values=())


def test_starred_types_in_file_are_ignored():
    doc = MINIMAL.replace("{X1: thing_set}", "{X1: thing_set*}")
    spec = parse_spec(doc)
    assert all(not s.starred for a in spec.ascs for s in a.inputs)


def test_type_sequence_blocksworld(blocks_spec):
    get_location = blocks_spec.asc(12)
    assert type_sequence(get_location, get_location.templates[0]) == [
        "direction",
        "block_set",
    ]
    remove = blocks_spec.asc(2)
    assert type_sequence(remove, remove.templates[0]) == ["block_set"]


def test_type_sequence_excludes_outputs(blocks_spec):
    utility = blocks_spec.asc(8)
    seq = type_sequence(utility, utility.templates[0])
    assert seq == ["color"]


def test_type_sequence_foreign_template_rejected(blocks_spec):
    move = blocks_spec.asc(3)
    add = blocks_spec.asc(1)
    with pytest.raises(ValueError):
        type_sequence(move, add.templates[0])


def test_zero_slot_template_has_empty_sequence():
    tmpl = parse_template("do nothing", {})
    assert tmpl.slot_names() == []


def test_slot_annotation_must_match_args():
    with pytest.raises(SpecValidationError):
        parse_template("move {X1:location}", {"X1": "block_set"})
