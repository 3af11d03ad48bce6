"""Automatic utility-constraint marking.

A user-command fragment that fully matches a utility seed command but only
partially matches an action seed command is ambiguous: rewriting it would
destroy an argument the action needs verbatim (e.g. the target location of
an add).  The marker detects this from type sequences alone: whenever a
utility's full input-type sequence embeds as a subsequence of an action
template's input-type sequence, the action slots it aligns to are starred,
and starred fragments are protected from reduction at grounding time.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Sequence

from .model import AppSpec, SlotRef, type_sequence


def lcs_length(a: Sequence, b: Sequence) -> int:
    """Length of the longest common subsequence of two sequences."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    return prev[len(b)]


def leftmost_embedding(needle: Sequence, haystack: Sequence) -> list[int] | None:
    """Indices of the leftmost embedding of ``needle`` as a subsequence.

    Greedy earliest-match is the leftmost alignment; returns None when
    ``needle`` is not a subsequence of ``haystack``.
    """
    positions = []
    i = 0
    for idx, item in enumerate(haystack):
        if i < len(needle) and item == needle[i]:
            positions.append(idx)
            i += 1
    return positions if i == len(needle) else None


def starred_variable_names(spec: AppSpec) -> dict[int, set[str]]:
    """Compute the star set per action AID without touching the spec.

    For every (action template, utility template) pair: if the utility's
    input-type sequence is fully contained (as a subsequence) in the action
    template's, the action variables at the leftmost-aligned positions get a
    star.  Stars are unioned over all utilities and template pairs.
    """
    stars: dict[int, set[str]] = {a.aid: set() for a in spec.action_ascs}
    for action in spec.action_ascs:
        by_name = {s.name: s for s in action.inputs}
        for a_tmpl in action.templates:
            a_seq = type_sequence(action, a_tmpl)
            slot_order = [t.name for t in a_tmpl.tokens if isinstance(t, SlotRef)]
            for utility in spec.utility_ascs:
                for u_tmpl in utility.templates:
                    u_seq = type_sequence(utility, u_tmpl)
                    if not u_seq:
                        continue
                    if lcs_length(u_seq, a_seq) != len(u_seq):
                        continue
                    aligned = leftmost_embedding(u_seq, a_seq)
                    for pos in aligned:
                        stars[action.aid].add(by_name[slot_order[pos]].name)
    return stars


def mark_utility_constraints(spec: AppSpec) -> AppSpec:
    """Return a copy of the spec with utility-constraint stars recomputed.

    Idempotent: existing star flags are discarded first.
    """
    stars = starred_variable_names(spec)
    new_ascs = []
    for asc in spec.ascs:
        if asc.kind != "action":
            new_ascs.append(
                replace(
                    asc,
                    inputs=tuple(replace(s, starred=False) for s in asc.inputs),
                )
            )
            continue
        marked = stars.get(asc.aid, set())
        new_inputs = tuple(
            replace(s, starred=(s.name in marked)) for s in asc.inputs
        )
        new_ascs.append(replace(asc, inputs=new_inputs))
    return spec.with_ascs(tuple(new_ascs))


def load_spec(source, base_dir=None) -> AppSpec:
    """Parse and constraint-mark a spec in one step."""
    from .specfile import parse_spec

    return mark_utility_constraints(parse_spec(source, base_dir=base_dir))
