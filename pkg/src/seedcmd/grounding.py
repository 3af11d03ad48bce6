"""Iterative command grounding.

A tagged command is repeatedly shrunk by firing utility seed commands on its
referential sub-expressions (replacing each resolved fragment with the
utility's typed output variable) until the remaining variable signature
matches an action seed command, which is then ranked, bound and returned
together with the utilities fired along the way.

Candidate retrieval is signature-driven:

* utilities must match a sub-expression's renamed variables exactly, i.e.
  the left-to-right type sequence equals a utility template's type sequence
  (renaming X3 -> X1 etc. is what makes positional matching possible);
* actions match on the type multiset of the whole command, with repeated
  variables of a derived set type (block_set, element_set) collapsing into
  one, so "green cube" resolving to two id-set variables still matches a
  single-set action signature.

Sub-expressions aligned to starred action slots are filtered out before any
reduction, which protects literal arguments (target locations, new colors,
quoted text) from being rewritten into object references.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

from .matching import (
    EmbeddingTable,
    MatchScore,
    VSM,
    query_tokens,
    rank,
)
from .model import AppSpec, Asc, type_sequence
from .tagging import (
    EmptyCommandError,
    SynonymLexicon,
    TaggedCommand,
    Variable,
    Vocabulary,
    build_vocabulary,
    prepare_command,
)


class UtilityExecutionError(Exception):
    """A utility API raised while resolving a sub-expression."""


class EmptyResultError(Exception):
    """A utility returned an empty set; the reduction is treated as failed."""


@dataclass(frozen=True)
class SubExpression:
    """A contiguous fragment spanning m consecutive variables.

    ``start``/``end`` are inclusive token indices into the working command;
    the span begins and ends at a variable and contains only word tokens in
    between.
    """

    start: int
    end: int
    tokens: tuple

    @property
    def variables(self) -> list[Variable]:
        return [t for t in self.tokens if isinstance(t, Variable)]

    @property
    def length(self) -> int:
        return len(self.variables)

    def type_sequence(self) -> list[str]:
        return [v.type for v in self.variables]

    def display(self) -> str:
        return " ".join(
            t if isinstance(t, str) else f"{t.type}/{t.name}" for t in self.tokens
        )


@dataclass
class GroundingState:
    working: TaggedCommand
    sub_expressions: list[SubExpression] = field(default_factory=list)
    buffer: dict[int, object] = field(default_factory=dict)  # uid -> runtime value
    fired: list[tuple[int, str, dict]] = field(default_factory=list)
    alias_log: list[dict[str, str]] = field(default_factory=list)
    iteration_count: int = 0
    trace: list[dict] = field(default_factory=list)

    def value_of(self, var: Variable):
        if var.value is not None:
            return var.value
        if var.uid in self.buffer:
            return self.buffer[var.uid]
        raise KeyError(f"variable {var.name} has neither capture nor buffer entry")


@dataclass(frozen=True)
class GroundingResult:
    """Outcome of grounding: fired utility AIDs plus one action, or empty."""

    aid_sequence: tuple[int, ...]
    action_call: Optional[dict]
    trace: tuple[dict, ...]

    @property
    def empty(self) -> bool:
        return not self.aid_sequence

    def to_dict(self) -> dict:
        return {
            "aid_sequence": list(self.aid_sequence),
            "action_call": _json_value(self.action_call),
            "trace": [_json_value(step) for step in self.trace],
        }


def _json_value(value):
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return sorted(_json_value(v) for v in value)
    if isinstance(value, tuple):
        return [_json_value(v) for v in value]
    if isinstance(value, list):
        return [_json_value(v) for v in value]
    return value


@dataclass(frozen=True)
class GroundingConfig:
    backend: str = VSM
    tau: float = 0.0  # a top score <= tau counts as "no match"
    rephrase: bool = True
    use_utilities: bool = True
    cap_factor: int = 4


class Matcher:
    """Backend wrapper binding a scoring method to an application spec."""

    def __init__(self, backend: str = VSM, embeddings: Optional[EmbeddingTable] = None):
        self.backend = backend
        self.embeddings = embeddings

    def _rank(self, ascs: Sequence[Asc], query, corpus, typed=True) -> list[MatchScore]:
        candidates = [(asc, tmpl) for asc in ascs for tmpl in asc.templates]
        return rank(
            candidates,
            query,
            self.backend,
            corpus=corpus,
            embeddings=self.embeddings,
            typed=typed,
        )

    def rank_actions(self, query, candidates: Sequence[Asc], spec: AppSpec):
        return self._rank(candidates, query, corpus=spec.action_ascs)

    def rank_utilities(self, query, candidates: Sequence[Asc], spec: AppSpec):
        return self._rank(candidates, query, corpus=spec.utility_ascs)

    def top_action_overall(self, query, spec: AppSpec) -> Optional[MatchScore]:
        """Best action for the whole command, scored on word tokens only.

        Used for utility-constraint filtering: the action intent lives in
        the words, and letting type tokens vote would pull every command
        containing a color variable toward the color-changing action.
        """
        ranked = self._rank(
            spec.action_ascs,
            query_tokens(query, typed=False),
            corpus=spec.action_ascs,
            typed=False,
        )
        return ranked[0] if ranked else None


# -- sub-expressions -----------------------------------------------------


def enumerate_subexpressions(command: TaggedCommand) -> list[SubExpression]:
    """All length-m sub-expressions for 1 <= m <= n-1, shortest first.

    The full-length window is excluded: it is only ever matched against
    action seed commands, never reduced.
    """
    positions = [i for i, t in enumerate(command.tokens) if isinstance(t, Variable)]
    n = len(positions)
    out = []
    for m in range(1, n):
        for i in range(0, n - m + 1):
            start, end = positions[i], positions[i + m - 1]
            out.append(
                SubExpression(start=start, end=end, tokens=tuple(command.tokens[start : end + 1]))
            )
    return out


def grounding_windows(command: TaggedCommand) -> list[SubExpression]:
    """Sub-expressions the reduction loop walks, in matching order.

    Beyond the strict sub-windows, the window spanning all variables is
    appended last when words surround it: a one-variable command like
    "remove color/X1 block" has no shorter window, yet its variable must
    still be reducible.  A window equal to the entire command stays
    excluded; that one only ever matches actions.
    """
    sp = enumerate_subexpressions(command)
    positions = [i for i, t in enumerate(command.tokens) if isinstance(t, Variable)]
    if positions:
        start, end = positions[0], positions[-1]
        if start > 0 or end < len(command.tokens) - 1:
            sp.append(
                SubExpression(start=start, end=end, tokens=tuple(command.tokens[start : end + 1]))
            )
    return sp


def _starred_uid_set(
    command: TaggedCommand, spec: AppSpec, matcher: Matcher, tau: float
) -> tuple[set[int], Optional[MatchScore]]:
    """Uids of command variables aligned to starred slots of the top action.

    Slots and variables are aligned within each type, right-to-left, so the
    trailing occurrence of a repeated type (the literal argument position)
    is the one protected.
    """
    top = matcher.top_action_overall(command, spec)
    if top is None or top.score <= tau:
        return set(), None
    action = spec.asc(top.asc_aid)
    starred = set()
    variables = command.variables()
    slots_by_type: dict[str, list] = {}
    for slot in sorted(action.inputs, key=lambda s: s.name):
        slots_by_type.setdefault(slot.type, []).append(slot)
    for typ, slots in slots_by_type.items():
        vars_of_type = [v for v in variables if v.type == typ]
        k = min(len(slots), len(vars_of_type))
        # right-align: the last k variables of this type map onto the slots
        for slot, var in zip(slots[-k:], vars_of_type[-k:]):
            if slot.starred:
                starred.add(var.uid)
    return starred, top


def filter_subexpressions(
    sp: list[SubExpression],
    command: TaggedCommand,
    spec: AppSpec,
    matcher: Matcher,
    tau: float = 0.0,
) -> list[SubExpression]:
    """Drop sub-expressions containing variables under a utility constraint."""
    starred, _top = _starred_uid_set(command, spec, matcher, tau)
    if not starred:
        return list(sp)
    return [
        sub
        for sub in sp
        if not any(v.uid in starred for v in sub.variables)
    ]


# -- candidate retrieval ---------------------------------------------------


def rename_for_match(
    query: Union[SubExpression, TaggedCommand],
) -> tuple[TaggedCommand, dict[str, str]]:
    """Dense X1..Xk renaming of a query; returns (renamed, new->old aliases)."""
    if isinstance(query, SubExpression):
        command = TaggedCommand(tokens=tuple(query.tokens))
    else:
        command = query
    return command.renumbered()


def _collapsed_type_multiset(command: TaggedCommand, spec: AppSpec) -> Counter:
    derived = spec.derived_set_types()
    counts: Counter = Counter()
    for typ in command.type_sequence():
        if typ in derived and counts[typ]:
            continue  # repeated object references collapse into one set
        counts[typ] += 1
    return counts


def get_candidate_ascs(
    pool: str,
    query: Union[TaggedCommand, SubExpression],
    spec: AppSpec,
) -> list[Asc]:
    """Seed commands whose input signature matches the query's variables.

    ``pool`` is "action" or "utility".  Actions compare type multisets
    (after collapsing repeated derived-set variables); utilities compare the
    renamed left-to-right type sequence against each template.  Results come
    back in ascending AID order.
    """
    if pool == "action":
        if isinstance(query, SubExpression):
            query = TaggedCommand(tokens=tuple(query.tokens))
        target = _collapsed_type_multiset(query, spec)
        return [
            asc
            for asc in spec.action_ascs
            if Counter(asc.input_types()) == target
        ]
    if pool == "utility":
        seq = (
            query.type_sequence()
            if isinstance(query, SubExpression)
            else query.type_sequence()
        )
        out = []
        for asc in spec.utility_ascs:
            if any(type_sequence(asc, tmpl) == seq for tmpl in asc.templates):
                out.append(asc)
        return out
    raise ValueError(f"unknown pool {pool!r}")


# -- binding ---------------------------------------------------------------


def _bind_action(
    action: Asc, command: TaggedCommand, state: GroundingState
) -> dict[str, object]:
    """Bind command variables to action slots: per slot, the first unused
    variable of the slot's type, left to right."""
    used = set()
    bindings = {}
    variables = command.variables()
    for slot in sorted(action.inputs, key=lambda s: s.name):
        for var in variables:
            if var.uid in used or var.type != slot.type:
                continue
            bindings[slot.name] = state.value_of(var)
            used.add(var.uid)
            break
        else:
            raise KeyError(f"no variable for slot {slot.name}:{slot.type}")
    return bindings


def _bind_utility(
    utility: Asc, sub: SubExpression, state: GroundingState
) -> dict[str, object]:
    """Positional binding of a sub-expression against the matching template."""
    seq = sub.type_sequence()
    for tmpl in utility.templates:
        if type_sequence(utility, tmpl) == seq:
            slot_order = [t.name for t in tmpl.tokens if not isinstance(t, str)]
            return {
                name: state.value_of(var)
                for name, var in zip(slot_order, sub.variables)
            }
    raise KeyError(f"no template of AID {utility.aid} matches {seq}")


# -- reduction ---------------------------------------------------------------


def reduce_command(
    state: GroundingState,
    sub: SubExpression,
    utility: Asc,
    env,
    spec: AppSpec,
    matcher: Matcher,
    score: float = 0.0,
    tau: float = 0.0,
) -> GroundingState:
    """Fire ``utility`` on ``sub`` and rewrite the working command.

    The resolved span is replaced by a single output variable (shown as O1
    in the trace, then densely renamed), the runtime result is buffered, and
    the sub-expression list is re-enumerated and re-filtered.
    """
    bindings = _bind_utility(utility, sub, state)
    try:
        result = env.execute_utility(utility.api_name, bindings)
    except Exception as exc:  # noqa: BLE001 - surfaced as a failed reduction
        raise UtilityExecutionError(str(exc)) from exc
    if isinstance(result, (set, frozenset)) and not result:
        raise EmptyResultError(f"{utility.api_name} returned no objects")

    new_uid = max(
        itertools.chain([0], state.buffer.keys(),
                        (v.uid for v in state.working.variables()))
    ) + 1
    output = Variable(name="O1", type=utility.output_type(), value=None, uid=new_uid)
    tokens = (
        state.working.tokens[: sub.start]
        + (output,)
        + state.working.tokens[sub.end + 1 :]
    )
    pre_rename = TaggedCommand(tokens=tokens, raw=state.working.raw)
    renamed, aliases = pre_rename.renumbered()

    state.buffer[new_uid] = result
    state.fired.append((utility.aid, utility.api_name, bindings))
    state.alias_log.append(aliases)
    state.working = renamed
    state.trace.append(
        {
            "event": "reduced",
            "command": pre_rename.display(),
            "aid": utility.aid,
            "api": utility.api_name,
            "score": score,
            "sub_expression": sub.display(),
            "bindings": _json_value(bindings),
            "output": _json_value(result),
        }
    )
    state.sub_expressions = filter_subexpressions(
        grounding_windows(renamed), renamed, spec, matcher, tau=tau
    )
    return state


# -- the grounding loop -------------------------------------------------------


def ground(
    command: str,
    spec: AppSpec,
    matcher: Matcher,
    env,
    config: Optional[GroundingConfig] = None,
    lexicon: Optional[SynonymLexicon] = None,
    vocab: Optional[Vocabulary] = None,
) -> GroundingResult:
    """Ground a natural-language command to one action API call.

    Every failure mode (nothing to reduce, iteration cap, low scores)
    collapses to the empty result with a reason recorded in the trace.
    """
    config = config or GroundingConfig()
    state = GroundingState(working=TaggedCommand(tokens=()))

    def empty(reason: str) -> GroundingResult:
        state.trace.append({"event": "no_grounding", "reason": reason})
        return GroundingResult(
            aid_sequence=(), action_call=None, trace=tuple(state.trace)
        )

    try:
        tagged = prepare_command(command, spec, lexicon=None, rephrase=False)
        state.trace.append({"event": "tagged", "command": tagged.display()})
        if config.rephrase and lexicon is not None:
            tagged = prepare_command(
                command, spec, lexicon=lexicon, vocab=vocab, rephrase=True
            )
        state.trace.append({"event": "rephrased", "command": tagged.display()})
    except EmptyCommandError:
        return empty("empty command")

    state.working = tagged
    initial_vars = len(tagged.variables())
    cap = config.cap_factor * (initial_vars + 1)

    sp_all = grounding_windows(tagged)
    state.sub_expressions = filter_subexpressions(
        sp_all, tagged, spec, matcher, tau=config.tau
    )
    if len(state.sub_expressions) != len(sp_all):
        state.trace.append(
            {
                "event": "filtered",
                "command": tagged.display(),
                "dropped": [
                    s.display() for s in sp_all if s not in state.sub_expressions
                ],
            }
        )

    attempted_failures: set[tuple[tuple[int, ...], int]] = set()
    j = 0
    while True:
        state.iteration_count += 1
        if state.iteration_count > cap:
            return empty(f"iteration cap {cap} reached")

        action_candidates = get_candidate_ascs("action", state.working, spec)
        if action_candidates:
            ranked = matcher.rank_actions(state.working, action_candidates, spec)
            top = ranked[0]
            if top.score <= config.tau:
                return empty(
                    f"top action AID {top.asc_aid} scored {top.score:.4f} <= tau"
                )
            action = spec.asc(top.asc_aid)
            try:
                bindings = _bind_action(action, state.working, state)
            except KeyError as exc:
                return empty(f"cannot bind action arguments: {exc}")
            state.trace.append(
                {
                    "event": "matched",
                    "command": state.working.display(),
                    "aid": action.aid,
                    "api": action.api_name,
                    "score": top.score,
                    "bindings": _json_value(bindings),
                }
            )
            aids = tuple(aid for aid, _, _ in state.fired) + (action.aid,)
            return GroundingResult(
                aid_sequence=aids,
                action_call={
                    "aid": action.aid,
                    "api": action.api_name,
                    "arguments": bindings,
                },
                trace=tuple(state.trace),
            )

        if not config.use_utilities:
            return empty("no direct action match (utility reduction disabled)")
        if not state.sub_expressions or j > len(state.sub_expressions) - 1:
            return empty("sub-expressions exhausted")

        sub = state.sub_expressions[j]
        utility_candidates = get_candidate_ascs("utility", sub, spec)
        if utility_candidates:
            renamed_sub, _aliases = rename_for_match(sub)
            ranked = matcher.rank_utilities(renamed_sub, utility_candidates, spec)
            top = ranked[0]
            key = (tuple(v.uid for v in sub.variables), top.asc_aid)
            if top.score <= config.tau or key in attempted_failures:
                j += 1
                continue
            utility = spec.asc(top.asc_aid)
            try:
                state = reduce_command(
                    state, sub, utility, env, spec, matcher,
                    score=top.score, tau=config.tau,
                )
                j = 0
                continue
            except (EmptyResultError, UtilityExecutionError) as exc:
                attempted_failures.add(key)
                state.trace.append(
                    {
                        "event": "reduction_failed",
                        "sub_expression": sub.display(),
                        "aid": top.asc_aid,
                        "reason": str(exc),
                    }
                )
                j += 1
                continue
        j += 1


def reduce_fully(
    command: str,
    spec: AppSpec,
    matcher: Matcher,
    env,
    config: Optional[GroundingConfig] = None,
    lexicon: Optional[SynonymLexicon] = None,
    vocab: Optional[Vocabulary] = None,
) -> tuple[TaggedCommand, GroundingState]:
    """Reduce a command as far as utilities allow, ignoring action matches.

    Used for dialogue option generation: the fully reduced command is what
    gets rendered back to the user, so no constraint filtering and no action
    short-circuit apply here.
    """
    config = config or GroundingConfig()
    tagged = prepare_command(
        command, spec, lexicon=lexicon, vocab=vocab, rephrase=config.rephrase
    )
    state = GroundingState(working=tagged)
    state.sub_expressions = grounding_windows(tagged)
    cap = config.cap_factor * (len(tagged.variables()) + 1)
    attempted: set[tuple[tuple[int, ...], int]] = set()
    j = 0
    while state.iteration_count <= cap:
        state.iteration_count += 1
        if not state.sub_expressions or j > len(state.sub_expressions) - 1:
            break
        sub = state.sub_expressions[j]
        candidates = get_candidate_ascs("utility", sub, spec)
        if not candidates:
            j += 1
            continue
        renamed_sub, _ = rename_for_match(sub)
        ranked = matcher.rank_utilities(renamed_sub, candidates, spec)
        top = ranked[0]
        key = (tuple(v.uid for v in sub.variables), top.asc_aid)
        if top.score <= config.tau or key in attempted:
            j += 1
            continue
        try:
            bindings = _bind_utility(spec.asc(top.asc_aid), sub, state)
            result = env.execute_utility(spec.asc(top.asc_aid).api_name, bindings)
            if isinstance(result, (set, frozenset)) and not result:
                raise EmptyResultError("empty result")
        except Exception:  # noqa: BLE001 - any failure just skips this fragment
            attempted.add(key)
            j += 1
            continue
        utility = spec.asc(top.asc_aid)
        new_uid = max(
            itertools.chain([0], state.buffer.keys(),
                            (v.uid for v in state.working.variables()))
        ) + 1
        output = Variable(name="O1", type=utility.output_type(), value=None, uid=new_uid)
        tokens = (
            state.working.tokens[: sub.start]
            + (output,)
            + state.working.tokens[sub.end + 1 :]
        )
        renamed, aliases = TaggedCommand(tokens=tokens, raw=state.working.raw).renumbered()
        state.buffer[new_uid] = result
        state.fired.append((utility.aid, utility.api_name, bindings))
        state.alias_log.append(aliases)
        state.working = renamed
        state.sub_expressions = grounding_windows(renamed)
        j = 0
    return state.working, state
