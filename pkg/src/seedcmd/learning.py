"""Interactive learning of new seed-command templates from user corrections.

After each grounding the user is asked to verify the outcome.  On a "no",
the fully reduced command is rendered back in natural language once per
plausible action API, ranked by match score; the user picks the intended
action (possibly after rephrasing), confirms the detected argument values,
and the reduced phrasing becomes a new template for that action, so the
same wording grounds directly next time.
"""

from __future__ import annotations

import itertools
import os
import threading
import uuid
from dataclasses import dataclass, field
from typing import Optional

import yaml

from .engine import GroundingEngine
from .grounding import GroundingResult
from .marking import mark_utility_constraints
from .matching import rank
from .model import Asc, AppSpec, SpecError, SpecValidationError
from .specfile import parse_template
from .tagging import TaggedCommand, Variable

VERIFY_PROMPT = "Am I correct? [yes/No]"

AWAITING_VERIFICATION = "awaiting_verification"
AWAITING_CHOICE = "awaiting_choice"
AWAITING_ARG_CONFIRM = "awaiting_arg_confirm"
DONE_LEARNED = "done_learned"
DONE_CONFIRMED = "done_confirmed"
DONE_FAILED = "done_failed"

TERMINAL_STATES = (DONE_LEARNED, DONE_CONFIRMED, DONE_FAILED)


class InvalidStateError(Exception):
    """Operation applied in a protocol state that does not allow it."""


class IndexOutOfRangeError(Exception):
    pass


@dataclass(frozen=True)
class RankedOption:
    """One candidate action rendered as a concrete natural-language command."""

    aid: int
    api_name: str
    nl_text: str
    score: float
    bindings: dict

    def to_dict(self) -> dict:
        from .grounding import _json_value

        return {
            "aid": self.aid,
            "api": self.api_name,
            "nl_text": self.nl_text,
            "score": self.score,
            "bindings": _json_value(self.bindings),
        }


@dataclass
class LearnerSession:
    session_id: str
    original_command: str
    current_command: str
    state: str = AWAITING_VERIFICATION
    prompt: str = VERIFY_PROMPT
    options: list[RankedOption] = field(default_factory=list)
    attempt: int = 0
    max_attempts: int = 3
    chosen_index: Optional[int] = None
    learned_asc: Optional[Asc] = None
    learned_template: Optional[str] = None
    grounding: Optional[GroundingResult] = None
    reduced: Optional[TaggedCommand] = None
    reduced_values: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "original_command": self.original_command,
            "current_command": self.current_command,
            "state": self.state,
            "prompt": self.prompt,
            "options": [o.to_dict() for o in self.options],
            "attempt": self.attempt,
            "max_attempts": self.max_attempts,
            "chosen_index": self.chosen_index,
            "learned_template": self.learned_template,
            "learned_aid": self.learned_asc.aid if self.learned_asc else None,
        }


class AscStore:
    """Mutable holder of an application spec plus learned templates.

    Learned templates persist to a sidecar file next to the developer spec
    (never rewriting it) and are replayed on load.  Reads see a consistent
    AppSpec reference; writes are serialized.
    """

    def __init__(self, spec: AppSpec, sidecar_path: Optional[str] = None):
        self._lock = threading.Lock()
        self._spec = mark_utility_constraints(spec)
        self.sidecar_path = sidecar_path
        if sidecar_path and os.path.exists(sidecar_path):
            for entry in self._read_sidecar():
                self.add_template(entry["aid"], entry["template"], persist=False)

    @property
    def spec(self) -> AppSpec:
        return self._spec

    def _read_sidecar(self) -> list[dict]:
        with open(self.sidecar_path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or []
        return [e for e in data if isinstance(e, dict) and "aid" in e and "template" in e]

    def _append_sidecar(self, aid: int, template: str):
        existing = []
        if os.path.exists(self.sidecar_path):
            existing = self._read_sidecar()
        existing.append({"aid": aid, "template": template})
        with open(self.sidecar_path, "w", encoding="utf-8") as fh:
            yaml.safe_dump(existing, fh, sort_keys=False)

    def add_template(self, aid: int, template_str: str, persist: bool = True) -> Asc:
        """Attach one more template to an existing action; dedup; re-mark."""
        with self._lock:
            asc = self._spec.asc(aid)
            args = {s.name: s.type for s in asc.inputs}
            tmpl = parse_template(template_str, args, aid=aid)
            if sorted(tmpl.slot_names()) != sorted(args):
                raise SpecValidationError(
                    f"template {template_str!r} must use exactly the slots "
                    f"{sorted(args)} of AID {aid}",
                    aid=aid,
                )
            normalized = tuple(tmpl.tokens)
            if any(tuple(t.tokens) == normalized for t in asc.templates):
                return self._spec.asc(aid)
            new_asc = Asc(
                aid=asc.aid,
                kind=asc.kind,
                api_name=asc.api_name,
                templates=asc.templates + (tmpl,),
                inputs=asc.inputs,
                outputs=asc.outputs,
            )
            new_ascs = tuple(new_asc if a.aid == aid else a for a in self._spec.ascs)
            self._spec = mark_utility_constraints(self._spec.with_ascs(new_ascs))
            if persist and self.sidecar_path:
                self._append_sidecar(aid, template_str)
            return self._spec.asc(aid)


def _render_value(value, env) -> str:
    if env is not None and hasattr(env, "display_value"):
        return env.display_value(value)
    if isinstance(value, (set, frozenset)):
        return ", ".join(str(v) for v in sorted(value))
    if isinstance(value, tuple) and len(value) == 2:
        return f"({value[0]}, {value[1]})"
    return str(value)


class AscLearner:
    """Drives learner sessions against one engine + environment pair."""

    def __init__(self, engine: GroundingEngine, store: AscStore, env,
                 max_attempts: int = 3):
        self.engine = engine
        self.store = store
        self.env = env
        self.max_attempts = max_attempts
        engine.reload(store.spec)

    # -- protocol steps ------------------------------------------------------

    def start_session(self, command: str, result: GroundingResult,
                      session_id: Optional[str] = None) -> LearnerSession:
        if result.empty:
            summary = "I could not ground that command."
        else:
            call = result.action_call
            summary = f"I would call {call['api']} (AID {call['aid']})."
        return LearnerSession(
            session_id=session_id or uuid.uuid4().hex,
            original_command=command,
            current_command=command,
            state=AWAITING_VERIFICATION,
            prompt=f"{summary} {VERIFY_PROMPT}",
            max_attempts=self.max_attempts,
            grounding=result,
        )

    def answer_verification(self, session: LearnerSession, answer: str) -> LearnerSession:
        if session.state != AWAITING_VERIFICATION:
            raise InvalidStateError(f"cannot verify in state {session.state}")
        answer = (answer or "silence").lower()
        if answer in ("yes", "silence"):
            session.state = DONE_CONFIRMED
            session.prompt = "Okay."
            return session
        if answer != "no":
            raise InvalidStateError(f"unrecognized answer {answer!r}")
        session.attempt = 1
        session.options = self.generate_options(session)
        session.state = AWAITING_CHOICE
        session.prompt = "Which of these did you mean?"
        return session

    def generate_options(self, session: LearnerSession) -> list[RankedOption]:
        """Rank one rendered command per action API against the reduced command.

        The command is reduced as far as utilities allow (references
        resolved eagerly), each variable is substituted by its concrete
        value, and an action qualifies only if at least one of its argument
        types has a value available in the reduced command.
        """
        reduced, state = self.engine.reduce_fully(session.current_command, self.env)
        session.reduced = reduced
        session.reduced_values = {}
        for var in reduced.variables():
            try:
                session.reduced_values[var.uid] = state.value_of(var)
            except KeyError:
                continue

        rendered_tokens = []
        for tok in reduced.tokens:
            if isinstance(tok, Variable):
                value = session.reduced_values.get(tok.uid, tok.value)
                rendered_tokens.append(_render_value(value, self.env))
            else:
                rendered_tokens.append(tok)
        nl_text = " ".join(rendered_tokens)

        reduced_types = set(reduced.type_sequence())
        options = []
        spec = self.store.spec
        for asc in spec.action_ascs:
            if not (set(asc.input_types()) & reduced_types):
                continue
            candidates = [(asc, tmpl) for tmpl in asc.templates]
            scores = rank(
                candidates,
                reduced,
                self.engine.backend,
                corpus=spec.action_ascs,
                embeddings=self.engine.matcher.embeddings,
            )
            score = scores[0].score if scores else 0.0
            bindings = self._bind_by_type(asc, reduced, session.reduced_values)
            options.append(
                RankedOption(
                    aid=asc.aid,
                    api_name=asc.api_name,
                    nl_text=nl_text,
                    score=score,
                    bindings=bindings,
                )
            )
        options.sort(key=lambda o: (-o.score, o.aid))
        return options

    def _bind_by_type(self, asc: Asc, reduced: TaggedCommand, values: dict) -> dict:
        used = set()
        bindings = {}
        variables = reduced.variables()
        for slot in sorted(asc.inputs, key=lambda s: s.name):
            for var in variables:
                if var.uid in used or var.type != slot.type:
                    continue
                bindings[slot.name] = values.get(var.uid, var.value)
                used.add(var.uid)
                break
        return bindings

    def choose_option(self, session: LearnerSession, choice,
                      rephrased: Optional[str] = None) -> LearnerSession:
        if session.state != AWAITING_CHOICE:
            raise InvalidStateError(f"cannot choose in state {session.state}")
        if choice == "reject":
            if rephrased and session.attempt < session.max_attempts:
                session.attempt += 1
                session.current_command = rephrased
                session.options = self.generate_options(session)
                session.prompt = "Which of these did you mean?"
                return session
            session.state = DONE_FAILED
            session.prompt = "No new command learned."
            return session
        index = int(choice)
        if not (0 <= index < len(session.options)):
            raise IndexOutOfRangeError(
                f"option {index} out of range (have {len(session.options)})"
            )
        session.chosen_index = index
        option = session.options[index]
        args = ", ".join(
            f"{k}={_render_value(v, self.env)}" for k, v in sorted(option.bindings.items())
        )
        session.state = AWAITING_ARG_CONFIRM
        session.prompt = f"{option.api_name}({args}) - are these argument values correct?"
        return session

    def confirm_arguments(self, session: LearnerSession, confirmed: bool) -> LearnerSession:
        if session.state != AWAITING_ARG_CONFIRM:
            raise InvalidStateError(f"cannot confirm in state {session.state}")
        if not confirmed:
            session.state = AWAITING_CHOICE
            session.prompt = "Which of these did you mean?"
            return session
        option = session.options[session.chosen_index]
        template = self._template_from_reduced(session.reduced)
        try:
            learned = self.store.add_template(option.aid, template)
        except SpecError as exc:
            session.state = DONE_FAILED
            session.prompt = f"Could not learn that phrasing: {exc}"
            return session
        self.engine.reload(self.store.spec)
        session.learned_asc = learned
        session.learned_template = template
        session.state = DONE_LEARNED
        session.prompt = f"Learned a new phrasing for {option.api_name}."
        return session

    @staticmethod
    def _template_from_reduced(reduced: TaggedCommand) -> str:
        parts = []
        counter = itertools.count(1)
        for tok in reduced.tokens:
            if isinstance(tok, Variable):
                parts.append("{X%d:%s}" % (next(counter), tok.type))
            else:
                parts.append(tok)
        return " ".join(parts)
