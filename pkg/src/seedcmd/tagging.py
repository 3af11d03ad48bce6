"""Tagging and rephrasing of user commands.

Tagging replaces domain values in a command with typed, numbered variables:
enumerated values by dictionary lookup, locations/names/quoted text by the
domain regexes, bare integers by the built-in ``number`` type.  Rephrasing
then rewrites out-of-vocabulary words to synonyms the seed-command templates
(or the tag dictionaries) actually contain, so that lexical variation does
not defeat matching.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Union

from .model import AppSpec, BUILTIN_NUMBER_TYPE, NUMBER_PATTERN

STOPWORDS = frozenset({"the", "a", "an", "to", "of", "at", "on", "with", "and", "as", "by"})

_PUNCT_STRIP = ".,!?;:'\"()[]"

# "row 2 and column 3" means the same cell as "(2, 3)".
_ROW_COL = re.compile(r"row\s+(\d+)\s*(?:,\s*|and\s+)?\s*column\s+(\d+)", re.IGNORECASE)


class EmptyCommandError(ValueError):
    """Raised for empty or whitespace-only commands."""


@dataclass(frozen=True)
class Variable:
    """A typed variable produced by tagging or by a utility reduction.

    ``value`` is the literal captured from the command; reduction outputs
    have value None and live in the grounding buffer instead.  ``uid`` is a
    stable identity that survives renaming.
    """

    name: str
    type: str
    value: Optional[str] = None
    uid: int = -1


TaggedToken = Union[str, Variable]


@dataclass(frozen=True)
class TaggedCommand:
    """A command as a sequence of word tokens and typed variables."""

    tokens: tuple[TaggedToken, ...]
    raw: str = ""

    def variables(self) -> list[Variable]:
        return [t for t in self.tokens if isinstance(t, Variable)]

    def words(self) -> list[str]:
        return [t for t in self.tokens if isinstance(t, str)]

    def type_sequence(self) -> list[str]:
        return [v.type for v in self.variables()]

    def display(self) -> str:
        return " ".join(
            t if isinstance(t, str) else f"{t.type}/{t.name}" for t in self.tokens
        )

    def substituted(self) -> list[str]:
        """Token sequence with each variable replaced by its captured value."""
        out = []
        for t in self.tokens:
            out.append(t if isinstance(t, str) else (t.value or f"{t.type}/{t.name}"))
        return out

    def renumbered(self) -> tuple["TaggedCommand", dict[str, str]]:
        """Dense left-to-right renaming to X1..Xn; returns (command, aliases).

        ``aliases`` maps each new name to the previous name.
        """
        new_tokens = []
        aliases = {}
        idx = 0
        for t in self.tokens:
            if isinstance(t, Variable):
                idx += 1
                new_name = f"X{idx}"
                aliases[new_name] = t.name
                new_tokens.append(replace(t, name=new_name))
            else:
                new_tokens.append(t)
        return TaggedCommand(tokens=tuple(new_tokens), raw=self.raw), aliases


@dataclass(frozen=True)
class Vocabulary:
    """All words appearing in an application's seed-command templates."""

    words: frozenset[str]

    def __contains__(self, word: str) -> bool:
        return word in self.words


class SynonymLexicon:
    """Static word/phrase -> synonyms table (keys lowercase, tab-separated file)."""

    def __init__(self, entries: Optional[dict[str, list[str]]] = None):
        self.entries = {k.lower(): list(v) for k, v in (entries or {}).items()}
        self._max_key_words = max(
            (len(k.split()) for k in self.entries), default=1
        )

    @classmethod
    def load(cls, path: str) -> "SynonymLexicon":
        entries = {}
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, _, syns = line.partition("\t")
                entries[key.strip().lower()] = [
                    s.strip() for s in syns.split(",") if s.strip()
                ]
        return cls(entries)

    def get(self, key: str) -> list[str]:
        return self.entries.get(key.lower(), [])


def build_vocabulary(spec: AppSpec) -> Vocabulary:
    """Collect every word token of every template across all seed commands."""
    words = set()
    for asc in spec.ascs:
        for tmpl in asc.templates:
            words.update(tmpl.word_tokens())
    return Vocabulary(words=frozenset(words))


def enumerated_values(spec: AppSpec) -> set[str]:
    vals = set()
    for d in spec.domains:
        if d.kind == "enumerated":
            vals.update(d.values)
    return vals


def _clean_word(raw: str) -> str:
    return raw.strip(_PUNCT_STRIP).lower()


def _pattern_spans(text: str, spec: AppSpec) -> list[tuple[int, int, str, str]]:
    """Non-overlapping (start, end, type, value) spans for pattern domains.

    Leftmost match wins; overlapping ties prefer the longer match, then the
    earlier-declared domain.  The built-in number pattern has lowest priority.
    """
    candidates = []
    for order, domain in enumerate(spec.domains):
        if domain.kind != "pattern":
            continue
        for m in domain.compiled().finditer(text):
            candidates.append((m.start(), -(m.end() - m.start()), order, m.end(), domain.name, m.group()))
    for m in NUMBER_PATTERN.finditer(text):
        candidates.append((m.start(), -(m.end() - m.start()), len(spec.domains), m.end(), BUILTIN_NUMBER_TYPE, m.group()))

    spans = []
    taken_until = -1
    for start, _neg_len, _order, end, name, value in sorted(candidates):
        if start <= taken_until:
            continue
        spans.append((start, end, name, value))
        taken_until = end - 1
    return spans


def _tag_enumerated(tokens: list[TaggedToken], spec: AppSpec) -> list[TaggedToken]:
    """Replace word-token runs equal to enumerated domain values with variables.

    Longest value (in words) first; ties broken by domain declaration order.
    """
    values = []  # (word_count, order, value_words, domain_name)
    for order, domain in enumerate(spec.domains):
        if domain.kind != "enumerated":
            continue
        for value in domain.values:
            vw = value.split()
            values.append((-len(vw), order, vw, domain.name, value))
    values.sort(key=lambda item: (item[0], item[1]))

    out = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if isinstance(tok, Variable):
            out.append(tok)
            i += 1
            continue
        matched = False
        for _neg, _order, vw, domain_name, value in values:
            n = len(vw)
            window = tokens[i : i + n]
            if len(window) == n and all(
                isinstance(w, str) and w == vw[k] for k, w in enumerate(window)
            ):
                out.append(Variable(name="?", type=domain_name, value=value))
                i += n
                matched = True
                break
        if not matched:
            out.append(tok)
            i += 1
    return out


def _number_variables(tokens: Iterable[TaggedToken], raw: str) -> TaggedCommand:
    numbered = []
    idx = 0
    uid = 0
    for t in tokens:
        if isinstance(t, Variable):
            idx += 1
            uid += 1
            numbered.append(replace(t, name=f"X{idx}", uid=t.uid if t.uid > 0 else uid))
        else:
            numbered.append(t)
    return TaggedCommand(tokens=tuple(numbered), raw=raw)


def apply_rewrites(command: str) -> str:
    """Textual rewrites applied before tagging (row/column to coordinates)."""
    return _ROW_COL.sub(lambda m: f"({m.group(1)}, {m.group(2)})", command)


def tag_command(command: str, spec: AppSpec) -> TaggedCommand:
    """Tag domain values in ``command`` as typed variables X1..Xn."""
    if not command or not command.strip():
        raise EmptyCommandError("empty command")
    text = apply_rewrites(command)

    spans = _pattern_spans(text, spec)
    tokens: list[TaggedToken] = []
    cursor = 0
    for start, end, type_name, value in spans:
        for raw_word in text[cursor:start].split():
            word = _clean_word(raw_word)
            if word:
                tokens.append(word)
        tokens.append(Variable(name="?", type=type_name, value=value))
        cursor = end
    for raw_word in text[cursor:].split():
        word = _clean_word(raw_word)
        if word:
            tokens.append(word)

    tokens = _tag_enumerated(tokens, spec)
    return _number_variables(tokens, raw=command)


def retag_words(tagged: TaggedCommand, spec: AppSpec) -> TaggedCommand:
    """Re-run value tagging over word tokens (after rephrasing introduced new ones)."""
    tokens: list[TaggedToken] = []
    for t in tagged.tokens:
        if isinstance(t, Variable):
            tokens.append(t)
            continue
        matched = None
        for domain in spec.domains:
            if domain.kind == "pattern" and domain.compiled().fullmatch(t):
                matched = Variable(name="?", type=domain.name, value=t)
                break
        if matched is None and NUMBER_PATTERN.fullmatch(t):
            matched = Variable(name="?", type=BUILTIN_NUMBER_TYPE, value=t)
        tokens.append(matched if matched is not None else t)
    tokens = _tag_enumerated(tokens, spec)
    # Fresh uids must stay unique: reuse the highest existing one as the base.
    base = max((v.uid for v in tagged.variables()), default=0)
    out = []
    idx = 0
    next_uid = base
    for t in tokens:
        if isinstance(t, Variable):
            idx += 1
            if t.uid <= 0:
                next_uid += 1
                t = replace(t, uid=next_uid)
            out.append(replace(t, name=f"X{idx}"))
        else:
            out.append(t)
    return TaggedCommand(tokens=tuple(out), raw=tagged.raw)


def rephrase_command(
    tagged: TaggedCommand,
    vocab: Union[Vocabulary, frozenset, set],
    lexicon: SynonymLexicon,
) -> TaggedCommand:
    """Rewrite out-of-vocabulary words to in-vocabulary synonyms.

    Multi-word lexicon keys are tried before single words; stopwords are
    exempt; variables are untouched.  Words with no usable synonym pass
    through unchanged, so the operation is idempotent.
    """
    words = vocab.words if isinstance(vocab, Vocabulary) else frozenset(vocab)

    def in_vocab(token: str) -> bool:
        return token in words

    def usable(synonym: str) -> bool:
        return all(in_vocab(w) for w in synonym.split())

    tokens = list(tagged.tokens)
    out: list[TaggedToken] = []
    i = 0
    max_len = max(lexicon._max_key_words, 1)
    while i < len(tokens):
        tok = tokens[i]
        if isinstance(tok, Variable):
            out.append(tok)
            i += 1
            continue
        replaced = False
        for n in range(min(max_len, len(tokens) - i), 0, -1):
            window = tokens[i : i + n]
            if not all(isinstance(w, str) for w in window):
                continue
            phrase = " ".join(window)
            if n == 1 and (phrase in STOPWORDS or in_vocab(phrase)):
                continue
            if n > 1 and all(in_vocab(w) or w in STOPWORDS for w in window):
                continue
            for synonym in lexicon.get(phrase):
                if usable(synonym):
                    out.extend(synonym.split())
                    i += n
                    replaced = True
                    break
            if replaced:
                break
        if not replaced:
            out.append(tok)
            i += 1
    return TaggedCommand(tokens=tuple(out), raw=tagged.raw)


def prepare_command(
    command: str,
    spec: AppSpec,
    lexicon: Optional[SynonymLexicon] = None,
    vocab: Optional[Vocabulary] = None,
    rephrase: bool = True,
) -> TaggedCommand:
    """Full tagging pipeline: tag, rephrase, re-tag rephrased words.

    Rephrasing targets are the template vocabulary plus all enumerated domain
    values, so a synonym may land either on a template word or on a taggable
    value (e.g. "down" -> "below", which then tags as a direction).
    """
    tagged = tag_command(command, spec)
    if not rephrase or lexicon is None:
        return tagged
    vocab = vocab or build_vocabulary(spec)
    targets = frozenset(vocab.words | enumerated_values(spec))
    rephrased = rephrase_command(tagged, targets, lexicon)
    return retag_words(rephrased, spec)
