"""Dataset format and accuracy harness.

A dataset is one JSON record per line: command text, the gold AID sequence
(empty for non-groundable), a category label, and the initial world state
inline so every record replays in isolation.  A prediction is correct when
its final action AID equals the gold final AID; non-groundable commands are
correct exactly when the engine returns the empty result.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .engine import GroundingEngine
from .environments import environment_from_snapshot
from .grounding import GroundingConfig
from .learning import AscLearner, AscStore
from .matching import BACKENDS

CATEGORIES = ("0-UC", "1-UC", "2-UC", ">2-UC", "NOG")


class DatasetError(Exception):
    """A dataset record is unloadable or internally inconsistent."""


@dataclass(frozen=True)
class LabeledCommand:
    text: str
    gold_aids: tuple[int, ...]
    category: str
    initial_world: dict

    @property
    def gold_action(self) -> int:
        """Final action AID; 0 encodes non-groundable."""
        return self.gold_aids[-1] if self.gold_aids else 0


@dataclass
class EvalReport:
    variant: str
    overall_accuracy: float
    per_category: dict[str, float]
    per_category_counts: dict[str, tuple[int, int]]
    confusion: list[dict] = field(default_factory=list)
    sequence_match_rate: float = 0.0  # secondary diagnostic, not the headline
    learned_templates: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "overall_accuracy": self.overall_accuracy,
            "per_category": self.per_category,
            "per_category_counts": {
                k: {"correct": c, "total": t}
                for k, (c, t) in self.per_category_counts.items()
            },
            "sequence_match_rate": self.sequence_match_rate,
            "confusion": self.confusion,
            "learned_templates": self.learned_templates,
        }

    def summary_table(self) -> str:
        lines = [
            f"variant: {self.variant}",
            f"overall accuracy: {self.overall_accuracy:.4f}",
            f"full-sequence match rate: {self.sequence_match_rate:.4f}",
            "per category:",
        ]
        for cat in CATEGORIES:
            if cat in self.per_category:
                c, t = self.per_category_counts[cat]
                lines.append(f"  {cat:>6}: {self.per_category[cat]:.4f}  ({c}/{t})")
        return "\n".join(lines)


def categorize(gold_aids: Sequence[int]) -> str:
    """Category from the gold AID list: utility count, or NOG when empty."""
    if not gold_aids:
        return "NOG"
    utilities = len(gold_aids) - 1
    if utilities == 0:
        return "0-UC"
    if utilities == 1:
        return "1-UC"
    if utilities == 2:
        return "2-UC"
    return ">2-UC"


def load_dataset(path: str) -> list[LabeledCommand]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}:{lineno}: bad JSON: {exc}") from exc
            try:
                record = LabeledCommand(
                    text=obj["text"],
                    gold_aids=tuple(obj["gold_aids"]),
                    category=obj["category"],
                    initial_world=obj["world"],
                )
            except KeyError as exc:
                raise DatasetError(f"{path}:{lineno}: missing field {exc}") from exc
            expected = categorize(record.gold_aids)
            if record.category != expected:
                raise DatasetError(
                    f"{path}:{lineno}: category {record.category!r} inconsistent "
                    f"with gold AIDs {list(record.gold_aids)} (expected {expected!r})"
                )
            try:
                environment_from_snapshot(record.initial_world)
            except Exception as exc:
                raise DatasetError(f"{path}:{lineno}: unloadable world: {exc}") from exc
            records.append(record)
    return records


def parse_variant(name: str) -> tuple[str, str]:
    """Split a variant label like "vsm-U" into (backend, ablation)."""
    backend, _, suffix = name.partition("-")
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend in variant {name!r}")
    if suffix not in ("", "R", "U"):
        raise ValueError(f"unknown ablation in variant {name!r}")
    return backend, suffix


def _config_for(backend: str, ablation: str) -> GroundingConfig:
    return GroundingConfig(
        backend=backend,
        rephrase=(ablation != "R"),
        use_utilities=(ablation != "U"),
    )


def run_learner_replay(
    engine: GroundingEngine, store: AscStore, script: list[dict]
) -> list[dict]:
    """Run scripted correction sessions; returns the templates learned.

    Each script entry: {"command", "world", "correct_aid"}.  The session
    answers "no", picks the option for the correct action, and confirms.
    """
    learned = []
    for entry in script:
        env = environment_from_snapshot(entry["world"])
        learner = AscLearner(engine, store, env)
        result = engine.ground(entry["command"], env)
        predicted = result.aid_sequence[-1] if result.aid_sequence else 0
        if predicted == entry["correct_aid"]:
            continue
        session = learner.start_session(entry["command"], result)
        session = learner.answer_verification(session, "no")
        index = next(
            (i for i, o in enumerate(session.options) if o.aid == entry["correct_aid"]),
            None,
        )
        if index is None:
            continue
        session = learner.choose_option(session, index)
        session = learner.confirm_arguments(session, True)
        if session.state == "done_learned":
            learned.append(
                {"aid": entry["correct_aid"], "template": session.learned_template}
            )
    return learned


def evaluate(
    dataset: list[LabeledCommand],
    spec,
    variant: str = "vsm",
    learner_replay: Optional[list[dict]] = None,
) -> EvalReport:
    """Score a variant over a dataset; optionally learn from a replay first."""
    backend, ablation = parse_variant(variant)
    config = _config_for(backend, ablation)
    engine = GroundingEngine(spec, backend=backend, config=config)

    learned = []
    if learner_replay:
        store = AscStore(engine.spec)  # in-memory: replay never touches disk
        learned = run_learner_replay(engine, store, learner_replay)
        engine.reload(store.spec)

    per_cat_total: dict[str, int] = {}
    per_cat_correct: dict[str, int] = {}
    confusion = []
    sequence_matches = 0
    for record in dataset:
        env = environment_from_snapshot(record.initial_world)
        result = engine.ground(record.text, env)
        predicted = result.aid_sequence[-1] if result.aid_sequence else 0
        correct = predicted == record.gold_action
        per_cat_total[record.category] = per_cat_total.get(record.category, 0) + 1
        if correct:
            per_cat_correct[record.category] = per_cat_correct.get(record.category, 0) + 1
        if tuple(result.aid_sequence) == record.gold_aids:
            sequence_matches += 1
        confusion.append(
            {
                "command": record.text,
                "category": record.category,
                "gold": list(record.gold_aids),
                "predicted": list(result.aid_sequence),
                "correct": correct,
            }
        )

    total = sum(per_cat_total.values())
    correct_total = sum(per_cat_correct.values())
    label = variant + ("+learner" if learner_replay else "")
    return EvalReport(
        variant=label,
        overall_accuracy=(correct_total / total) if total else 0.0,
        per_category={
            cat: per_cat_correct.get(cat, 0) / n for cat, n in per_cat_total.items()
        },
        per_category_counts={
            cat: (per_cat_correct.get(cat, 0), n) for cat, n in per_cat_total.items()
        },
        confusion=confusion,
        sequence_match_rate=(sequence_matches / total) if total else 0.0,
        learned_templates=learned,
    )
