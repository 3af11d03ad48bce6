"""Convenience facade binding a spec, matcher backend and lexicon together."""

from __future__ import annotations

import os
from typing import Optional, Union

from .grounding import (
    GroundingConfig,
    GroundingResult,
    Matcher,
    ground,
    reduce_fully,
)
from .marking import load_spec, mark_utility_constraints
from .matching import EmbeddingTable, VSM
from .model import AppSpec
from .specfile import data_path
from .tagging import SynonymLexicon, build_vocabulary


class GroundingEngine:
    """One application's grounding stack: spec, vocabulary, lexicon, matcher."""

    def __init__(
        self,
        spec: Union[AppSpec, str, os.PathLike],
        backend: str = VSM,
        config: Optional[GroundingConfig] = None,
    ):
        if not isinstance(spec, AppSpec):
            spec = load_spec(spec)
        else:
            spec = mark_utility_constraints(spec)
        self.spec = spec
        self.config = config or GroundingConfig(backend=backend)
        if self.config.backend != backend and config is None:
            self.config = GroundingConfig(backend=backend)
        self.backend = self.config.backend

        self.lexicon = None
        if spec.synonym_lexicon_path and os.path.exists(spec.synonym_lexicon_path):
            self.lexicon = SynonymLexicon.load(spec.synonym_lexicon_path)
        embeddings = None
        if self.backend == "emb":
            path = spec.embedding_path
            if not path or not os.path.exists(path):
                raise FileNotFoundError(
                    "embedding backend selected but the spec names no embedding file"
                )
            embeddings = EmbeddingTable.load(path)
        self.matcher = Matcher(backend=self.backend, embeddings=embeddings)
        self.vocab = build_vocabulary(spec)

    def reload(self, spec: AppSpec):
        """Swap in an updated spec (e.g. after learning a new template)."""
        self.spec = mark_utility_constraints(spec)
        self.vocab = build_vocabulary(self.spec)

    def ground(self, command: str, env, config: Optional[GroundingConfig] = None) -> GroundingResult:
        return ground(
            command,
            self.spec,
            self.matcher,
            env,
            config=config or self.config,
            lexicon=self.lexicon,
            vocab=self.vocab,
        )

    def reduce_fully(self, command: str, env):
        return reduce_fully(
            command,
            self.spec,
            self.matcher,
            env,
            config=self.config,
            lexicon=self.lexicon,
            vocab=self.vocab,
        )


def bundled_engine(app: str, backend: str = VSM, config=None) -> GroundingEngine:
    """Engine over one of the bundled application specs."""
    return GroundingEngine(data_path(f"{app}.yaml"), backend=backend, config=config)
