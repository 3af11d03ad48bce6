"""Scoring backends for matching commands against seed-command templates.

Three interchangeable unsupervised scorers: Jaccard overlap on token sets,
a tf-idf vector-space model that pools all templates of one API into a
single document, and cosine similarity of averaged word embeddings.
Variables participate in scoring as their type-name token, so a reduced
command containing ``block_set/X1`` overlaps a template declaring a
``block_set`` slot.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .model import Asc, AscTemplate, SlotRef
from .tagging import TaggedCommand, Variable

JACCARD = "jaccard"
VSM = "vsm"
EMBEDDING = "emb"
BACKENDS = (JACCARD, VSM, EMBEDDING)


@dataclass(frozen=True)
class MatchScore:
    asc_aid: int
    template_index: int
    score: float


def template_tokens(asc: Asc, template: AscTemplate, typed: bool = True) -> list[str]:
    """Template tokens for scoring; slots contribute their type name."""
    by_name = {s.name: s for s in asc.inputs}
    out = []
    for tok in template.tokens:
        if isinstance(tok, SlotRef):
            if typed:
                out.append(by_name[tok.name].type)
        else:
            out.append(tok)
    return out


def query_tokens(query: Union[TaggedCommand, Sequence[str]], typed: bool = True) -> list[str]:
    """Command tokens for scoring; variables contribute their type name."""
    if isinstance(query, TaggedCommand):
        out = []
        for tok in query.tokens:
            if isinstance(tok, Variable):
                if typed:
                    out.append(tok.type)
            else:
                out.append(tok)
        return out
    return list(query)


def score_jaccard(command_tokens: Iterable[str], template_tokens_: Iterable[str]) -> float:
    """|A & B| / |A | B| over token sets; 0 when both sides are empty."""
    a, b = set(command_tokens), set(template_tokens_)
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


def _tfidf_vector(counts: Counter, idf: dict[str, float]) -> dict[str, float]:
    return {t: n * idf[t] for t, n in counts.items() if t in idf}


def _cosine(u: dict[str, float], v: dict[str, float]) -> float:
    dot = sum(w * v[t] for t, w in u.items() if t in v)
    nu = math.sqrt(sum(w * w for w in u.values()))
    nv = math.sqrt(sum(w * w for w in v.values()))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return dot / (nu * nv)


def score_vsm(
    command: Sequence[str], api_documents: dict[int, Sequence[str]]
) -> dict[int, float]:
    """tf-idf cosine of the command against each per-API document.

    tf is the raw count; idf is ln(N/df) over the documents (no smoothing).
    Terms absent from every document contribute nothing.
    """
    if not api_documents:
        raise ValueError("api_documents must be non-empty")
    n_docs = len(api_documents)
    df: Counter = Counter()
    doc_counts = {}
    for aid, doc in api_documents.items():
        counts = Counter(doc)
        doc_counts[aid] = counts
        df.update(set(counts))
    idf = {term: math.log(n_docs / d) for term, d in df.items()}

    qvec = _tfidf_vector(Counter(command), idf)
    return {
        aid: _cosine(qvec, _tfidf_vector(counts, idf))
        for aid, counts in doc_counts.items()
    }


class EmbeddingTable:
    """Token -> vector table loaded from the standard text layout.

    Each line is a token followed by D whitespace-separated numbers; D is
    read from the first line.
    """

    def __init__(self, vectors: dict[str, np.ndarray], dimension: int):
        for tok, vec in vectors.items():
            if vec.shape != (dimension,):
                raise ValueError(f"vector for {tok!r} has wrong dimension")
        self.vectors = vectors
        self.dimension = dimension

    @classmethod
    def load(cls, path: str) -> "EmbeddingTable":
        vectors = {}
        dimension = None
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                parts = line.rstrip().split()
                if not parts:
                    continue
                token, nums = parts[0], parts[1:]
                if dimension is None:
                    dimension = len(nums)
                vec = np.array([float(x) for x in nums], dtype=float)
                if vec.shape != (dimension,):
                    raise ValueError(f"inconsistent dimension at token {token!r}")
                vectors[token] = vec
        if dimension is None:
            raise ValueError(f"empty embedding file: {path}")
        return cls(vectors, dimension)

    def mean_vector(self, tokens: Iterable[str]) -> Optional[np.ndarray]:
        vecs = [self.vectors[t] for t in tokens if t in self.vectors]
        if not vecs:
            return None
        return np.mean(vecs, axis=0)


def score_embedding(
    command: Sequence[str], template: Sequence[str], table: EmbeddingTable
) -> float:
    """Cosine of averaged word vectors; 0 if either side is fully OOV."""
    u = table.mean_vector(command)
    v = table.mean_vector(template)
    if u is None or v is None:
        return 0.0
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def rank(
    candidates: Sequence[tuple[Asc, AscTemplate]],
    query: Union[TaggedCommand, Sequence[str]],
    backend: str,
    corpus: Optional[Sequence[Asc]] = None,
    embeddings: Optional[EmbeddingTable] = None,
    typed: bool = True,
) -> list[MatchScore]:
    """Rank candidate (seed command, template) pairs against a query.

    One MatchScore per API, descending; an API's score is the max over its
    candidate templates (the vsm backend already pools templates into one
    document per API).  Ties break toward the lower AID, then the lower
    template index.  For vsm, ``corpus`` supplies the document collection
    used for idf (defaults to the candidates themselves).
    """
    if not candidates:
        raise ValueError("candidates must be non-empty")
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    qtoks = query_tokens(query, typed=typed)

    if backend == VSM:
        pool = list(corpus) if corpus else [asc for asc, _ in candidates]
        documents: dict[int, list[str]] = {}
        for asc in pool:
            doc = documents.setdefault(asc.aid, [])
            for tmpl in asc.templates:
                doc.extend(template_tokens(asc, tmpl, typed=typed))
        scores = score_vsm(qtoks, documents)
        best: dict[int, MatchScore] = {}
        for asc, _tmpl in candidates:
            if asc.aid not in best:
                best[asc.aid] = MatchScore(asc.aid, 0, scores.get(asc.aid, 0.0))
    else:
        best = {}
        for asc, tmpl in candidates:
            ttoks = template_tokens(asc, tmpl, typed=typed)
            if backend == JACCARD:
                s = score_jaccard(qtoks, ttoks)
            else:
                if embeddings is None:
                    raise ValueError("embedding backend requires a table")
                s = score_embedding(qtoks, ttoks, embeddings)
            t_index = asc.templates.index(tmpl)
            cur = best.get(asc.aid)
            if cur is None or s > cur.score or (s == cur.score and t_index < cur.template_index):
                best[asc.aid] = MatchScore(asc.aid, t_index, s)

    return sorted(best.values(), key=lambda m: (-m.score, m.asc_aid, m.template_index))
