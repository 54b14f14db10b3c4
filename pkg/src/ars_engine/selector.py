"""Diverse aesthetic caption selection.

Given candidate captions from an upstream generator, the selector drops
blacklisted texts, groups the rest by embedding similarity, discards
groups whose mean relevance score falls strictly below a floor, and emits
each surviving group's best sentence, highest-scoring group first.

Grouping is leader clustering by default: candidates are visited in
descending generator confidence, and each joins the first existing group
whose founding member is similar above the threshold, else founds its own
group. The similarity relation is not transitive, so a connected-components
variant over the same threshold graph is available via config.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

from .corpus import normalize_text
from .errors import InputError
from .providers import Embedding, cosine

DEFAULT_SIMILARITY_THRESHOLD = 0.7

GROUPING_METHODS = ("leader", "components")


@dataclass(frozen=True)
class Candidate:
    """One generated caption; embedding and ars are filled by the pipeline."""

    text: str
    confidence: float
    embedding: Embedding | None = None
    ars: float | None = None

    def __post_init__(self) -> None:
        if not normalize_text(self.text):
            raise InputError(f"candidate text is empty after cleaning: {self.text!r}")
        if not isinstance(self.confidence, (int, float)) or not math.isfinite(self.confidence):
            raise InputError(f"candidate confidence must be finite, got {self.confidence!r}")


@dataclass(frozen=True)
class CandidateGroup:
    members: tuple[Candidate, ...]
    mean_ars: float
    representative: Candidate


@dataclass(frozen=True)
class DacsConfig:
    """similarity_threshold in (0,1]; ars_floor finite; blacklist holds
    cleaned (normalize_text) forms; grouping is "leader" or "components"."""

    ars_floor: float
    similarity_threshold: float = DEFAULT_SIMILARITY_THRESHOLD
    blacklist: frozenset[str] = field(default_factory=frozenset)
    max_outputs: int | None = None
    grouping: str = "leader"

    def __post_init__(self) -> None:
        if not (0.0 < self.similarity_threshold <= 1.0):
            raise InputError(
                f"similarity_threshold must lie in (0,1], got {self.similarity_threshold}"
            )
        if not math.isfinite(self.ars_floor):
            raise InputError(f"ars_floor must be finite, got {self.ars_floor}")
        if self.max_outputs is not None and self.max_outputs < 0:
            raise InputError(f"max_outputs must be nonnegative, got {self.max_outputs}")
        if self.grouping not in GROUPING_METHODS:
            raise InputError(f"grouping must be one of {GROUPING_METHODS}, got {self.grouping!r}")


def filter_bad(candidates: Sequence[Candidate], blacklist: Iterable[str]) -> list[Candidate]:
    """Drop candidates whose cleaned text exactly matches a blacklist entry."""
    banned = set(blacklist)
    return [c for c in candidates if normalize_text(c.text) not in banned]


@dataclass
class _Entry:
    candidate: Candidate
    index: int  # position in the input list; the deterministic tie-break

    @property
    def order_key(self) -> tuple[float, int]:
        return (-self.candidate.confidence, self.index)


def _visit_order(candidates: Sequence[Candidate], indices: Sequence[int]) -> list[_Entry]:
    entries = [_Entry(candidate=c, index=i) for c, i in zip(candidates, indices)]
    entries.sort(key=lambda e: e.order_key)
    return entries


def _leader_groups(entries: list[_Entry], threshold: float) -> list[list[_Entry]]:
    groups: list[list[_Entry]] = []
    for entry in entries:
        for group in groups:
            if cosine(entry.candidate.embedding, group[0].candidate.embedding) > threshold:
                group.append(entry)
                break
        else:
            groups.append([entry])
    return groups


def _component_groups(entries: list[_Entry], threshold: float) -> list[list[_Entry]]:
    parent = list(range(len(entries)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            if cosine(entries[i].candidate.embedding, entries[j].candidate.embedding) > threshold:
                parent[find(i)] = find(j)
    by_root: dict[int, list[_Entry]] = {}
    for i, entry in enumerate(entries):
        by_root.setdefault(find(i), []).append(entry)
    # group order follows each component's first (highest-priority) member
    return sorted(by_root.values(), key=lambda g: g[0].order_key)


def group_candidates(
    candidates: Sequence[Candidate],
    threshold: float,
    embedder,
    grouping: str = "leader",
) -> list[list[Candidate]]:
    """Group candidates by embedding similarity above the threshold (strict >).

    Candidates missing embeddings are embedded here. Groups and their
    members come back in deterministic visiting order: descending
    confidence, ties by input position.
    """
    if not (0.0 < threshold <= 1.0):
        raise InputError(f"threshold must lie in (0,1], got {threshold}")
    if grouping not in GROUPING_METHODS:
        raise InputError(f"grouping must be one of {GROUPING_METHODS}, got {grouping!r}")
    embedded = [
        c if c.embedding is not None else replace(c, embedding=embedder.embed(c.text))
        for c in candidates
    ]
    entries = _visit_order(embedded, range(len(embedded)))
    if grouping == "leader":
        groups = _leader_groups(entries, threshold)
    else:
        groups = _component_groups(entries, threshold)
    return [[e.candidate for e in group] for group in groups]


def _pick_representative(group: list[_Entry], score_of: dict[int, float]) -> _Entry:
    return max(group, key=lambda e: (score_of[e.index], e.candidate.confidence, -e.index))


def _select_groups(
    candidates: Sequence[Candidate],
    config: DacsConfig,
    embedder,
    ars_of_text: Callable[[str], float],
    scorer: Callable[[str], float] | None = None,
) -> list[CandidateGroup]:
    survivors: list[tuple[Candidate, int]] = [
        (c, i)
        for i, c in enumerate(candidates)
        if normalize_text(c.text) not in config.blacklist
    ]
    entries = _visit_order(
        [
            replace(c, embedding=embedder.embed(c.text) if c.embedding is None else c.embedding)
            for c, _ in survivors
        ],
        [i for _, i in survivors],
    )
    if config.grouping == "leader":
        raw_groups = _leader_groups(entries, config.similarity_threshold)
    else:
        raw_groups = _component_groups(entries, config.similarity_threshold)

    for entry in entries:
        entry.candidate = replace(entry.candidate, ars=float(ars_of_text(entry.candidate.text)))
    rep_score = {
        e.index: (float(scorer(e.candidate.text)) if scorer is not None else e.candidate.ars)
        for e in entries
    }

    groups: list[tuple[CandidateGroup, _Entry]] = []
    for raw in raw_groups:
        mean_ars = math.fsum(e.candidate.ars for e in raw) / len(raw)
        if mean_ars < config.ars_floor:  # groups exactly at the floor are kept
            continue
        rep = _pick_representative(raw, rep_score)
        groups.append(
            (
                CandidateGroup(
                    members=tuple(e.candidate for e in raw),
                    mean_ars=mean_ars,
                    representative=rep.candidate,
                ),
                rep,
            )
        )
    groups.sort(key=lambda pair: (-pair[1].candidate.ars, -pair[1].candidate.confidence, pair[1].index))
    ordered = [group for group, _ in groups]
    if config.max_outputs is not None:
        ordered = ordered[: config.max_outputs]
    return ordered


def select_groups(
    candidates: Sequence[Candidate],
    config: DacsConfig,
    embedder,
    ars_of_text: Callable[[str], float],
    scorer: Callable[[str], float] | None = None,
) -> list[CandidateGroup]:
    """Full pipeline, returning surviving groups in output order.

    filter -> embed -> group -> score -> drop groups with mean strictly
    below the floor -> order by representative score descending (ties by
    confidence, then input position) -> truncate. When a scorer is given
    it replaces the per-group representative choice only; group filtering
    and output ordering stay on the relevance score.
    """
    return _select_groups(candidates, config, embedder, ars_of_text, scorer)


def select(
    candidates: Sequence[Candidate],
    config: DacsConfig,
    embedder,
    ars_of_text: Callable[[str], float],
) -> list[Candidate]:
    """Each surviving group's highest-scoring sentence, best group first."""
    return [g.representative for g in _select_groups(candidates, config, embedder, ars_of_text)]


def select_with_scorer(
    candidates: Sequence[Candidate],
    config: DacsConfig,
    embedder,
    ars_of_text: Callable[[str], float],
    scorer: Callable[[str], float],
) -> list[Candidate]:
    """Like select, but an injected scorer picks each group's representative."""
    return [g.representative for g in _select_groups(candidates, config, embedder, ars_of_text, scorer)]
