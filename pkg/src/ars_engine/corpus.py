"""Corpus model: images, comments, sentences, and the tokenizer.

The tokenizer defined here is the single tokenization rule for the whole
engine. Word-list loading, tf-idf statistics, scoring, and candidate
cleaning all call into this module so that token identity is decided in
exactly one place.

Corpus files are JSONL, one image per line:

    {"image_id": "img-1", "aesthetic_score": 5.2,
     "comments": [{"comment_id": "c1", "text": "Great shot! Love the colors."}]}

``aesthetic_score`` may be null or absent; when present it must lie in
[1, 10]. Comment text is split into sentences on ``.``, ``!`` and ``?``,
then each sentence is tokenized. Comments with no surviving sentences are
dropped (counted, not fatal).
"""

from __future__ import annotations

import hashlib
import io
import json
import re
from dataclasses import dataclass
from typing import Iterator

from .errors import CorpusFormatError

_TERMINATORS = re.compile(r"[.!?]")

SCORE_MIN = 1.0
SCORE_MAX = 10.0


@dataclass(frozen=True)
class Sentence:
    """One tokenized sentence; ``raw_text`` keeps the original fragment."""

    raw_text: str
    tokens: tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class Comment:
    comment_id: str
    sentences: tuple[Sentence, ...]


@dataclass(frozen=True)
class ImageRecord:
    image_id: str
    comments: tuple[Comment, ...]
    aesthetic_score: float | None = None


@dataclass(frozen=True)
class IngestCounters:
    """What load_corpus saw: kept counts plus dropped empties."""

    images: int = 0
    comments: int = 0
    sentences: int = 0
    dropped_comments: int = 0
    dropped_sentences: int = 0


class Corpus:
    """Immutable collection of images, indexed by image_id."""

    def __init__(self, images: tuple[ImageRecord, ...], ingest: IngestCounters | None = None):
        self.images = tuple(images)
        self.ingest = ingest if ingest is not None else IngestCounters(
            images=len(self.images),
            comments=sum(len(img.comments) for img in self.images),
            sentences=sum(len(c.sentences) for img in self.images for c in img.comments),
        )
        self._by_id = {img.image_id: img for img in self.images}
        if len(self._by_id) != len(self.images):
            raise CorpusFormatError("duplicate image_id in corpus")

    def __len__(self) -> int:
        return len(self.images)

    def __eq__(self, other: object) -> bool:
        # ingest counters are load metadata, not content
        if not isinstance(other, Corpus):
            return NotImplemented
        return self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def image(self, image_id: str) -> ImageRecord:
        try:
            return self._by_id[image_id]
        except KeyError:
            raise CorpusFormatError(f"unknown image_id: {image_id!r}") from None


def _strip_edges(token: str) -> str:
    start = 0
    end = len(token)
    while start < end and not token[start].isalnum():
        start += 1
    while end > start and not token[end - 1].isalnum():
        end -= 1
    return token[start:end]


def tokenize(raw_text: str) -> Sentence | None:
    """Lowercase, split on whitespace, strip edge punctuation, drop empties.

    Interior punctuation survives ("f/2.8" stays one token), so token
    identity is exact string equality and no stemming is performed.
    Returns None when nothing survives.
    """
    tokens = []
    for piece in raw_text.lower().split():
        piece = _strip_edges(piece)
        if piece:
            tokens.append(piece)
    if not tokens:
        return None
    return Sentence(raw_text=raw_text, tokens=tuple(tokens))


def split_sentences(text: str) -> list[str]:
    """Split comment text on sentence terminators, keeping nonempty fragments."""
    fragments = []
    for fragment in _TERMINATORS.split(text):
        fragment = fragment.strip()
        if fragment:
            fragments.append(fragment)
    return fragments


def normalize_text(text: str) -> str:
    """Canonical cleaned form used for exact-match comparisons."""
    sent = tokenize(text)
    return " ".join(sent.tokens) if sent is not None else ""


def _parse_comment(obj: object, where: str) -> tuple[str, str]:
    if not isinstance(obj, dict):
        raise CorpusFormatError(f"{where}: comment must be an object")
    comment_id = obj.get("comment_id")
    text = obj.get("text")
    if not isinstance(comment_id, str) or not comment_id:
        raise CorpusFormatError(f"{where}: comment_id must be a nonempty string")
    if not isinstance(text, str):
        raise CorpusFormatError(f"{where}: comment text must be a string")
    return comment_id, text


def _parse_image(obj: object, where: str) -> tuple[ImageRecord, int, int]:
    if not isinstance(obj, dict):
        raise CorpusFormatError(f"{where}: image record must be an object")
    image_id = obj.get("image_id")
    if not isinstance(image_id, str) or not image_id:
        raise CorpusFormatError(f"{where}: image_id must be a nonempty string")
    score = obj.get("aesthetic_score")
    if score is not None:
        if isinstance(score, bool) or not isinstance(score, (int, float)):
            raise CorpusFormatError(f"{where}: aesthetic_score must be a number or null")
        score = float(score)
        if not (SCORE_MIN <= score <= SCORE_MAX):
            raise CorpusFormatError(
                f"{where}: aesthetic_score {score} outside [{SCORE_MIN:g}, {SCORE_MAX:g}]"
            )
    raw_comments = obj.get("comments")
    if not isinstance(raw_comments, list):
        raise CorpusFormatError(f"{where}: comments must be a list")

    comments = []
    seen_ids = set()
    dropped_comments = 0
    dropped_sentences = 0
    for j, raw in enumerate(raw_comments):
        comment_id, text = _parse_comment(raw, f"{where}, comment {j}")
        if comment_id in seen_ids:
            # the (image, comment, sentence) key must resolve uniquely downstream
            raise CorpusFormatError(f"{where}: duplicate comment_id {comment_id!r}")
        seen_ids.add(comment_id)
        sentences = []
        for fragment in split_sentences(text):
            sent = tokenize(fragment)
            if sent is None:
                dropped_sentences += 1
                continue
            sentences.append(sent)
        if not sentences:
            dropped_comments += 1
            continue
        comments.append(Comment(comment_id=comment_id, sentences=tuple(sentences)))
    record = ImageRecord(image_id=image_id, comments=tuple(comments), aesthetic_score=score)
    return record, dropped_comments, dropped_sentences


def load_corpus(path: str) -> Corpus:
    """Read a JSONL corpus file; malformed lines raise errors naming the line."""
    images = []
    dropped_comments = 0
    dropped_sentences = 0
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            record, dc, ds = _parse_image(obj, f"line {lineno}")
            images.append(record)
            dropped_comments += dc
            dropped_sentences += ds
    counters = IngestCounters(
        images=len(images),
        comments=sum(len(img.comments) for img in images),
        sentences=sum(len(c.sentences) for img in images for c in img.comments),
        dropped_comments=dropped_comments,
        dropped_sentences=dropped_sentences,
    )
    return Corpus(tuple(images), ingest=counters)


def _image_to_json(record: ImageRecord) -> str:
    # sentence fragments contain no terminators, so ". " joins round-trip exactly
    obj = {
        "image_id": record.image_id,
        "aesthetic_score": record.aesthetic_score,
        "comments": [
            {"comment_id": c.comment_id, "text": ". ".join(s.raw_text for s in c.sentences)}
            for c in record.comments
        ],
    }
    return json.dumps(obj, ensure_ascii=False)


def _serialize(corpus: Corpus, out: io.TextIOBase) -> None:
    for record in corpus.images:
        out.write(_image_to_json(record))
        out.write("\n")


def save_corpus(corpus: Corpus, path: str) -> None:
    """Write the normalized corpus back to JSONL; load(save(c)) == c."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        _serialize(corpus, handle)


def content_hash(corpus: Corpus) -> str:
    """SHA-256 over the canonical serialization of the normalized corpus.

    Two files that normalize to the same corpus hash identically, however
    they were formatted on disk.
    """
    buffer = io.StringIO()
    _serialize(corpus, buffer)
    return hashlib.sha256(buffer.getvalue().encode("utf-8")).hexdigest()


def iterate_sentences(corpus: Corpus) -> Iterator[tuple[str, str, int, Sentence]]:
    """Yield (image_id, comment_id, sentence_index, sentence) in document order.

    sentence_index counts from 0 within each comment, so the triple
    (image_id, comment_id, sentence_index) is a unique, stable key.
    """
    for record in corpus.images:
        for comment in record.comments:
            for idx, sentence in enumerate(comment.sentences):
                yield record.image_id, comment.comment_id, idx, sentence
