"""Readers and writers for the engine's file interfaces.

All formats are line-delimited JSON or plain JSON with sorted keys, so a
rerun over identical inputs reproduces output files byte for byte.

* labels:      {"image_id","comment_id","sentence_index","text","a","l","o","s","tfidf","ars"}
* candidates:  {"text","confidence"}
* selection:   {"text","ars","group_size","rank"}
* log-probs:   {"image_id","comment_id","sentence_index","log_probs"}
* weights:     {"key","weight"} where key = [image_id, comment_id, sentence_index]
* score table: {"text","score"} (file-backed representative scorer)
"""

from __future__ import annotations

import json
from typing import Iterable

from .corpus import normalize_text, tokenize
from .errors import CorpusFormatError, InputError, LookupMissError
from .loss import LogProbRow, SentenceLossInput
from .scoring import ArsBreakdown, LabelSummary, LabelledSentence, ThresholdPartition
from .selector import Candidate, CandidateGroup


def _rows(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path} line {lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise CorpusFormatError(f"{path} line {lineno}: expected an object")
            yield lineno, obj


def _field(obj: dict, name: str, kinds, where: str):
    value = obj.get(name)
    if isinstance(value, bool) or not isinstance(value, kinds):
        raise CorpusFormatError(f"{where}: field {name!r} missing or wrong type")
    return value


def _dump_line(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False) + "\n"


# --- labels -----------------------------------------------------------------


def write_labels(labels: Iterable[LabelledSentence], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for lab in labels:
            handle.write(
                _dump_line(
                    {
                        "image_id": lab.image_id,
                        "comment_id": lab.comment_id,
                        "sentence_index": lab.sentence_index,
                        "text": lab.sentence.raw_text,
                        "a": lab.breakdown.aesthetic_words,
                        "l": lab.breakdown.length,
                        "o": lab.breakdown.object_words,
                        "s": lab.breakdown.sentiment,
                        "tfidf": lab.breakdown.tfidf,
                        "ars": lab.breakdown.total,
                    }
                )
            )


def read_labels(path: str) -> list[LabelledSentence]:
    labels = []
    for lineno, obj in _rows(path):
        where = f"{path} line {lineno}"
        text = _field(obj, "text", str, where)
        sentence = tokenize(text)
        if sentence is None:
            raise CorpusFormatError(f"{where}: label text has no tokens")
        labels.append(
            LabelledSentence(
                image_id=_field(obj, "image_id", str, where),
                comment_id=_field(obj, "comment_id", str, where),
                sentence_index=_field(obj, "sentence_index", int, where),
                sentence=sentence,
                breakdown=ArsBreakdown(
                    aesthetic_words=_field(obj, "a", int, where),
                    length=float(_field(obj, "l", (int, float), where)),
                    object_words=_field(obj, "o", int, where),
                    sentiment=float(_field(obj, "s", (int, float), where)),
                    tfidf=float(_field(obj, "tfidf", (int, float), where)),
                    total=float(_field(obj, "ars", (int, float), where)),
                ),
            )
        )
    return labels


def write_summary(summary: LabelSummary | None, skipped: int, path: str) -> None:
    if summary is None:
        obj: dict = {"count": 0, "skipped": skipped}
    else:
        obj = {
            "count": summary.count,
            "mean": summary.mean,
            "scale": summary.scale,
            "min": summary.min,
            "max": summary.max,
            "histogram": [[start, count] for start, count in summary.histogram],
            "skipped": skipped,
        }
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


# --- partition ---------------------------------------------------------------


def write_partition(partition: ThresholdPartition, path: str) -> None:
    obj = {
        "rule": partition.rule,
        "alpha": partition.alpha,
        "count": len(partition.members),
        "members": [
            {
                "image_id": lab.image_id,
                "comment_id": lab.comment_id,
                "sentence_index": lab.sentence_index,
                "ars": lab.breakdown.total,
            }
            for lab in partition.members
        ],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


# --- candidates and selection -------------------------------------------------


def read_candidates(path: str) -> list[Candidate]:
    candidates = []
    for lineno, obj in _rows(path):
        where = f"{path} line {lineno}"
        try:
            candidates.append(
                Candidate(
                    text=_field(obj, "text", str, where),
                    confidence=float(_field(obj, "confidence", (int, float), where)),
                )
            )
        except InputError as exc:
            raise CorpusFormatError(f"{where}: {exc}") from None
    return candidates


def write_selection(groups: Iterable[CandidateGroup], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for rank, group in enumerate(groups, start=1):
            handle.write(
                _dump_line(
                    {
                        "text": group.representative.text,
                        "ars": group.representative.ars,
                        "group_size": len(group.members),
                        "rank": rank,
                    }
                )
            )


def read_blacklist(path: str) -> frozenset[str]:
    """One entry per line, '#' comments; entries are stored in cleaned form."""
    entries = set()
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            entry = line.strip()
            if not entry or entry.startswith("#"):
                continue
            cleaned = normalize_text(entry)
            if cleaned:
                entries.add(cleaned)
    return frozenset(entries)


def read_score_table(path: str):
    """File-backed representative scorer: exact text -> score, misses raise."""
    table: dict[str, float] = {}
    for lineno, obj in _rows(path):
        where = f"{path} line {lineno}"
        text = _field(obj, "text", str, where)
        if text in table:
            raise CorpusFormatError(f"{where}: duplicate key {text!r}")
        table[text] = float(_field(obj, "score", (int, float), where))

    def score(text: str) -> float:
        try:
            return table[text]
        except KeyError:
            raise LookupMissError(f"score table {path} has no entry for {text!r}") from None

    return score


# --- loss ---------------------------------------------------------------------


def read_logprobs(path: str) -> list[LogProbRow]:
    rows = []
    for lineno, obj in _rows(path):
        where = f"{path} line {lineno}"
        log_probs = _field(obj, "log_probs", list, where)
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in log_probs):
            raise CorpusFormatError(f"{where}: log_probs must be a list of numbers")
        rows.append(
            LogProbRow(
                image_id=_field(obj, "image_id", str, where),
                comment_id=_field(obj, "comment_id", str, where),
                sentence_index=_field(obj, "sentence_index", int, where),
                log_probs=tuple(float(v) for v in log_probs),
            )
        )
    return rows


def write_weights(inputs: Iterable[SentenceLossInput], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for item in inputs:
            key = list(item.key) if item.key is not None else None
            handle.write(_dump_line({"key": key, "weight": item.weight}))


def write_loss(total: float, per_sentence, sentence_count: int, path: str) -> None:
    obj = {
        "total": total,
        "sentence_count": sentence_count,
        "per_sentence": list(per_sentence),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def write_histogram_csv(histogram, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("bin_start,count\n")
        for start, count in histogram:
            handle.write(f"{start!r},{count}\n")
