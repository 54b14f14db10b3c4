"""Word lists (aesthetic and object vocabularies) and hit counting."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from importlib import resources

from .corpus import Sentence, tokenize
from .errors import InputError

logger = logging.getLogger(__name__)

# Sizes the shipped vocabularies are documented to have; the loader warns
# (never fails) when a file disagrees, e.g. after manual edits.
AESTHETIC_WORDS_DECLARED = 1022
OBJECT_WORDS_DECLARED = 2146


@dataclass(frozen=True)
class WordList:
    name: str
    words: frozenset[str]
    raw_entries: int
    duplicates: int

    def __contains__(self, token: str) -> bool:
        return token in self.words

    def __len__(self) -> int:
        return len(self.words)


def _parse_lines(lines: list[str], name: str, declared_size: int | None) -> WordList:
    words: set[str] = set()
    raw_entries = 0
    duplicates = 0
    for line in lines:
        entry = line.strip()
        if not entry or entry.startswith("#"):
            continue
        raw_entries += 1
        sent = tokenize(entry)
        if sent is None:
            logger.warning("word list %s: entry %r normalizes to nothing, skipped", name, entry)
            continue
        for token in sent.tokens:
            if token in words:
                duplicates += 1
            else:
                words.add(token)
    if not words:
        raise InputError(f"word list {name}: no usable entries")
    if declared_size is not None and raw_entries != declared_size:
        logger.warning(
            "word list %s: %d entries, declared %d", name, raw_entries, declared_size
        )
    if duplicates:
        logger.warning("word list %s: %d duplicate entries after normalization", name, duplicates)
    return WordList(name=name, words=frozenset(words), raw_entries=raw_entries, duplicates=duplicates)


def load_wordlist(path: str, name: str | None = None, declared_size: int | None = None) -> WordList:
    """Load one-entry-per-line UTF-8 word list; '#' lines are comments.

    Entries pass through the engine tokenizer so membership tests use the
    same normalization as corpus tokens.
    """
    with open(path, "r", encoding="utf-8") as handle:
        lines = handle.readlines()
    return _parse_lines(lines, name or path, declared_size)


def _packaged(filename: str, name: str, declared_size: int | None) -> WordList:
    text = resources.files("ars_engine.data").joinpath(filename).read_text(encoding="utf-8")
    return _parse_lines(text.splitlines(), name, declared_size)


def default_aesthetic_words() -> WordList:
    return _packaged("aesthetic_words.txt", "aesthetic", AESTHETIC_WORDS_DECLARED)


def default_object_words() -> WordList:
    return _packaged("object_words.txt", "object", OBJECT_WORDS_DECLARED)


def default_positive_words() -> WordList:
    return _packaged("positive_words.txt", "positive-sentiment", None)


def default_negative_words() -> WordList:
    return _packaged("negative_words.txt", "negative-sentiment", None)


def count_hits(sentence: Sentence, wordlist: WordList) -> int:
    """Number of token positions whose token is in the list.

    Counted per occurrence: a token appearing twice contributes twice.
    """
    return sum(1 for token in sentence.tokens if token in wordlist.words)
