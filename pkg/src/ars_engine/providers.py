"""Sentiment and embedding backends behind one uniform interface.

Three interchangeable kinds per signal:

* file tables (JSONL, exact raw-text keys, no fabricated values),
* deterministic builtin fallbacks (sentiment word lists, hashed
  bag-of-tokens embeddings),
* an external process speaking line-delimited JSON over stdin/stdout,
  for plugging in real models.

Providers are keyed by the exact raw sentence text, pre-tokenization, so
external models always see the original string.
"""

from __future__ import annotations

import json
import logging
import queue
import shlex
import subprocess
import threading
from dataclasses import dataclass

import numpy as np

from . import lexicon as lexicon_mod
from .corpus import Sentence, tokenize
from .errors import CorpusFormatError, InputError, LookupMissError, ProviderError

logger = logging.getLogger(__name__)

DEFAULT_HASH_DIM = 256
DEFAULT_TIMEOUT = 30.0


@dataclass(frozen=True)
class SentimentPair:
    positive: float
    negative: float

    def __post_init__(self) -> None:
        for label, value in (("positive", self.positive), ("negative", self.negative)):
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise InputError(f"sentiment {label} must be a number")
            if not (0.0 <= value <= 1.0):
                raise InputError(f"sentiment {label} must lie in [0,1], got {value}")


def sentiment_score(pair: SentimentPair) -> float:
    """Scalar sentiment component: (positive + negative) / 2."""
    return (pair.positive + pair.negative) / 2.0


class Embedding:
    """Fixed-length real vector; zero and non-finite vectors are rejected."""

    __slots__ = ("values",)

    def __init__(self, values) -> None:
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ProviderError("embedding must be a nonempty 1-D vector")
        if not np.all(np.isfinite(arr)):
            raise ProviderError("embedding contains non-finite values")
        if not np.any(arr):
            raise ProviderError("zero embedding vector rejected; cosine is undefined")
        arr.setflags(write=False)
        self.values = arr

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])


def cosine(a: Embedding, b: Embedding) -> float:
    """dot(a, b) / (|a| * |b|); dimensions must agree."""
    if a.dim != b.dim:
        raise ProviderError(f"embedding dim mismatch: {a.dim} vs {b.dim}")
    na = float(np.linalg.norm(a.values))
    nb = float(np.linalg.norm(b.values))
    return float(np.dot(a.values, b.values)) / (na * nb)


# --- sentiment backends ---------------------------------------------------


class TableSentimentProvider:
    """JSONL-backed lookup {"text", "positive", "negative"}; misses raise."""

    def __init__(self, table: dict[str, SentimentPair], source: str = "<memory>"):
        self._table = table
        self._source = source

    def sentiment(self, sentence: Sentence) -> SentimentPair:
        try:
            return self._table[sentence.raw_text]
        except KeyError:
            raise LookupMissError(
                f"sentiment table {self._source} has no entry for {sentence.raw_text!r}"
            ) from None

    def close(self) -> None:
        pass


class LexiconSentimentProvider:
    """Builtin fallback: word-list hit counts with a Laplace-style denominator.

    With p positive and n negative hits the pair is
    (p / (p + n + 1), n / (p + n + 1)). Deliberately crude; it exists so
    the engine runs self-contained, not to imitate a trained model.
    """

    def __init__(self, positive: lexicon_mod.WordList, negative: lexicon_mod.WordList):
        self._positive = positive
        self._negative = negative

    @classmethod
    def default(cls) -> "LexiconSentimentProvider":
        return cls(lexicon_mod.default_positive_words(), lexicon_mod.default_negative_words())

    def sentiment(self, sentence: Sentence) -> SentimentPair:
        p = lexicon_mod.count_hits(sentence, self._positive)
        n = lexicon_mod.count_hits(sentence, self._negative)
        denom = p + n + 1
        return SentimentPair(positive=p / denom, negative=n / denom)

    def close(self) -> None:
        pass


# --- embedding backends ---------------------------------------------------


class TableEmbeddingProvider:
    """JSONL-backed lookup {"text", "vector"}; misses raise."""

    def __init__(self, table: dict[str, Embedding], source: str = "<memory>"):
        if table:
            dims = {e.dim for e in table.values()}
            if len(dims) != 1:
                raise InputError(f"embedding table {source} mixes dimensions: {sorted(dims)}")
        self._table = table
        self._source = source

    def embed(self, text: str) -> Embedding:
        try:
            return self._table[text]
        except KeyError:
            raise LookupMissError(
                f"embedding table {self._source} has no entry for {text!r}"
            ) from None

    def close(self) -> None:
        pass


def _stable_bucket(token: str, dim: int) -> int:
    import hashlib

    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") % dim


class HashedEmbeddingProvider:
    """Builtin fallback: L2-normalized hashed bag-of-tokens vector.

    Token buckets come from a keyed-size blake2b digest, never from
    Python's salted hash(), so vectors are stable across processes.
    """

    def __init__(self, dim: int = DEFAULT_HASH_DIM):
        if dim <= 0:
            raise InputError(f"embedding dim must be positive, got {dim}")
        self._dim = dim

    def embed(self, text: str) -> Embedding:
        sent = tokenize(text)
        if sent is None:
            raise ProviderError(f"cannot embed text with no tokens: {text!r}")
        vec = np.zeros(self._dim, dtype=np.float64)
        for token in sent.tokens:
            vec[_stable_bucket(token, self._dim)] += 1.0
        vec /= np.linalg.norm(vec)
        return Embedding(vec)

    def close(self) -> None:
        pass


# --- external process backend ----------------------------------------------


class _ModelProcess:
    """One model subprocess: handshake, serialized request/response, timeout.

    Protocol: the child prints {"proto": 1, "dim": int|null} on start, then
    answers each request line {"op": "sentiment"|"embed", "text": ...} with
    one JSON line. Anything else (bad JSON, an {"error": ...} reply, a
    timeout, a closed pipe) is a hard provider error.
    """

    def __init__(self, cmd: str, timeout: float = DEFAULT_TIMEOUT):
        argv = shlex.split(cmd)
        if not argv:
            raise InputError("empty model process command")
        self._timeout = timeout
        try:
            self._proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise ProviderError(f"cannot start model process {argv[0]!r}: {exc}") from None
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._lock = threading.Lock()
        reader = threading.Thread(target=self._pump, daemon=True)
        reader.start()
        handshake = self._parse(self._read_line())
        if handshake.get("proto") != 1:
            self.close()
            raise ProviderError(f"model process handshake must declare proto 1, got {handshake!r}")
        dim = handshake.get("dim")
        if dim is not None and (not isinstance(dim, int) or dim <= 0):
            self.close()
            raise ProviderError(f"model process handshake dim must be a positive int or null, got {dim!r}")
        self.dim: int | None = dim

    def _pump(self) -> None:
        try:
            for line in self._proc.stdout:
                self._lines.put(line)
        finally:
            self._lines.put(None)

    def _read_line(self) -> str:
        try:
            line = self._lines.get(timeout=self._timeout)
        except queue.Empty:
            raise ProviderError(f"model process reply timed out after {self._timeout:g}s") from None
        if line is None:
            raise ProviderError("model process closed its output stream")
        return line

    @staticmethod
    def _parse(line: str) -> dict:
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            raise ProviderError(f"model process sent invalid JSON: {line!r}") from None
        if not isinstance(obj, dict):
            raise ProviderError(f"model process reply must be a JSON object: {line!r}")
        return obj

    def request(self, payload: dict) -> dict:
        with self._lock:
            try:
                self._proc.stdin.write(json.dumps(payload, ensure_ascii=False) + "\n")
                self._proc.stdin.flush()
            except (BrokenPipeError, ValueError, OSError):
                raise ProviderError("model process pipe is closed") from None
            reply = self._parse(self._read_line())
        if "error" in reply:
            raise ProviderError(f"model process error: {reply['error']}")
        return reply

    def close(self) -> None:
        for stream in (self._proc.stdin, self._proc.stdout):
            try:
                if stream is not None:
                    stream.close()
            except OSError:
                pass
        self._proc.terminate()
        try:
            self._proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self._proc.kill()
            self._proc.wait()


class ProcessSentimentProvider:
    def __init__(self, cmd: str, timeout: float = DEFAULT_TIMEOUT):
        self._proc = _ModelProcess(cmd, timeout=timeout)

    def sentiment(self, sentence: Sentence) -> SentimentPair:
        reply = self._proc.request({"op": "sentiment", "text": sentence.raw_text})
        try:
            return SentimentPair(positive=reply["positive"], negative=reply["negative"])
        except KeyError as exc:
            raise ProviderError(f"sentiment reply missing field {exc}") from None
        except InputError as exc:
            raise ProviderError(f"bad sentiment reply: {exc}") from None

    def close(self) -> None:
        self._proc.close()


class ProcessEmbeddingProvider:
    def __init__(self, cmd: str, timeout: float = DEFAULT_TIMEOUT):
        self._proc = _ModelProcess(cmd, timeout=timeout)

    def embed(self, text: str) -> Embedding:
        reply = self._proc.request({"op": "embed", "text": text})
        vector = reply.get("vector")
        if not isinstance(vector, list):
            raise ProviderError(f"embed reply must carry a vector list, got {reply!r}")
        emb = Embedding(vector)
        if self._proc.dim is None:
            self._proc.dim = emb.dim  # learned from the first reply, fixed after
        elif emb.dim != self._proc.dim:
            raise ProviderError(f"model process changed dim: {emb.dim} after {self._proc.dim}")
        return emb

    def close(self) -> None:
        self._proc.close()


# --- table loading and backend selection ------------------------------------


def _read_jsonl(path: str):
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


def load_sentiment_table(path: str) -> dict[str, SentimentPair]:
    table: dict[str, SentimentPair] = {}
    for lineno, obj in _read_jsonl(path):
        text = obj.get("text")
        if not isinstance(text, str):
            raise CorpusFormatError(f"{path} line {lineno}: text must be a string")
        if text in table:
            raise CorpusFormatError(f"{path} line {lineno}: duplicate key {text!r}")
        try:
            table[text] = SentimentPair(positive=obj.get("positive"), negative=obj.get("negative"))
        except InputError as exc:
            raise CorpusFormatError(f"{path} line {lineno}: {exc}") from None
    return table


def load_embedding_table(path: str) -> dict[str, Embedding]:
    table: dict[str, Embedding] = {}
    for lineno, obj in _read_jsonl(path):
        text = obj.get("text")
        vector = obj.get("vector")
        if not isinstance(text, str):
            raise CorpusFormatError(f"{path} line {lineno}: text must be a string")
        if text in table:
            raise CorpusFormatError(f"{path} line {lineno}: duplicate key {text!r}")
        if not isinstance(vector, list):
            raise CorpusFormatError(f"{path} line {lineno}: vector must be a list")
        try:
            table[text] = Embedding(vector)
        except ProviderError as exc:
            raise CorpusFormatError(f"{path} line {lineno}: {exc}") from None
    dims = {emb.dim for emb in table.values()}
    if len(dims) > 1:
        raise CorpusFormatError(f"{path}: table mixes embedding dims {sorted(dims)}")
    return table


def make_sentiment_provider(spec: str, timeout: float = DEFAULT_TIMEOUT):
    """Build a sentiment backend from "lexicon", "file:PATH" or "process:CMD"."""
    if spec == "lexicon":
        return LexiconSentimentProvider.default()
    if spec.startswith("file:"):
        path = spec[len("file:"):]
        return TableSentimentProvider(load_sentiment_table(path), source=path)
    if spec.startswith("process:"):
        return ProcessSentimentProvider(spec[len("process:"):], timeout=timeout)
    raise InputError(f"unknown sentiment backend {spec!r}; use lexicon, file:PATH or process:CMD")


def make_embedding_provider(spec: str, timeout: float = DEFAULT_TIMEOUT):
    """Build an embedding backend from "hash[:DIM]", "file:PATH" or "process:CMD"."""
    if spec == "hash":
        return HashedEmbeddingProvider()
    if spec.startswith("hash:"):
        try:
            dim = int(spec[len("hash:"):])
        except ValueError:
            raise InputError(f"bad hash dim in {spec!r}") from None
        return HashedEmbeddingProvider(dim=dim)
    if spec.startswith("file:"):
        path = spec[len("file:"):]
        return TableEmbeddingProvider(load_embedding_table(path), source=path)
    if spec.startswith("process:"):
        return ProcessEmbeddingProvider(spec[len("process:"):], timeout=timeout)
    raise InputError(f"unknown embedding backend {spec!r}; use hash[:DIM], file:PATH or process:CMD")
