"""Batch command-line front-end for the scoring engine.

Subcommands compose over files: ingest -> stats -> label -> partition /
select / loss / report. Every subcommand is a pure function of its
declared inputs and writes a run manifest (input hashes, config snapshot,
output paths) alongside its primary output, so identical inputs reproduce
identical bytes.

Exit codes: 0 success, 2 input or schema error, 3 provider error,
4 degenerate-statistics error.
"""

from __future__ import annotations

import functools
import hashlib
import json
import os
import sys

import click

from . import __version__, fileio, lexicon
from .corpus import load_corpus, save_corpus
from .errors import DegenerateStatsError, InputError, ProviderError
from .loss import attach_weights, weighted_ce
from .providers import make_embedding_provider, make_sentiment_provider
from .scoring import ArsScorer, ars_histogram, label_corpus, partition_by_threshold, summarize
from .selector import DacsConfig, select_groups
from .stats import (
    LOG_BASES,
    SCALE_KINDS,
    TAU_POPULATIONS,
    compute_frozen_stats,
    load_stats,
    save_stats,
    stats_matches_corpus,
    with_ars_distribution,
)

SENTIMENT_HELP = "Sentiment backend: lexicon | file:PATH | process:CMD."
EMBED_HELP = "Embedding backend: hash[:DIM] | file:PATH | process:CMD."


def _threads() -> int:
    raw = os.environ.get("ARS_ENGINE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"ARS_ENGINE_THREADS must be an integer, got {raw!r}") from None


def _sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(subcommand: str, inputs: list[str], config: dict, outputs: list[str]) -> None:
    manifest = {
        "subcommand": subcommand,
        "inputs": {path: _sha256_file(path) for path in inputs},
        "config": config,
        "outputs": sorted(outputs),
    }
    path = outputs[0] + ".manifest.json"
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def _exit_on_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except InputError as exc:  # covers schema errors too
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except ProviderError as exc:
            click.echo(f"provider error: {exc}", err=True)
            sys.exit(3)
        except DegenerateStatsError as exc:
            click.echo(f"degenerate statistics: {exc}", err=True)
            sys.exit(4)

    return wrapper


def _load_wordlists(aw_path: str | None, ow_path: str | None):
    aw = (
        lexicon.load_wordlist(aw_path, "aesthetic", lexicon.AESTHETIC_WORDS_DECLARED)
        if aw_path
        else lexicon.default_aesthetic_words()
    )
    ow = (
        lexicon.load_wordlist(ow_path, "object", lexicon.OBJECT_WORDS_DECLARED)
        if ow_path
        else lexicon.default_object_words()
    )
    return aw, ow


def _load_stats_for(corpus, stats_path: str, force: bool):
    stats = load_stats(stats_path)
    if corpus is not None and not stats_matches_corpus(stats, corpus):
        if not force:
            raise InputError(
                f"stats file {stats_path} was fitted on a different corpus "
                "(content hash mismatch); pass --force to use it anyway"
            )
        click.echo("warning: stats corpus hash mismatch, continuing under --force", err=True)
    return stats


@click.group()
@click.version_option(version=__version__, prog_name="ars-engine")
def main() -> None:
    """Deterministic aesthetic-relevance scoring over image-comment corpora."""


@main.command("ingest")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@_exit_on_errors
def cmd_ingest(corpus_path: str, out_path: str) -> None:
    """Validate a JSONL corpus and persist its normalized form.

    Corpus rows: {"image_id": str, "aesthetic_score": num|null,
    "comments": [{"comment_id": str, "text": str}, ...]}.
    """
    corpus = load_corpus(corpus_path)
    save_corpus(corpus, out_path)
    counts_path = out_path + ".counts.json"
    counters = corpus.ingest
    with open(counts_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(
            json.dumps(
                {
                    "images": counters.images,
                    "comments": counters.comments,
                    "sentences": counters.sentences,
                    "dropped_comments": counters.dropped_comments,
                    "dropped_sentences": counters.dropped_sentences,
                },
                sort_keys=True,
                indent=2,
            )
            + "\n"
        )
    _write_manifest("ingest", [corpus_path], {}, [out_path, counts_path])
    click.echo(
        f"ingested {counters.images} images, {counters.comments} comments, "
        f"{counters.sentences} sentences "
        f"(dropped {counters.dropped_comments} comments, {counters.dropped_sentences} sentences)"
    )


@main.command("stats")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--scale", "scale_kind", type=click.Choice(SCALE_KINDS), default="stddev", show_default=True)
@click.option("--log-base", type=click.Choice(LOG_BASES), default="e", show_default=True)
@click.option("--tau-population", type=click.Choice(TAU_POPULATIONS), default="pairs", show_default=True)
@_exit_on_errors
def cmd_stats(corpus_path: str, out_path: str, scale_kind: str, log_base: str, tau_population: str) -> None:
    """Fit frozen length and tf-idf statistics; stamps the corpus hash."""
    corpus = load_corpus(corpus_path)
    stats = compute_frozen_stats(
        corpus, log_base=log_base, scale_kind=scale_kind, tau_population=tau_population
    )
    save_stats(stats, out_path)
    _write_manifest(
        "stats",
        [corpus_path],
        {"scale": scale_kind, "log_base": log_base, "tau_population": tau_population},
        [out_path],
    )
    click.echo(
        f"stats over {stats.tfidf.doc_count} documents: "
        f"mean length {stats.length.mean:.4f}, {len(stats.tfidf.doc_freq)} terms"
    )


@main.command("label")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--stats", "stats_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--aw", "aw_path", type=click.Path(exists=True, dir_okay=False), help="Aesthetic word list (default: packaged).")
@click.option("--ow", "ow_path", type=click.Path(exists=True, dir_okay=False), help="Object word list (default: packaged).")
@click.option("--sentiment", "sentiment_spec", default="lexicon", show_default=True, help=SENTIMENT_HELP)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--lenient", is_flag=True, help="Skip sentences whose provider lookup fails instead of aborting.")
@click.option("--freeze-ars", is_flag=True, help="Write the observed score mean/scale back into the stats file.")
@click.option("--force", is_flag=True, help="Use stats even if their corpus hash mismatches.")
@click.option("--bin-width", type=float, default=1.0, show_default=True, help="Summary histogram bin width.")
@_exit_on_errors
def cmd_label(corpus_path, stats_path, aw_path, ow_path, sentiment_spec, out_path, lenient, freeze_ars, force, bin_width) -> None:
    """Score every corpus sentence; emit labels JSONL plus a summary.

    Label rows: {"image_id","comment_id","sentence_index","text",
    "a","l","o","s","tfidf","ars"}.
    """
    corpus = load_corpus(corpus_path)
    stats = _load_stats_for(corpus, stats_path, force)
    aw, ow = _load_wordlists(aw_path, ow_path)
    provider = make_sentiment_provider(sentiment_spec)
    try:
        scorer = ArsScorer(stats, aw, ow, provider, corpus=corpus)
        result = label_corpus(corpus, scorer, strict=not lenient, threads=_threads())
    finally:
        provider.close()
    fileio.write_labels(result.labels, out_path)
    summary = summarize(result.labels, scale_kind=stats.scale_kind, bin_width=bin_width)
    summary_path = out_path + ".summary.json"
    fileio.write_summary(summary, result.skipped, summary_path)
    outputs = [out_path, summary_path]
    if freeze_ars:
        if summary is None:
            raise InputError("no labelled sentences; cannot freeze a score distribution")
        save_stats(with_ars_distribution(stats, summary.mean, summary.scale), stats_path)
        outputs.append(stats_path)
    _write_manifest(
        "label",
        [corpus_path, stats_path] + [p for p in (aw_path, ow_path) if p],
        {
            "sentiment": sentiment_spec,
            "lenient": lenient,
            "freeze_ars": freeze_ars,
            "bin_width": bin_width,
        },
        outputs,
    )
    if summary is not None:
        click.echo(
            f"labelled {summary.count} sentences (skipped {result.skipped}): "
            f"mean {summary.mean:.4f}, scale {summary.scale:.4f}, "
            f"range [{summary.min:.4f}, {summary.max:.4f}]"
        )
    else:
        click.echo(f"labelled 0 sentences (skipped {result.skipped})")


@main.command("partition")
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--stats", "stats_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--alpha", type=float, required=True)
@click.option("--rule", type=click.Choice(["leq", "geq"]), required=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@_exit_on_errors
def cmd_partition(labels_path, stats_path, alpha, rule, out_path) -> None:
    """Keep labels at or beyond mean -/+ alpha * scale of the frozen distribution."""
    labels = fileio.read_labels(labels_path)
    stats = load_stats(stats_path)
    partition = partition_by_threshold(labels, stats, alpha, rule)
    fileio.write_partition(partition, out_path)
    _write_manifest(
        "partition",
        [labels_path, stats_path],
        {"alpha": alpha, "rule": rule},
        [out_path],
    )
    click.echo(f"{rule} alpha={alpha:g}: kept {len(partition.members)} of {len(labels)} sentences")


@main.command("select")
@click.option("--candidates", "candidates_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--stats", "stats_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--threshold", type=float, default=0.7, show_default=True, help="Cosine similarity threshold (strict >).")
@click.option("--floor", default="auto", show_default=True, help="Group mean-score floor: auto (frozen training mean) or a number.")
@click.option("--embed", "embed_spec", default="hash", show_default=True, help=EMBED_HELP)
@click.option("--scorer", "scorer_spec", default="ars", show_default=True, help="Representative scorer: ars | file:PATH with {\"text\",\"score\"} rows.")
@click.option("--blacklist", "blacklist_path", type=click.Path(exists=True, dir_okay=False), help="Bad-candidate list, one entry per line.")
@click.option("--max-outputs", type=int, help="Emit at most this many groups.")
@click.option("--grouping", type=click.Choice(["leader", "components"]), default="leader", show_default=True)
@click.option("--sentiment", "sentiment_spec", default="lexicon", show_default=True, help=SENTIMENT_HELP)
@click.option("--aw", "aw_path", type=click.Path(exists=True, dir_okay=False), help="Aesthetic word list (default: packaged).")
@click.option("--ow", "ow_path", type=click.Path(exists=True, dir_okay=False), help="Object word list (default: packaged).")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@_exit_on_errors
def cmd_select(candidates_path, stats_path, threshold, floor, embed_spec, scorer_spec, blacklist_path, max_outputs, grouping, sentiment_spec, aw_path, ow_path, out_path) -> None:
    """Run diverse selection over candidate captions.

    Candidate rows: {"text": str, "confidence": num}. Output rows:
    {"text","ars","group_size","rank"}.
    """
    candidates = fileio.read_candidates(candidates_path)
    stats = load_stats(stats_path)
    if floor == "auto":
        if stats.ars_mean is None:
            raise InputError(
                "stats file has no frozen score mean for --floor auto; "
                "label the training corpus with --freeze-ars or pass a numeric --floor"
            )
        ars_floor = stats.ars_mean
    else:
        try:
            ars_floor = float(floor)
        except ValueError:
            raise InputError(f"--floor must be 'auto' or a number, got {floor!r}") from None
    blacklist = fileio.read_blacklist(blacklist_path) if blacklist_path else frozenset()
    config = DacsConfig(
        ars_floor=ars_floor,
        similarity_threshold=threshold,
        blacklist=blacklist,
        max_outputs=max_outputs,
        grouping=grouping,
    )
    scorer = None if scorer_spec == "ars" else _resolve_scorer(scorer_spec)
    aw, ow = _load_wordlists(aw_path, ow_path)
    sentiment_provider = make_sentiment_provider(sentiment_spec)
    embedder = make_embedding_provider(embed_spec)
    try:
        ars_scorer = ArsScorer(stats, aw, ow, sentiment_provider)
        groups = select_groups(
            candidates, config, embedder, lambda text: ars_scorer.score_text(text).total, scorer
        )
    finally:
        sentiment_provider.close()
        embedder.close()
    fileio.write_selection(groups, out_path)
    _write_manifest(
        "select",
        [candidates_path, stats_path] + [p for p in (blacklist_path, aw_path, ow_path) if p],
        {
            "threshold": threshold,
            "floor": floor,
            "embed": embed_spec,
            "scorer": scorer_spec,
            "max_outputs": max_outputs,
            "grouping": grouping,
            "sentiment": sentiment_spec,
        },
        [out_path],
    )
    click.echo(f"selected {len(groups)} of {len(candidates)} candidates")


def _resolve_scorer(spec: str):
    if spec.startswith("file:"):
        return fileio.read_score_table(spec[len("file:"):])
    raise InputError(f"unknown scorer {spec!r}; use ars or file:PATH")


@main.command("loss")
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--logprobs", "logprobs_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@_exit_on_errors
def cmd_loss(labels_path, logprobs_path, out_path) -> None:
    """Score-weighted cross-entropy over a log-prob file.

    Log-prob rows: {"image_id","comment_id","sentence_index","log_probs":[..]},
    joined to labels by the id triple.
    """
    labels = fileio.read_labels(labels_path)
    rows = fileio.read_logprobs(logprobs_path)
    batch = attach_weights(labels, rows)
    result = weighted_ce(batch)
    fileio.write_loss(result.total, result.per_sentence, result.sentence_count, out_path)
    weights_path = out_path + ".weights.jsonl"
    fileio.write_weights(batch, weights_path)
    _write_manifest("loss", [labels_path, logprobs_path], {}, [out_path, weights_path])
    click.echo(f"loss {result.total!r} over {result.sentence_count} sentences")


@main.command("report")
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--bin-width", type=float, default=1.0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@_exit_on_errors
def cmd_report(labels_path, bin_width, out_path) -> None:
    """Histogram the score distribution as CSV (bin_start,count)."""
    labels = fileio.read_labels(labels_path)
    histogram = ars_histogram(labels, bin_width)
    fileio.write_histogram_csv(histogram, out_path)
    _write_manifest("report", [labels_path], {"bin_width": bin_width}, [out_path])
    click.echo(f"histogram over {len(labels)} labels in {len(histogram)} bins")


if __name__ == "__main__":
    main()
