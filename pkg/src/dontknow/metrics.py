"""System-level metrics for a set of (question, response) results, plus
export/import of sheets for human grammaticality and relevance ratings."""

from __future__ import annotations

import csv
import re
from dataclasses import asdict, dataclass

from .rng import SplitMix64

TERMINAL = re.compile(r"^(.*?)([.?!]+)$")
SHEET_FIELDS = ("question", "response", "grammatical", "relevance_1_to_5")


class MetricError(ValueError):
    """A metric is undefined for the given input (usually: nothing to average)."""


class ProvenanceError(MetricError):
    """A response's recorded prefix/suffix does not match its text."""


def tokenize(text):
    """Whitespace split, with trailing . ? ! runs split off as their own token."""
    out = []
    for chunk in text.split():
        m = TERMINAL.match(chunk)
        if m and m.group(1):
            out.extend([m.group(1), m.group(2)])
        else:
            out.append(chunk)
    return out


def _is_punct(tok):
    return bool(re.fullmatch(r"[.?!]+", tok))


def coverage(results):
    results = list(results)
    if not results:
        raise MetricError("coverage of an empty result set is undefined")
    return sum(1 for r in results if not r.used_default) / len(results)


def length_stats(texts):
    """Mean and population variance of token counts."""
    lengths = [len(tokenize(t)) for t in texts]
    if not lengths:
        raise MetricError("length statistics of an empty corpus are undefined")
    n = len(lengths)
    mean = sum(lengths) / n
    return mean, sum((x - mean) ** 2 for x in lengths) / n


def response_body(response):
    """The response text with its canned prefix and suffix removed."""
    text = response.text.strip()
    prefix, suffix = response.prefix.strip(), response.suffix.strip()
    if prefix:
        if not text.startswith(prefix):
            raise ProvenanceError(f"response {text!r} does not start with its prefix {prefix!r}")
        text = text[len(prefix):]
    if suffix:
        if not text.endswith(suffix):
            raise ProvenanceError(f"response {response.text!r} does not end with its suffix {suffix!r}")
        text = text[: -len(suffix)]
    return text.strip()


def novel_words(question, response):
    """Number of body word types (lowercased) that do not occur in the question."""
    seen = {t.lower() for t in tokenize(question) if not _is_punct(t)}
    body = {t.lower() for t in tokenize(response_body(response)) if not _is_punct(t)}
    return len(body - seen)


@dataclass(frozen=True)
class MetricsReport:
    n: int
    n_matched: int
    coverage: float
    avg_len_question: float
    len_var_question: float
    avg_len_response: float
    len_var_response: float
    avg_novel_words: float | None

    def to_dict(self):
        return asdict(self)


def report(corpus):
    """Aggregate metrics over (question, FallbackResponse) pairs.

    Length statistics cover every question and every response; novel words
    are averaged over matched responses only, since default responses have
    no body taken from the question.
    """
    corpus = list(corpus)
    if not corpus:
        raise MetricError("cannot report on an empty corpus")
    questions = [q for q, _ in corpus]
    responses = [r for _, r in corpus]
    q_mean, q_var = length_stats(questions)
    r_mean, r_var = length_stats([r.text for r in responses])
    novel = [novel_words(q, r) for q, r in corpus if not r.used_default]
    return MetricsReport(
        n=len(corpus),
        n_matched=len(novel),
        coverage=coverage(responses),
        avg_len_question=q_mean,
        len_var_question=q_var,
        avg_len_response=r_mean,
        len_var_response=r_var,
        avg_novel_words=sum(novel) / len(novel) if novel else None,
    )


def format_report(rep):
    """Fixed-precision text rendering (4 decimals) used for golden files."""
    lines = []
    for key, value in rep.to_dict().items():
        if value is None:
            lines.append(f"{key}: n/a")
        elif isinstance(value, int):
            lines.append(f"{key}: {value}")
        else:
            lines.append(f"{key}: {value:.4f}")
    return "\n".join(lines) + "\n"


def export_annotation_sheet(corpus, path, seed=0):
    """Write a tab-separated rating sheet with blank rating columns, rows shuffled."""
    rows = [(q, r.text if hasattr(r, "text") else str(r)) for q, r in corpus]
    SplitMix64(seed).shuffle(rows)
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, delimiter="\t", lineterminator="\n")
        w.writerow(SHEET_FIELDS)
        for q, r in rows:
            w.writerow([q, r, "", ""])
    return len(rows)


def import_annotation_sheet(path):
    """Percent grammatically correct (%GC) and average relevance score (ARS).

    Blank cells are unrated and skipped; anything else must be 0/1 for
    grammaticality and an integer 1..5 for relevance.
    """
    grammatical, relevance = [], []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f, delimiter="\t")
        missing = set(SHEET_FIELDS) - set(reader.fieldnames or ())
        if missing:
            raise MetricError(f"annotation sheet lacks column(s) {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            g = (row["grammatical"] or "").strip()
            if g:
                if g not in ("0", "1"):
                    raise MetricError(f"line {lineno}: grammatical must be 0 or 1, got {g!r}")
                grammatical.append(int(g))
            rel = (row["relevance_1_to_5"] or "").strip()
            if rel:
                if rel not in ("1", "2", "3", "4", "5"):
                    raise MetricError(f"line {lineno}: relevance must be 1..5, got {rel!r}")
                relevance.append(int(rel))
    return {
        "gc_percent": 100.0 * sum(grammatical) / len(grammatical) if grammatical else None,
        "ars": sum(relevance) / len(relevance) if relevance else None,
        "n_grammatical": len(grammatical),
        "n_relevance": len(relevance),
    }
