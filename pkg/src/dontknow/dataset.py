"""Building the don't-know dataset (IDKD) from a question-paraphrase corpus.

Questions the rule engine can answer are kept; each generated response is
paired with the *paraphrase* of its question, so a model trained on the pairs
learns to answer unseen wordings. Everything is deterministic given the
input files and a build seed.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from collections import Counter
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

from .conllu import read_conllu_file
from .rng import SplitMix64, derive_seed

log = logging.getLogger(__name__)

QQP_FIELDS = ("id", "qid1", "qid2", "question1", "question2", "is_duplicate")
_TRUE = {"1", "true", "yes"}
_FALSE = {"0", "false", "no"}


class IngestionError(ValueError):
    pass


@dataclass(frozen=True)
class ParaphraseRecord:
    id: str
    question1: str
    question2: str
    is_duplicate: bool
    qid1: str = ""
    qid2: str = ""

    def __post_init__(self):
        if not self.question1.strip() or not self.question2.strip():
            raise ValueError(f"record {self.id}: empty question")


@dataclass(frozen=True)
class IdkdPair:
    query: str
    response: str
    source_id: str
    template_id: str

    def to_dict(self):
        return asdict(self)


def _parse_label(value):
    v = str(value).strip().lower()
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise ValueError(value)


def _rows_from_delimited(lines, delimiter):
    # QQP dumps are unquoted TSV; a stray " must not swallow the next rows
    quoting = csv.QUOTE_NONE if delimiter == "\t" else csv.QUOTE_MINIMAL
    reader = csv.DictReader(lines, delimiter=delimiter, quoting=quoting)
    missing = set(QQP_FIELDS) - {"qid1", "qid2"} - set(reader.fieldnames or ())
    if missing:
        raise IngestionError(f"header lacks column(s) {sorted(missing)}")
    for row in reader:
        yield row


def _rows_from_jsonl(lines):
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestionError(f"line {lineno}: not a JSON record ({exc.msg})") from None
        if not isinstance(row, dict):
            raise IngestionError(f"line {lineno}: not a JSON object")
        yield row


def load_paraphrase_corpus(path, counts=None):
    """Read a QQP-layout file (TSV or CSV, by header) or a JSON-lines file.

    Rows whose ``is_duplicate`` cannot be read as a boolean, or which lack
    a question, are skipped and tallied in ``counts`` (a Counter) under
    ``bad_label`` / ``bad_row``.
    """
    counts = counts if counts is not None else Counter()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise IngestionError(f"{path}: no such file") from None
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise IngestionError(f"{path}: missing header")
    first = lines[0].lstrip("\ufeff")
    lines[0] = first
    if first.lstrip().startswith("{"):
        rows = _rows_from_jsonl(lines)
    elif "\t" in first:
        rows = _rows_from_delimited(lines, "\t")
    elif "," in first:
        rows = _rows_from_delimited(lines, ",")
    else:
        raise IngestionError(f"{path}: unrecognised header {first[:60]!r}")

    records = []
    for n, row in enumerate(rows, start=1):
        try:
            dup = _parse_label(row.get("is_duplicate"))
        except ValueError:
            counts["bad_label"] += 1
            log.warning("%s: row %d has is_duplicate=%r; skipped", path, n, row.get("is_duplicate"))
            continue
        try:
            records.append(ParaphraseRecord(
                id=str(row.get("id", n - 1)),
                question1=str(row.get("question1") or ""),
                question2=str(row.get("question2") or ""),
                is_duplicate=dup,
                qid1=str(row.get("qid1") or ""),
                qid2=str(row.get("qid2") or ""),
            ))
        except ValueError:
            counts["bad_row"] += 1
            log.warning("%s: row %d has an empty question; skipped", path, n)
    return records


class ParseLookup:
    """Resolves a question to its pre-parsed Sentence, by id first and then by text."""

    def __init__(self, sentences):
        self.by_id = {}
        self.by_text = {}
        for s in sentences:
            if s.id is not None:
                self.by_id.setdefault(s.id, s)
            if s.text is not None:
                self.by_text.setdefault(s.text.strip(), s)

    @classmethod
    def from_files(cls, *paths):
        sentences = []
        for p in paths:
            sentences.extend(read_conllu_file(p))
        return cls(sentences)

    def get(self, qid, text):
        if qid and qid in self.by_id:
            return self.by_id[qid]
        return self.by_text.get(text.strip())

    def __len__(self):
        return len(self.by_id) + len(self.by_text)


def build_idkd(records, parses, engine, seed, symmetric=True, counts=None):
    """Pair don't-know responses with paraphrases of the answerable question.

    Record ``k`` draws from its own stream ``derive_seed(seed, k, side)`` so
    the result does not depend on processing order. Exact duplicate
    (query, response) pairs keep their first occurrence.
    """
    counts = counts if counts is not None else Counter()
    pairs = []
    seen = set()
    for k, rec in enumerate(records):
        if not rec.is_duplicate:
            continue
        sides = [(0, rec.qid1, rec.question1, rec.question2)]
        if symmetric:
            sides.append((1, rec.qid2, rec.question2, rec.question1))
        for side, qid, source, query in sides:
            sentence = parses.get(qid, source)
            if sentence is None:
                counts["unparsed"] += 1
                log.warning("record %s: no parse for %r; skipped", rec.id, source)
                continue
            resp = engine.respond(sentence, SplitMix64(derive_seed(seed, k, side)))
            if resp.used_default:
                counts["unmatched"] += 1
                continue
            key = (query, resp.text)
            if key in seen:
                counts["duplicate"] += 1
                continue
            seen.add(key)
            pairs.append(IdkdPair(query=query, response=resp.text, source_id=rec.id,
                                  template_id=resp.template_id))
    return pairs


def split_idkd(pairs, train_fraction=0.8, seed=0):
    """Seeded shuffle, then the first floor(n * train_fraction) pairs go to training."""
    frac = Fraction(str(train_fraction)) if isinstance(train_fraction, float) else Fraction(train_fraction)
    if not 0 < frac < 1:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    order = list(pairs)
    SplitMix64(seed).shuffle(order)
    cut = math.floor(len(order) * frac)
    return order[:cut], order[cut:]


def header_record(seed, engine, **extra):
    head = {"build_seed": seed, **engine.version}
    head.update(extra)
    return {"_header": head}


def write_pairs(path, pairs, header):
    """One JSON object per line after a header line; byte-stable for equal input."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(header, sort_keys=True, ensure_ascii=False) + "\n")
        for p in pairs:
            f.write(json.dumps(p.to_dict(), sort_keys=True, ensure_ascii=False) + "\n")


def read_pairs(path):
    """Inverse of write_pairs: (header dict, list of IdkdPair)."""
    header, pairs = None, []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            obj = json.loads(line)
            if "_header" in obj:
                header = obj["_header"]
            else:
                pairs.append(IdkdPair(**obj))
    return header, pairs
