"""Reading, writing and navigating CoNLL-U dependency parses."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from urllib.parse import quote, unquote

# misc keys that carry non-word lines (multiword ranges, empty nodes)
MWT_KEY = "MWT"
MWT_AFTER_KEY = "MWT_AFTER"


class ConlluError(ValueError):
    pass


class ConlluParseError(ConlluError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ConlluStructureError(ConlluError):
    def __init__(self, message, sent_id=None):
        self.sent_id = sent_id
        if sent_id is not None:
            message = f"sentence {sent_id}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    lemma: str = ""
    upos: str = ""
    xpos: str = ""
    feats: dict = field(default_factory=dict)
    head: int = 0
    deprel: str = ""
    deps: str = ""
    misc: dict = field(default_factory=dict)

    @property
    def ne(self):
        """Named-entity label from the MISC column, or None."""
        return self.misc.get("NE")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple
    id: str | None = None
    text: str | None = None
    comments: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "comments", tuple(self.comments))

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def token(self, idx):
        if not 1 <= idx <= len(self.tokens):
            raise LookupError(f"no token with index {idx} in sentence {self.id}")
        return self.tokens[idx - 1]

    @cached_property
    def _children(self):
        kids = {t.index: [] for t in self.tokens}
        kids[0] = []
        for t in self.tokens:
            kids.setdefault(t.head, []).append(t.index)
        return kids

    def children(self, idx):
        """Indices of the direct dependents of ``idx``, in surface order."""
        return list(self._children.get(idx, ()))

    @property
    def root(self):
        for t in self.tokens:
            if t.head == 0:
                return t
        raise ConlluStructureError("no root token", self.id)


def _parse_kv(field_text):
    if field_text == "_" or field_text == "":
        return {}
    out = {}
    for item in field_text.split("|"):
        key, sep, value = item.partition("=")
        out[key] = value if sep else None
    return out


def _format_kv(mapping):
    if not mapping:
        return "_"
    return "|".join(k if v is None else f"{k}={v}" for k, v in mapping.items())


def _blank(value):
    return "" if value == "_" else value


def _sentence_label(sent_id, ordinal):
    return sent_id if sent_id is not None else f"#{ordinal}"


def validate(sentence, ordinal=None):
    """Check the tree invariants, raising ConlluStructureError on violation."""
    label = _sentence_label(sentence.id, ordinal)
    toks = sentence.tokens
    if not toks:
        raise ConlluStructureError("sentence has no word lines", label)
    n = len(toks)
    for pos, tok in enumerate(toks, start=1):
        if tok.index != pos:
            raise ConlluStructureError(
                f"token indices must be 1..{n} contiguous, found {tok.index} at position {pos}", label
            )
        if not tok.form:
            raise ConlluStructureError(f"token {tok.index} has an empty form", label)
        if tok.head == tok.index:
            raise ConlluStructureError(f"token {tok.index} is its own head", label)
        if not 0 <= tok.head <= n:
            raise ConlluStructureError(f"token {tok.index} has missing head target {tok.head}", label)
    roots = [t.index for t in toks if t.head == 0]
    if len(roots) != 1:
        raise ConlluStructureError(f"expected exactly one root, found {len(roots)}", label)
    heads = {t.index: t.head for t in toks}
    for start in heads:
        seen = set()
        node = start
        while node != 0:
            if node in seen:
                raise ConlluStructureError(f"head cycle through token {start}", label)
            seen.add(node)
            node = heads[node]


def _token_from_columns(cols, lineno):
    try:
        index = int(cols[0])
    except ValueError:
        raise ConlluParseError(f"malformed ID {cols[0]!r}", lineno) from None
    try:
        head = int(cols[6])
    except ValueError:
        raise ConlluParseError(f"malformed HEAD {cols[6]!r}", lineno) from None
    return Token(
        index=index,
        form=cols[1],
        lemma=_blank(cols[2]),
        upos=_blank(cols[3]),
        xpos=_blank(cols[4]),
        feats=_parse_kv(cols[5]),
        head=head,
        deprel=_blank(cols[7]),
        deps=_blank(cols[8]),
        misc=_parse_kv(cols[9]),
    )


def _encode_lines(lines):
    return ",".join(quote(line, safe="") for line in lines)


def _decode_lines(value):
    return [unquote(part) for part in value.split(",")] if value else []


def _finish_block(comments, tokens, pending, ordinal):
    sent_id = text = None
    others = []
    for line in comments:
        body = line[1:].strip()
        key, sep, value = body.partition("=")
        if sep and key.strip() == "sent_id" and sent_id is None:
            sent_id = value.strip()
        elif sep and key.strip() == "text" and text is None:
            text = value.strip()
        else:
            others.append(line)
    if pending:
        if not tokens:
            raise ConlluStructureError("sentence has no word lines", _sentence_label(sent_id, ordinal))
        last = tokens[-1]
        misc = dict(last.misc)
        misc[MWT_AFTER_KEY] = _encode_lines(pending)
        tokens[-1] = replace(last, misc=misc)
    sentence = Sentence(tokens=tokens, id=sent_id, text=text, comments=others)
    validate(sentence, ordinal)
    return sentence


def read_conllu(text):
    """Parse CoNLL-U text into a list of Sentence objects.

    Multiword-token ranges (``3-4``) and empty nodes (``5.1``) do not become
    tree nodes; their raw lines are stored, percent-encoded, under the ``MWT``
    key of the next word's MISC so that writing the sentence back restores them.
    """
    sentences = []
    comments, tokens, pending = [], [], []
    in_block = False
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            if in_block:
                sentences.append(_finish_block(comments, tokens, pending, len(sentences) + 1))
                comments, tokens, pending = [], [], []
                in_block = False
            continue
        in_block = True
        if line.startswith("#"):
            comments.append(line)
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluParseError(f"expected 10 tab-separated columns, found {len(cols)}", lineno)
        if "-" in cols[0] or "." in cols[0]:
            bounds = cols[0].replace("-", ".").split(".")
            if len(bounds) != 2 or not all(b.isdigit() for b in bounds):
                raise ConlluParseError(f"malformed ID {cols[0]!r}", lineno)
            pending.append(line)
            continue
        tok = _token_from_columns(cols, lineno)
        if pending:
            misc = dict(tok.misc)
            misc[MWT_KEY] = _encode_lines(pending)
            tok = replace(tok, misc=misc)
            pending = []
        tokens.append(tok)
    if in_block:
        sentences.append(_finish_block(comments, tokens, pending, len(sentences) + 1))
    return sentences


def read_conllu_file(path):
    with open(path, encoding="utf-8") as f:
        return read_conllu(f.read())


def _word_line(tok):
    misc = {k: v for k, v in tok.misc.items() if k not in (MWT_KEY, MWT_AFTER_KEY)}
    return "\t".join([
        str(tok.index),
        tok.form,
        tok.lemma or "_",
        tok.upos or "_",
        tok.xpos or "_",
        _format_kv(tok.feats),
        str(tok.head),
        tok.deprel or "_",
        tok.deps or "_",
        _format_kv(misc),
    ])


def write_conllu(sentences):
    """Serialize sentences to CoNLL-U; the inverse of read_conllu."""
    out = []
    for ordinal, sentence in enumerate(sentences, start=1):
        validate(sentence, ordinal)
        if sentence.id is not None:
            out.append(f"# sent_id = {sentence.id}")
        if sentence.text is not None:
            out.append(f"# text = {sentence.text}")
        out.extend(sentence.comments)
        for tok in sentence.tokens:
            out.extend(_decode_lines(tok.misc.get(MWT_KEY, "")))
            out.append(_word_line(tok))
            out.extend(_decode_lines(tok.misc.get(MWT_AFTER_KEY, "")))
        out.append("")
    return "".join(line + "\n" for line in out)


def subtree_indices(sentence, idx):
    """Set of token indices dominated by ``idx`` (inclusive)."""
    sentence.token(idx)
    seen = {idx}
    stack = [idx]
    while stack:
        for child in sentence.children(stack.pop()):
            if child not in seen:
                seen.add(child)
                stack.append(child)
    return seen


def subtree_yield(sentence, idx):
    """The token at ``idx`` and all its transitive dependents, in surface order."""
    return [sentence.token(i) for i in sorted(subtree_indices(sentence, idx))]
