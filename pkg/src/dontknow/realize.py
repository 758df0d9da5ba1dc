"""Turning a matched question into a contextual don't-know response."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, replace
from importlib import resources

import yaml

from . import __version__
from .conllu import Token, subtree_indices
from .morphology import be_form, inflect_like_do
from .patterns import first_match, load_templates
from .rng import SplitMix64

log = logging.getLogger(__name__)


class RealizationError(RuntimeError):
    pass


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ResponseConfig:
    prefix_pool: tuple
    whether_prefix_pool: tuple
    suffix_pool: tuple
    default_pool: tuple
    ne_substitution_prob: float = 0.3
    seed: int = 0

    def __post_init__(self):
        for name in ("prefix_pool", "whether_prefix_pool", "suffix_pool", "default_pool"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        for name in ("prefix_pool", "whether_prefix_pool", "default_pool"):
            pool = getattr(self, name)
            if not pool:
                raise ConfigError(f"{name} must not be empty")
            if any(not isinstance(p, str) or not p.strip() for p in pool):
                raise ConfigError(f"{name} entries must be non-empty strings")
        for suffix in self.suffix_pool:
            if not isinstance(suffix, str):
                raise ConfigError("suffix_pool entries must be strings")
            if suffix.strip() and not suffix.strip().endswith("."):
                raise ConfigError(f"suffix {suffix!r} must end with '.'")
        for text in self.default_pool:
            if not text.endswith("."):
                raise ConfigError(f"default response {text!r} must end with '.'")
        if not 0.0 <= self.ne_substitution_prob <= 1.0:
            raise ConfigError("ne_substitution_prob must lie in [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    def replace(self, **changes):
        return replace(self, **changes)


def load_config(path=None):
    """Read a pools file (YAML); the shipped default when ``path`` is None."""
    if path is None:
        text = resources.files("dontknow").joinpath("config/default_pools.cfg").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    data = yaml.safe_load(text) or {}
    known = {"prefix_pool", "whether_prefix_pool", "suffix_pool", "default_pool",
             "ne_substitution_prob", "seed"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown pools-file keys {sorted(unknown)}")
    missing = {"prefix_pool", "whether_prefix_pool", "default_pool"} - set(data)
    if missing:
        raise ConfigError(f"pools file lacks {sorted(missing)}")
    suffixes = ["" if s is None else str(s) for s in data.get("suffix_pool") or [""]]
    return ResponseConfig(
        prefix_pool=[str(p) for p in data["prefix_pool"]],
        whether_prefix_pool=[str(p) for p in data["whether_prefix_pool"]],
        suffix_pool=suffixes,
        default_pool=[str(p) for p in data["default_pool"]],
        ne_substitution_prob=float(data.get("ne_substitution_prob", 0.3)),
        seed=int(data.get("seed", 0)),
    )


@dataclass(frozen=True)
class FallbackResponse:
    text: str
    template_id: str | None = None
    used_default: bool = False
    prefix: str = ""
    suffix: str = ""
    body: str = ""

    def to_dict(self):
        return asdict(self)


# -- realization plan --------------------------------------------------------

def _is_negated(sentence, *heads):
    for h in heads:
        for child in sentence.children(h):
            tok = sentence.token(child)
            if tok.lemma.lower() == "not" or tok.form.lower() in ("not", "n't", "n’t"):
                return True
    return False


def _subject_is_plural(sentence, idx):
    tok = sentence.token(idx)
    if tok.feats.get("Number") == "Plur":
        return True
    if any(sentence.token(c).deprel == "conj" for c in sentence.children(idx)):
        return True
    return tok.xpos in ("NNS", "NNPS")


def _agreeing_copula(sentence, cop, subj_idx):
    past = cop.feats.get("Tense") == "Past" or cop.form.lower() in ("was", "were")
    subj = sentence.token(subj_idx)
    form = be_form(subj.form, _subject_is_plural(sentence, subj_idx), past)
    return replace(cop, form=form, lemma="be")


def realize_body(sentence, template, bindings):
    """Execute ``template``'s realization plan, returning the body tokens.

    Tokens keep their source index, so callers can trace each output word
    back to the parse.
    """
    root_idx = sentence.root.index
    root_punct = {t.index for t in sentence.tokens if t.deprel == "punct" and t.head == root_idx}
    subtree_slots = [s for name, s in template.plan if name == "EMIT_SUBTREE"]
    plan_slots = {s for _, s in template.plan}

    emitted = []
    placed = set()
    dropped = set()
    reinflect = {}
    cop_final = None

    def slot_index(name, slot):
        if slot not in bindings:
            raise RealizationError(f"template {template.id}: {name}({slot}) on an unbound slot")
        return bindings[slot]

    for name, slot in template.plan:
        idx = slot_index(name, slot)
        if name == "EMIT":
            if idx not in placed and idx not in dropped:
                emitted.append(idx)
                placed.add(idx)
        elif name == "EMIT_SUBTREE":
            excluded = set(placed) | dropped | root_punct
            excluded |= {i for s, i in bindings.items() if s != slot and s in plan_slots}
            own = subtree_indices(sentence, idx)
            for other in subtree_slots:
                other_idx = bindings.get(other)
                if other != slot and other_idx is not None and other_idx != idx and other_idx in own:
                    excluded |= subtree_indices(sentence, other_idx)
            for i in sorted(own - excluded):
                emitted.append(i)
                placed.add(i)
        elif name == "MOVE_COP_FINAL":
            cop_final = idx
            placed.add(idx)
        elif name == "DROP_DO":
            tok = sentence.token(idx)
            if tok.lemma.lower() == "do" and not _is_negated(sentence, root_idx, idx):
                dropped.add(idx)
        elif name == "REINFLECT":
            reinflect[idx] = True

    do_forms = [sentence.token(i).form for i in dropped]
    out = []
    for i in emitted + ([cop_final] if cop_final is not None else []):
        tok = sentence.token(i)
        if i in reinflect and do_forms:
            tok = replace(tok, form=inflect_like_do(tok.lemma or tok.form, do_forms[0]))
        if i == cop_final and "subj" in bindings:
            tok = _agreeing_copula(sentence, tok, bindings["subj"])
        if i == 1 and tok.upos != "PROPN" and tok.form != "I":
            # sentence-initial capital is not part of the word
            tok = replace(tok, form=tok.form[:1].lower() + tok.form[1:])
        out.append(tok)
    return out


# -- auxiliaries -------------------------------------------------------------

_NEG_HOST = {"ca": "can", "wo": "will", "sha": "shall"}
_AUX_FORMS = {
    "can", "could", "will", "would", "shall", "should", "may", "might", "must",
    "do", "does", "did", "is", "are", "am", "was", "were", "be", "have", "has", "had",
    "ca", "wo", "sha",
}
_AUX_RELS = {"aux", "aux:pass", "auxpass", "cop"}
_NOMINATIVE = {"i", "you", "he", "she", "it", "we", "they"}


def _as_tokens(tokens):
    return [Token(index=i, form=t) if isinstance(t, str) else t for i, t in enumerate(tokens, start=1)]


def _is_aux(tok):
    if tok.upos or tok.deprel:
        return tok.upos == "AUX" or tok.deprel in _AUX_RELS
    return tok.form.lower() in _AUX_FORMS


def _is_not(tok):
    return tok.form.lower() == "not"


def _expand_contractions(tokens):
    out = []
    for tok in tokens:
        low = tok.form.lower().replace("’", "'")
        if low == "n't":
            if out and out[-1].form.lower() in _NEG_HOST:
                host = out[-1]
                out[-1] = replace(host, form=_NEG_HOST[host.form.lower()])
            out.append(replace(tok, form="not", lemma="not"))
        elif low.endswith("n't") and len(low) > 3:
            stem = low[:-3]
            stem = {"ca": "can", "wo": "will", "sha": "shall"}.get(stem, stem)
            if tok.form[0].isupper():
                stem = stem.capitalize()
            out.append(replace(tok, form=stem))
            out.append(Token(index=tok.index, form="not", lemma="not", upos="PART",
                             head=tok.head, deprel="advmod"))
        elif low == "cannot":
            out.append(replace(tok, form="can" if tok.form[0].islower() else "Can"))
            out.append(Token(index=tok.index, form="not", lemma="not", upos="PART",
                             head=tok.head, deprel="advmod"))
        else:
            out.append(tok)
    return out


def _subject_span(tokens, subj_idx):
    """Positions in ``tokens`` belonging to the subject phrase headed by ``subj_idx``."""
    by_index = {}
    for pos, tok in enumerate(tokens):
        by_index.setdefault(tok.index, pos)
    span = []
    for pos, tok in enumerate(tokens):
        node, hops = tok, 0
        while hops <= len(tokens):
            if node.index == subj_idx:
                span.append(pos)
                break
            if node.head not in by_index or node.head == node.index:
                break
            node = tokens[by_index[node.head]]
            hops += 1
    return span


def handle_modals_aux(tokens, bindings=None):
    """Expand negative contractions and put the subject before its auxiliary.

    Accepts Tokens or bare strings; with strings the auxiliary and subject
    are recognised from small closed word lists.
    """
    tokens = _expand_contractions(_as_tokens(tokens))
    subj_idx = (bindings or {}).get("subj")
    if subj_idx is None:
        for tok in tokens:
            if tok.deprel.startswith("nsubj") or (not tok.deprel and tok.form.lower() in _NOMINATIVE):
                subj_idx = tok.index
                break
    if subj_idx is None:
        return tokens
    span = _subject_span(tokens, subj_idx)
    if not span or span != list(range(span[0], span[-1] + 1)):
        return tokens
    start = span[0]
    group_start = start
    while group_start > 0 and _is_not(tokens[group_start - 1]):
        group_start -= 1
    if group_start == 0 or not _is_aux(tokens[group_start - 1]):
        return tokens
    group_start -= 1
    aux = tokens[group_start]
    subj = next(tokens[p] for p in span if tokens[p].index == subj_idx)
    if aux.head and subj.head and aux.head != subj.head:
        return tokens
    subject = tokens[start:span[-1] + 1]
    group = tokens[group_start:start]
    return tokens[:group_start] + subject + group + tokens[span[-1] + 1:]


# -- pronouns ----------------------------------------------------------------

NOMINATIVE, ACCUSATIVE, POSS_DET, POSS_PRON, REFLEXIVE = (
    "nominative", "accusative", "possessive-det", "possessive-pron", "reflexive")

# (surface form, case, flipped form)
PRONOUN_MAP = (
    ("i", NOMINATIVE, "you"),
    ("you", NOMINATIVE, "I"),
    ("me", ACCUSATIVE, "you"),
    ("you", ACCUSATIVE, "me"),
    ("my", POSS_DET, "your"),
    ("your", POSS_DET, "my"),
    ("mine", POSS_PRON, "yours"),
    ("yours", POSS_PRON, "mine"),
    ("myself", REFLEXIVE, "yourself"),
    ("yourself", REFLEXIVE, "myself"),
)
_FLIP = {(form, case): flipped for form, case, flipped in PRONOUN_MAP}
_CASE_OF_FORM = {"i": NOMINATIVE, "me": ACCUSATIVE, "my": POSS_DET, "your": POSS_DET,
                 "mine": POSS_PRON, "yours": POSS_PRON,
                 "myself": REFLEXIVE, "yourself": REFLEXIVE}
_BE_FLIP = {"am": "are", "are": "am", "'m": "'re", "'re": "'m", "was": "were", "were": "was"}


def pronoun_case(tok):
    low = tok.form.lower()
    if low in _CASE_OF_FORM:
        return _CASE_OF_FORM[low]
    if low == "you":
        rel = tok.deprel
        if not rel or rel.startswith("nsubj") or rel == "expl":
            return NOMINATIVE
        return ACCUSATIVE
    return None


def flip_pronouns(tokens):
    """Swap first and second person, with the adjacent form of *be* when it agrees."""
    tokens = list(_as_tokens(tokens))
    out = list(tokens)
    for pos, tok in enumerate(tokens):
        case = pronoun_case(tok)
        if case is None:
            continue
        flipped = _FLIP[(tok.form.lower(), case)]
        if flipped != "I" and tok.form[:1].isupper() and tok.form != "I":
            flipped = flipped.capitalize()
        feats = dict(tok.feats)
        if feats.get("Person") in ("1", "2"):
            feats["Person"] = "2" if feats["Person"] == "1" else "1"
        out[pos] = replace(tok, form=flipped, feats=feats)
        if case != NOMINATIVE:
            continue
        for npos in (pos + 1, pos - 1):
            if not 0 <= npos < len(tokens):
                continue
            be = tokens[npos]
            low = be.form.lower()
            if low in _BE_FLIP and be.head == tok.head:
                form = _BE_FLIP[low]
                out[npos] = replace(be, form=form.capitalize() if be.form[0].isupper() else form)
                break
    return out


# -- named entities ----------------------------------------------------------

NE_REPLACEMENTS = {"PERSON": "person", "ORG": "organization", "LOC": "place"}


def substitute_named_entity(tokens, rng, prob):
    """Replace whole PERSON/ORG/LOC spans by "that person" etc. with probability ``prob``.

    One uniform draw is taken per span, and only when 0 < prob < 1.
    """
    tokens = _as_tokens(tokens)
    out = []
    pos = 0
    while pos < len(tokens):
        label = tokens[pos].ne
        if label not in NE_REPLACEMENTS:
            out.append(tokens[pos])
            pos += 1
            continue
        end = pos
        while end + 1 < len(tokens) and tokens[end + 1].ne == label:
            end += 1
        span = tokens[pos:end + 1]
        if prob <= 0:
            replace_it = False
        elif prob >= 1:
            replace_it = True
        else:
            replace_it = rng.random() < prob
        if replace_it:
            indices = {t.index for t in span}
            head = next((t for t in span if t.head not in indices), span[-1])
            out.append(Token(index=head.index, form="that", lemma="that", upos="DET",
                             head=head.index, deprel="det"))
            out.append(Token(index=head.index, form=NE_REPLACEMENTS[label],
                             lemma=NE_REPLACEMENTS[label], upos="NOUN", feats={"Number": "Sing"},
                             head=head.head, deprel=head.deprel))
        else:
            out.extend(span)
        pos = end + 1
    return out


# -- surface -----------------------------------------------------------------

_NO_SPACE_BEFORE = {",", ".", "!", "?", ";", ":", ")", "%", "'", "'s", "n't", "'m", "'re",
                    "'ve", "'ll", "'d", "’", "’s", "n’t", "’m", "’re", "’ve", "’ll", "’d"}
_NO_SPACE_AFTER = {"(", "$"}


def detokenize(tokens):
    """Join token forms into a clause; no terminal punctuation is added."""
    tokens = _as_tokens(tokens)
    parts = []
    for i, tok in enumerate(tokens):
        form = tok.form
        if i == 0:
            keep = tok.upos == "PROPN" or form == "I" or form.startswith("I'") or (
                len(form) > 1 and form.isupper())
            if not keep:
                form = form[:1].lower() + form[1:]
        elif tok.form.lower() not in _NO_SPACE_BEFORE and tokens[i - 1].form not in _NO_SPACE_AFTER:
            parts.append(" ")
        parts.append(form)
    return "".join(parts)


def compose(prefix, body, suffix=""):
    """prefix + body + '.' [+ suffix], with single spaces and one terminal period."""
    body = body.strip().rstrip("?!. ").strip()
    if not body:
        raise ValueError("compose requires a non-empty body")
    text = f"{prefix.strip()} {body}."
    suffix = suffix.strip()
    if suffix:
        if not suffix.endswith("."):
            suffix = suffix.rstrip("?!") + "."
        text = f"{text} {suffix}"
    return text


# -- the full pipeline -------------------------------------------------------

def _default_response(config, rng):
    return FallbackResponse(text=rng.choice(config.default_pool), used_default=True)


def dbr(sentence, pool, config, rng):
    """Dependency-based response for one parsed question; total on valid input.

    Draw order on ``rng``: one per named-entity span (only when the
    substitution probability is strictly between 0 and 1), then the prefix,
    then the suffix. The default branch makes a single draw from the default pool.
    """
    match = first_match(sentence, pool)
    if match is None:
        return _default_response(config, rng)
    template, bindings = match
    tokens = realize_body(sentence, template, bindings)
    tokens = handle_modals_aux(tokens, bindings)
    tokens = flip_pronouns(tokens)
    tokens = substitute_named_entity(tokens, rng, config.ne_substitution_prob)
    body = detokenize(tokens).strip().rstrip("?!. ").strip()
    if not body:
        log.debug("template %s produced an empty body for %s", template.id, sentence.id)
        return _default_response(config, rng)
    prefixes = config.whether_prefix_pool if template.frame == "whether" else config.prefix_pool
    prefix = rng.choice(prefixes)
    suffix = rng.choice(config.suffix_pool) if config.suffix_pool else ""
    return FallbackResponse(
        text=compose(prefix, body, suffix),
        template_id=template.id,
        used_default=False,
        prefix=prefix,
        suffix=suffix.strip(),
        body=body,
    )


@dataclass(frozen=True)
class Engine:
    """A template pool plus response pools; immutable and shareable."""

    templates: object = field(default_factory=load_templates)
    config: ResponseConfig = field(default_factory=load_config)

    @classmethod
    def from_files(cls, template_file=None, pools_file=None):
        return cls(load_templates(template_file), load_config(pools_file))

    @property
    def version(self):
        return {"engine_version": __version__, "template_hash": self.templates.source_hash}

    def match(self, sentence):
        return first_match(sentence, self.templates)

    def respond(self, sentence, rng=None):
        if rng is None:
            rng = SplitMix64(self.config.seed)
        return dbr(sentence, self.templates, self.config, rng)

