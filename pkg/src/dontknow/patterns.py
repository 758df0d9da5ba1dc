"""Dependency templates: a small declarative pattern language and its matcher.

A template is a set of node constraints rooted at the sentence's syntactic
root plus a realization plan. Template files look like::

    template: T-MODAL
    class: WH question with a modal auxiliary ("How can I X?")
    priority: 20
    constraints:
      root: upos=VERB
      wh:   head=root deprel=advmod|obj|obl lemma=how|where|what
      aux:  head=root deprel=aux lemma=can|could|should
      subj: head=root deprel=nsubj
    plan: EMIT(wh) EMIT_SUBTREE(subj) EMIT(aux) EMIT_SUBTREE(root)

Records are separated by the next ``template:`` line; ``#`` starts a comment.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources

ROOT = "root"

DIRECTIVES = {
    # name -> default slot (None: slot argument required)
    "EMIT": None,
    "EMIT_SUBTREE": None,
    "MOVE_COP_FINAL": "cop",
    "DROP_DO": "aux",
    "REINFLECT": None,
}

FRAMES = ("plain", "whether")

# UD v1 <-> v2 relation names, applied in both directions when compiling
DEPREL_ALIASES = {
    "obj": "dobj",
    "nsubj:pass": "nsubjpass",
    "aux:pass": "auxpass",
    "nmod:poss": "poss",
}

_CONSTRAINT_KEYS = {"upos", "deprel", "lemma", "feats", "head", "initial"}
_DIRECTIVE_RE = re.compile(r"([A-Z_]+)(?:\(\s*([A-Za-z_][\w-]*)?\s*\))?$")


class TemplateError(ValueError):
    def __init__(self, message, template_id=None):
        self.template_id = template_id
        if template_id is not None:
            message = f"template {template_id}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class NodeConstraint:
    slot: str
    upos: frozenset | None = None
    deprel: frozenset | None = None
    lemma: frozenset | None = None
    feats: tuple | None = None
    attaches_to: str | None = None
    initial: bool = False

    def accepts(self, tok):
        """Node-local test; attachment is checked by the matcher."""
        if self.upos is not None and tok.upos not in self.upos:
            return False
        if self.deprel is not None and tok.deprel not in self.deprel:
            return False
        if self.lemma is not None and tok.lemma.lower() not in self.lemma:
            return False
        if self.feats is not None:
            for key, value in self.feats:
                if tok.feats.get(key) != value:
                    return False
        if self.initial and tok.index != 1:
            return False
        return True


@dataclass(frozen=True)
class Template:
    id: str
    question_class: str
    constraints: tuple
    plan: tuple
    priority: int = 100
    frame: str = "plain"

    @property
    def slots(self):
        return [c.slot for c in self.constraints]

    def constraint(self, slot):
        for c in self.constraints:
            if c.slot == slot:
                return c
        raise KeyError(slot)


@dataclass(frozen=True)
class TemplatePool:
    templates: tuple
    source_hash: str = ""

    def __iter__(self):
        return iter(self.templates)

    def __len__(self):
        return len(self.templates)

    def __getitem__(self, key):
        if isinstance(key, str):
            for t in self.templates:
                if t.id == key:
                    return t
            raise KeyError(key)
        return self.templates[key]


def _split_set(value, lower=False):
    items = [v.strip() for v in value.split("|") if v.strip()]
    if lower:
        items = [v.lower() for v in items]
    return frozenset(items)


def _with_aliases(deprels):
    out = set(deprels)
    for a, b in DEPREL_ALIASES.items():
        if a in out:
            out.add(b)
        if b in out:
            out.add(a)
    return frozenset(out)


def _parse_constraint(slot, attrs, template_id):
    if isinstance(attrs, str):
        pairs = {}
        for item in attrs.split():
            key, sep, value = item.partition("=")
            if not sep:
                raise TemplateError(f"slot {slot}: expected key=value, got {item!r}", template_id)
            if key in pairs:
                raise TemplateError(f"slot {slot}: repeated key {key!r}", template_id)
            pairs[key] = value
        attrs = pairs
    unknown = set(attrs) - _CONSTRAINT_KEYS
    if unknown:
        raise TemplateError(f"slot {slot}: unknown constraint key(s) {sorted(unknown)}", template_id)
    feats = None
    if attrs.get("feats"):
        feats = []
        for item in attrs["feats"].split("|"):
            key, sep, value = item.partition("=")
            if not sep:
                raise TemplateError(f"slot {slot}: malformed feature {item!r}", template_id)
            feats.append((key, value))
        feats = tuple(feats)
    initial = str(attrs.get("initial", "no")).lower()
    if initial not in ("yes", "no", "true", "false"):
        raise TemplateError(f"slot {slot}: initial must be yes or no", template_id)
    return NodeConstraint(
        slot=slot,
        upos=_split_set(attrs["upos"]) if attrs.get("upos") else None,
        deprel=_with_aliases(_split_set(attrs["deprel"])) if attrs.get("deprel") else None,
        lemma=_split_set(attrs["lemma"], lower=True) if attrs.get("lemma") else None,
        feats=feats,
        attaches_to=attrs.get("head") or None,
        initial=initial in ("yes", "true"),
    )


def _parse_plan(plan, template_id):
    if isinstance(plan, str):
        plan = plan.split()
    steps = []
    for item in plan:
        if isinstance(item, tuple):
            name, slot = item
        else:
            m = _DIRECTIVE_RE.match(item.strip())
            if not m:
                raise TemplateError(f"malformed plan step {item!r}", template_id)
            name, slot = m.group(1), m.group(2)
        if name not in DIRECTIVES:
            raise TemplateError(f"unknown directive {name}", template_id)
        slot = slot or DIRECTIVES[name]
        if slot is None:
            raise TemplateError(f"directive {name} needs a slot argument", template_id)
        steps.append((name, slot))
    return tuple(steps)


def compile_template(spec):
    """Validate a template description record and build a Template.

    ``spec`` is a mapping with keys ``id``, ``class``, ``priority``,
    ``frame`` (optional), ``constraints`` (a list of ``(slot, attrs)`` pairs,
    attrs either a ``key=value`` string or a dict) and ``plan``.
    """
    tid = spec.get("id")
    if not tid:
        raise TemplateError("template record has no id")
    try:
        priority = int(spec.get("priority", 100))
    except (TypeError, ValueError):
        raise TemplateError(f"priority must be an integer, got {spec.get('priority')!r}", tid) from None
    frame = spec.get("frame", "plain")
    if frame not in FRAMES:
        raise TemplateError(f"unknown frame {frame!r}", tid)

    constraints = []
    seen = set()
    for slot, attrs in spec.get("constraints", ()):
        if slot in seen:
            raise TemplateError(f"duplicate slot {slot}", tid)
        seen.add(slot)
        constraints.append(_parse_constraint(slot, attrs, tid))
    if ROOT not in seen:
        raise TemplateError("no root anchor constraint", tid)
    for c in constraints:
        if c.slot == ROOT and c.attaches_to is not None:
            raise TemplateError("the root anchor cannot attach to another slot", tid)
        if c.attaches_to is not None and c.attaches_to not in seen:
            raise TemplateError(f"slot {c.slot} attaches to undeclared slot {c.attaches_to}", tid)
    heads = {c.slot: c.attaches_to for c in constraints}
    for slot in heads:
        chain, node = set(), slot
        while node is not None:
            if node in chain:
                raise TemplateError(f"attachment cycle through slot {slot}", tid)
            chain.add(node)
            node = heads[node]

    plan = _parse_plan(spec.get("plan", ()), tid)
    if not plan:
        raise TemplateError("empty realization plan", tid)
    for name, slot in plan:
        if slot not in seen:
            raise TemplateError(f"plan step {name}({slot}) references undeclared slot", tid)

    return Template(
        id=tid,
        question_class=spec.get("class", ""),
        constraints=tuple(constraints),
        plan=plan,
        priority=priority,
        frame=frame,
    )


def parse_template_text(text):
    """Split a template file into description records (dicts)."""
    records = []
    current = None
    in_constraints = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indented = line[0] in " \t"
        if indented:
            if current is None or not in_constraints:
                raise TemplateError(f"line {lineno}: unexpected indented line")
            slot, sep, attrs = line.strip().partition(":")
            if not sep:
                raise TemplateError(f"line {lineno}: constraint must be 'slot: key=value ...'", current["id"])
            current["constraints"].append((slot.strip(), attrs.strip()))
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise TemplateError(f"line {lineno}: expected 'key: value'")
        key, value = key.strip(), value.strip()
        in_constraints = False
        if key == "template":
            current = {"id": value, "constraints": []}
            records.append(current)
        elif current is None:
            raise TemplateError(f"line {lineno}: {key!r} before any 'template:' line")
        elif key == "constraints":
            in_constraints = True
        elif key in ("class", "priority", "frame", "plan"):
            current[key] = value
        else:
            raise TemplateError(f"line {lineno}: unknown field {key!r}", current["id"])
    return records


def load_templates(path=None):
    """Compile a template file (the shipped default when ``path`` is None)."""
    if path is None:
        data = resources.files("dontknow").joinpath("templates/default.tpl").read_bytes()
    else:
        with open(path, "rb") as f:
            data = f.read()
    text = data.decode("utf-8")
    templates = [compile_template(rec) for rec in parse_template_text(text)]
    ids = [t.id for t in templates]
    dupes = {i for i in ids if ids.count(i) > 1}
    if dupes:
        raise TemplateError(f"duplicate template ids {sorted(dupes)}")
    return TemplatePool(tuple(templates), hashlib.sha256(data).hexdigest())


def _slot_order(template):
    """Non-root slots ordered so every slot follows the slot it attaches to."""
    placed = {ROOT}
    order = []
    pending = [c for c in template.constraints if c.slot != ROOT]
    while pending:
        for c in pending:
            if c.attaches_to is None or c.attaches_to in placed:
                order.append(c)
                placed.add(c.slot)
                pending.remove(c)
                break
    return order


def match_template(sentence, template):
    """Bind every slot of ``template`` to a distinct token, or return None.

    The root anchor is bound to the sentence root; other slots are resolved
    in attachment order, trying candidates by ascending surface index, so the
    first complete assignment found is the lexicographically lowest one.
    """
    root_tok = sentence.root
    if not template.constraint(ROOT).accepts(root_tok):
        return None
    bindings = {ROOT: root_tok.index}
    order = _slot_order(template)

    def search(k):
        if k == len(order):
            return True
        c = order[k]
        if c.attaches_to is not None:
            candidates = sentence.children(bindings[c.attaches_to])
        else:
            candidates = [t.index for t in sentence.tokens]
        used = set(bindings.values())
        for idx in candidates:
            if idx in used or not c.accepts(sentence.token(idx)):
                continue
            bindings[c.slot] = idx
            if search(k + 1):
                return True
            del bindings[c.slot]
        return False

    return dict(bindings) if search(0) else None


def first_match(sentence, pool):
    """First template (ascending priority, then pool order) that matches."""
    ranked = sorted(enumerate(pool), key=lambda p: (p[1].priority, p[0]))
    for _, template in ranked:
        bindings = match_template(sentence, template)
        if bindings is not None:
            return template, bindings
    return None
