"""Just enough English verb morphology to undo do-support and fix copula agreement."""

import re

# base form -> simple past
IRREGULAR_PAST = {
    "arise": "arose", "awake": "awoke", "be": "was", "bear": "bore", "beat": "beat",
    "become": "became", "begin": "began", "bend": "bent", "bet": "bet", "bid": "bid",
    "bind": "bound", "bite": "bit", "bleed": "bled", "blow": "blew", "break": "broke",
    "breed": "bred", "bring": "brought", "broadcast": "broadcast", "build": "built",
    "burn": "burnt", "burst": "burst", "buy": "bought", "cast": "cast", "catch": "caught",
    "choose": "chose", "cling": "clung", "come": "came", "cost": "cost", "creep": "crept",
    "cut": "cut", "deal": "dealt", "dig": "dug", "do": "did", "draw": "drew",
    "dream": "dreamt", "drink": "drank", "drive": "drove", "eat": "ate", "fall": "fell",
    "feed": "fed", "feel": "felt", "fight": "fought", "find": "found", "flee": "fled",
    "fling": "flung", "fly": "flew", "forbid": "forbade", "forecast": "forecast",
    "foresee": "foresaw", "forget": "forgot", "forgive": "forgave", "freeze": "froze",
    "get": "got", "give": "gave", "go": "went", "grind": "ground", "grow": "grew",
    "hang": "hung", "have": "had", "hear": "heard", "hide": "hid", "hit": "hit",
    "hold": "held", "hurt": "hurt", "keep": "kept", "kneel": "knelt", "know": "knew",
    "lay": "laid", "lead": "led", "lean": "leant", "leap": "leapt", "learn": "learnt",
    "leave": "left", "lend": "lent", "let": "let", "lie": "lay", "light": "lit",
    "lose": "lost", "make": "made", "mean": "meant", "meet": "met", "mislead": "misled",
    "mistake": "mistook", "misunderstand": "misunderstood", "overcome": "overcame",
    "overdo": "overdid", "overtake": "overtook", "overthrow": "overthrew", "pay": "paid",
    "prove": "proved", "put": "put", "quit": "quit", "read": "read", "rebuild": "rebuilt",
    "redo": "redid", "rewrite": "rewrote", "rid": "rid", "ride": "rode", "ring": "rang",
    "rise": "rose", "run": "ran", "saw": "sawed", "say": "said", "see": "saw",
    "seek": "sought", "sell": "sold", "send": "sent", "set": "set", "sew": "sewed",
    "shake": "shook", "shed": "shed", "shine": "shone", "shoot": "shot", "show": "showed",
    "shrink": "shrank", "shut": "shut", "sing": "sang", "sink": "sank", "sit": "sat",
    "sleep": "slept", "slide": "slid", "sling": "slung", "slit": "slit", "smell": "smelt",
    "speak": "spoke", "speed": "sped", "spell": "spelt", "spend": "spent", "spill": "spilt",
    "spin": "spun", "spit": "spat", "split": "split", "spoil": "spoilt", "spread": "spread",
    "spring": "sprang", "stand": "stood", "steal": "stole", "stick": "stuck",
    "sting": "stung", "stink": "stank", "stride": "strode", "strike": "struck",
    "string": "strung", "strive": "strove", "swear": "swore", "sweep": "swept",
    "swell": "swelled", "swim": "swam", "swing": "swung", "take": "took", "teach": "taught",
    "tear": "tore", "tell": "told", "think": "thought", "throw": "threw", "thrust": "thrust",
    "tread": "trod", "undergo": "underwent", "understand": "understood",
    "undertake": "undertook", "undo": "undid", "upset": "upset", "wake": "woke",
    "wear": "wore", "weave": "wove", "weep": "wept", "win": "won", "wind": "wound",
    "withdraw": "withdrew", "withhold": "withheld", "withstand": "withstood",
    "wring": "wrung", "write": "wrote", "babysit": "babysat", "bust": "bust",
    "dive": "dove", "input": "input", "output": "output", "sneak": "snuck",
    "stave": "stove", "strew": "strewed", "upload": "uploaded", "download": "downloaded",
    "offset": "offset", "outdo": "outdid", "outgrow": "outgrew", "outrun": "outran",
    "oversee": "oversaw", "oversleep": "overslept", "overhear": "overheard",
    "override": "overrode", "partake": "partook", "retell": "retold", "rethink": "rethought",
    "resell": "resold", "reset": "reset", "retake": "retook", "rerun": "reran",
    "uphold": "upheld", "unwind": "unwound", "hew": "hewed",
    "forsake": "forsook", "befall": "befell", "behold": "beheld", "beget": "begot",
    "beseech": "besought", "cleave": "clove", "dwell": "dwelt", "shear": "sheared",
    "slay": "slew", "smite": "smote", "thrive": "throve",
    "inlay": "inlaid", "mislay": "mislaid",
    "misread": "misread", "mishear": "misheard", "misspell": "misspelt",
}

IRREGULAR_THIRD = {"be": "is", "have": "has", "do": "does", "go": "goes"}

_VOWELS = "aeiou"


def third_singular(base):
    """Present-tense third-person singular of a verb base form."""
    base = base.lower()
    if base in IRREGULAR_THIRD:
        return IRREGULAR_THIRD[base]
    if re.search(r"(s|sh|ch|x|z|o)$", base):
        return base + "es"
    if len(base) > 1 and base.endswith("y") and base[-2] not in _VOWELS:
        return base[:-1] + "ies"
    return base + "s"


def _doubles_final(base):
    # single vowel between consonants in a one-syllable word: stop -> stopped
    if len(re.findall(r"[aeiou]+", base)) != 1:
        return False
    return bool(re.search(r"[^aeiou][aeiou][^aeiouwxy]$", base))


def past_tense(base):
    """Simple past of a verb base form."""
    base = base.lower()
    if base in IRREGULAR_PAST:
        return IRREGULAR_PAST[base]
    if base.endswith("e"):
        return base + "d"
    if len(base) > 1 and base.endswith("y") and base[-2] not in _VOWELS:
        return base[:-1] + "ied"
    if _doubles_final(base):
        return base + base[-1] + "ed"
    return base + "ed"


def inflect_like_do(base, do_form):
    """Re-inflect ``base`` to carry the tense and person of a dropped do-form."""
    do_form = do_form.lower()
    if do_form in ("does", "doth"):
        return third_singular(base)
    if do_form == "did":
        return past_tense(base)
    return base.lower()


FIRST_SG = {"i"}
PLURAL_PRONOUNS = {"you", "we", "they", "these", "those"}
SINGULAR_PRONOUNS = {"he", "she", "it", "this", "that", "one"}


def be_form(subject_form, plural, past):
    """Finite form of *be* agreeing with a subject."""
    s = subject_form.lower()
    if s in FIRST_SG:
        return "was" if past else "am"
    if s in PLURAL_PRONOUNS:
        plural = True
    elif s in SINGULAR_PRONOUNS:
        plural = False
    if past:
        return "were" if plural else "was"
    return "are" if plural else "is"
