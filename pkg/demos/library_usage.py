"""Using the engine as a library: one response, then a custom prefix pool."""
from pathlib import Path

from dontknow.conllu import read_conllu_file
from dontknow.realize import Engine
from dontknow.rng import SplitMix64

GOLD = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "gold.conllu"


def main():
    engine = Engine()
    questions = read_conllu_file(GOLD)
    for i, sentence in enumerate(questions[:5]):
        resp = engine.respond(sentence, SplitMix64(i))
        print(f"{sentence.text}\n  {resp.template_id or 'default'}: {resp.text}")

    # a deployment with its own tone: swap the pools, keep the templates
    polite = engine.config.replace(prefix_pool=("Sadly, I can't say",), suffix_pool=("",),
                                   ne_substitution_prob=0.0)
    custom = Engine(engine.templates, polite)
    print(custom.respond(questions[1], SplitMix64(0)).text)


if __name__ == "__main__":
    main()
