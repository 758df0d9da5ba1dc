"""dontknow command line.

Exit status: 0 success, 1 other failure (bad template or pools file, bad
input corpus), 2 parser unreachable, 3 malformed CoNLL-U, 64 usage error.
Failures are also written to standard error as one JSON object.

DONTKNOW_SEED and DONTKNOW_PARSER_URL stand in for --seed and --parser-url.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter
from pathlib import Path

from .conllu import ConlluError, read_conllu_file
from .dataset import (IngestionError, ParseLookup, build_idkd, header_record, load_paraphrase_corpus,
                      split_idkd, write_pairs)
from .metrics import MetricError, export_annotation_sheet, format_report, import_annotation_sheet, report
from .parser_client import ParserUnavailable, parse_text
from .patterns import TemplateError
from .realize import ConfigError, Engine, FallbackResponse
from .rng import SplitMix64, derive_seed

EXIT_OK, EXIT_FAIL, EXIT_PARSER, EXIT_CONLLU, EXIT_USAGE = 0, 1, 2, 3, 64

EPILOG = """exit status:
  0   success
  1   other failure (template/pools file, corpus, metrics)
  2   parser unreachable or returned no usable parse
  3   malformed CoNLL-U input
  64  usage error

environment:
  DONTKNOW_SEED        default for --seed
  DONTKNOW_PARSER_URL  default for --parser-url
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _report_error("usage", message, EXIT_USAGE)
        sys.exit(EXIT_USAGE)


def _report_error(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": str(message), "exit": code}) + "\n")


def _seed(value):
    try:
        seed = int(value, 0)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"not an integer seed: {value!r}") from None
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return seed


def _fraction(value):
    try:
        f = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {value!r}") from None
    if not 0 < f < 1:
        raise argparse.ArgumentTypeError("train fraction must lie strictly between 0 and 1")
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--templates", metavar="FILE", help="template file (default: bundled)")
    common.add_argument("--pools", metavar="FILE", help="response pools file (default: bundled)")
    common.add_argument("--seed", type=_seed, help="random seed (default: $DONTKNOW_SEED or the pools file)")

    p = _Parser(prog="dontknow", description="Contextual don't-know responses from dependency parses.",
                epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("respond", parents=[common], help="respond to one question",
                       epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--text", help="question text; needs --parser-url")
    src.add_argument("--conllu", metavar="FILE", help="pre-parsed question(s)")
    r.add_argument("--parser-url", help="parser endpoint (POST text, receive CoNLL-U)")
    r.add_argument("--json", action="store_true", help="print the full response record")

    b = sub.add_parser("batch", parents=[common], help="respond to every sentence of a CoNLL-U file",
                       epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    b.add_argument("--conllu", metavar="FILE", required=True)
    b.add_argument("--output", "-o", metavar="FILE", help="JSON-lines output (default: stdout)")

    d = sub.add_parser("build-dataset", parents=[common], help="build IDKD pairs and train/validation splits",
                       epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    d.add_argument("--pairs", metavar="FILE", required=True, help="QQP-layout question pairs")
    d.add_argument("--parses", metavar="FILE", required=True, nargs="+", help="CoNLL-U parses keyed by question id")
    d.add_argument("--out-dir", metavar="DIR", required=True)
    d.add_argument("--train-fraction", type=_fraction, default="0.8")
    d.add_argument("--single-direction", action="store_true",
                   help="only pair question2 with the response to question1")

    e = sub.add_parser("eval", help="metrics report over batch output",
                       epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    e.add_argument("--input", "-i", metavar="FILE", help="JSON lines written by 'batch'")
    e.add_argument("--output", "-o", metavar="FILE", help="report file (default: stdout)")
    e.add_argument("--annotation-sheet", metavar="FILE", help="also write a blank rating sheet here")
    e.add_argument("--sheet-seed", type=_seed, default=0, help="row shuffle seed for the rating sheet")
    e.add_argument("--ratings", metavar="FILE", help="summarise a filled rating sheet (%%GC, ARS)")

    s = sub.add_parser("serve", parents=[common], help="run the HTTP service",
                       epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    s.add_argument("--parser-url", help="parser endpoint for 'text' requests")
    return p


def _engine(args):
    return Engine.from_files(args.templates, args.pools)


def _resolve_seed(args, engine):
    if args.seed is not None:
        return args.seed
    env = os.environ.get("DONTKNOW_SEED")
    if env:
        try:
            return _seed(env)
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"DONTKNOW_SEED: {exc}") from None
    return engine.config.seed


def _parser_url(args):
    return getattr(args, "parser_url", None) or os.environ.get("DONTKNOW_PARSER_URL") or None


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _batch_record(sentence, resp):
    return {"sent_id": sentence.id, "question": sentence.text or " ".join(t.form for t in sentence.tokens),
            **resp.to_dict()}


def cmd_respond(args):
    engine = _engine(args)
    seed = _resolve_seed(args, engine)
    if args.text is not None:
        url = _parser_url(args)
        if not url:
            raise UsageError("--text needs a parser: pass --parser-url or set DONTKNOW_PARSER_URL")
        sentences = parse_text(url, args.text)[:1]
    else:
        sentences = read_conllu_file(args.conllu)
    for i, sentence in enumerate(sentences):
        resp = engine.respond(sentence, SplitMix64(derive_seed(seed, i)))
        if args.json:
            print(json.dumps(_batch_record(sentence, resp), ensure_ascii=False, sort_keys=True))
        else:
            print(resp.text)
    return EXIT_OK


def cmd_batch(args):
    engine = _engine(args)
    seed = _resolve_seed(args, engine)
    sentences = read_conllu_file(args.conllu)
    out, close = _open_out(args.output)
    try:
        for i, sentence in enumerate(sentences):
            resp = engine.respond(sentence, SplitMix64(derive_seed(seed, i)))
            out.write(json.dumps(_batch_record(sentence, resp), ensure_ascii=False, sort_keys=True) + "\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_build_dataset(args):
    engine = _engine(args)
    seed = _resolve_seed(args, engine)
    counts = Counter()
    records = load_paraphrase_corpus(args.pairs, counts)
    parses = ParseLookup.from_files(*args.parses)
    pairs = build_idkd(records, parses, engine, seed, symmetric=not args.single_direction, counts=counts)
    train, valid = split_idkd(pairs, float(args.train_fraction), seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = header_record(seed, engine, train_fraction=args.train_fraction,
                           symmetric=not args.single_direction)
    write_pairs(out / "idkd.jsonl", pairs, header)
    write_pairs(out / "train.jsonl", train, header)
    write_pairs(out / "valid.jsonl", valid, header)
    summary = {"records": len(records), "pairs": len(pairs), "train": len(train), "valid": len(valid),
               "skipped": dict(sorted(counts.items()))}
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def _read_batch(path):
    corpus = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                resp = FallbackResponse(text=obj["text"], template_id=obj.get("template_id"),
                                        used_default=bool(obj.get("used_default")),
                                        prefix=obj.get("prefix", ""), suffix=obj.get("suffix", ""),
                                        body=obj.get("body", ""))
                corpus.append((obj["question"], resp))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise IngestionError(f"{path}: line {lineno}: not a batch record ({exc})") from None
    return corpus


def cmd_eval(args):
    if not args.input and not args.ratings:
        raise UsageError("eval needs --input and/or --ratings")
    if args.input:
        corpus = _read_batch(args.input)
        text = format_report(report(corpus))
        out, close = _open_out(args.output)
        try:
            out.write(text)
        finally:
            if close:
                out.close()
        if args.annotation_sheet:
            export_annotation_sheet(corpus, args.annotation_sheet, args.sheet_seed)
    if args.ratings:
        print(json.dumps(import_annotation_sheet(args.ratings), sort_keys=True))
    return EXIT_OK


def cmd_serve(args):
    import uvicorn

    from .service import create_app

    engine = _engine(args)
    app = create_app(engine, seed=_resolve_seed(args, engine), parser_url=_parser_url(args))
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


COMMANDS = {
    "respond": cmd_respond,
    "batch": cmd_batch,
    "build-dataset": cmd_build_dataset,
    "eval": cmd_eval,
    "serve": cmd_serve,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        _report_error("usage", exc, EXIT_USAGE)
        return EXIT_USAGE
    except ParserUnavailable as exc:
        _report_error("parser_unavailable", exc, EXIT_PARSER)
        return EXIT_PARSER
    except ConlluError as exc:
        _report_error("bad_conllu", exc, EXIT_CONLLU)
        return EXIT_CONLLU
    except (TemplateError, ConfigError, IngestionError, MetricError, OSError) as exc:
        _report_error(type(exc).__name__, exc, EXIT_FAIL)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
