"""Command-line entry point: ``tonguetwist <command> [options]``.

Exit status: 0 on success, 1 on usage errors, 2 on data or provider errors.
Options may also come from a flat ``key = value`` file given with
``--config``; explicit flags win over the file, which wins over built-in
defaults. ``TONGUETWIST_ENDPOINT`` overrides the provider endpoint unless
``--provider`` is given on the command line.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import logging
import os
import sys
from functools import cached_property
from importlib import resources

from . import lm, metrics, pacd, pipeline, vocab
from .errors import TwisterError
from .lexicon import default_lexicon, load_lexicon, transcribe_text
from .phonology import default_table, load_feature_table

log = logging.getLogger("tonguetwist")

ENV_ENDPOINT = "TONGUETWIST_ENDPOINT"
DEFAULT_SEED = 13
DEFAULT_PROVIDER = "ngram:bundled"
ASSET_KEYS = ("lexicon", "table", "embeddings", "stopwords", "profanity", "familiar")
_INTERNAL = {"command", "func", "config", "print_config"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


class Assets:
    """Lazily loaded resources, bundled unless a path was given."""

    def __init__(self, args):
        self.args = args

    def _path(self, key):
        return getattr(self.args, key, None)

    @cached_property
    def lexicon(self):
        p = self._path("lexicon")
        if p is None:
            return default_lexicon()
        with open(p, encoding="latin-1") as fh:
            return load_lexicon(fh, {ph.arpabet for ph in self.table})

    @cached_property
    def table(self):
        p = self._path("table")
        return default_table() if p is None else load_feature_table(p)

    @cached_property
    def embeddings(self):
        p = self._path("embeddings")
        if p is None:
            return vocab.default_embeddings()
        with open(p, encoding="utf-8") as fh:
            return vocab.load_embeddings(fh)

    @cached_property
    def function_words(self):
        p = self._path("stopwords")
        return pacd.default_function_words() if p is None else metrics.load_word_list(p)

    @cached_property
    def bank(self):
        p = self._path("profanity")
        return pipeline.default_bank() if p is None else pipeline.load_bank(p)

    @cached_property
    def familiar(self):
        p = self._path("familiar")
        return metrics.default_familiar_words() if p is None else metrics.load_word_list(p)


# ---------------------------------------------------------------------------
# helpers

def _read_lines(args) -> list[str]:
    texts = list(getattr(args, "text", None) or [])
    src = getattr(args, "input", None)
    if src:
        fh = sys.stdin if src == "-" else open(src, encoding="utf-8")
        with fh if src != "-" else _nullcontext(fh):
            texts.extend(l.rstrip("\n") for l in fh if l.strip())
    if not texts:
        raise _Usage("no input text: pass --text or --input")
    return texts


class _nullcontext:
    def __init__(self, obj):
        self.obj = obj

    def __enter__(self):
        return self.obj

    def __exit__(self, *exc):
        return False


class _Usage(Exception):
    pass


def _open_out(path):
    if path in (None, "-"):
        return _nullcontext(sys.stdout)
    return open(path, "w", encoding="utf-8", newline="")


def _round(v, digits):
    return None if v is None else round(v, digits)


def _bundled_lines(name):
    text = resources.files("tonguetwist.data").joinpath(name).read_text("utf-8")
    return [l for l in text.splitlines() if l.strip() and not l.startswith("#")]


def _reference_texts(args):
    if getattr(args, "reference", None):
        with open(args.reference, encoding="utf-8") as fh:
            return [l.strip() for l in fh if l.strip()]
    return _bundled_lines("classic_twisters.txt")


# ---------------------------------------------------------------------------
# commands

def cmd_transcribe(args, assets):
    with _open_out(args.output) as out:
        for text in _read_lines(args):
            tr = transcribe_text(text, assets.lexicon)
            if args.format == "arpabet":
                out.write(tr.arpabet() + "\n")
            elif args.format == "ipa":
                out.write(tr.ipa(assets.table) + "\n")
            else:
                out.write(f"{text}\t{tr.arpabet()}\t{tr.ipa(assets.table)}\n")


def cmd_metrics(args, assets):
    texts = _read_lines(args)
    reports = [metrics.score_text(t, str(i), assets.lexicon, assets.table, assets.familiar)
               for i, t in enumerate(texts, 1)]
    rows = [{k: (_round(v, args.precision) if isinstance(v, float) else v)
             for k, v in r.as_row().items()} for r in reports]
    with _open_out(args.output) as out:
        if args.format == "jsonl":
            for row in rows:
                out.write(json.dumps(row) + "\n")
        else:
            w = csv.DictWriter(out, fieldnames=metrics.REPORT_FIELDS, lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
    if args.figure:
        from .plotting import plot_reports
        plot_reports(reports, args.figure, title=args.title)
        log.info("wrote figure %s", args.figure)


def _phoneme_label(p, arpabet):
    return p.arpabet if arpabet else p.ipa


def cmd_pair(args, assets):
    t = assets.table
    wip = t.word_initial_set()
    if args.ph:
        ph1 = t.lookup(args.ph)
        ph2 = vocab.secondary_phoneme(ph1, wip, t)
    elif args.topic:
        ph1, ph2 = vocab.select_phoneme_pair(args.topic, wip, args.seed, t)
    else:
        raise _Usage("pass --ph or --topic")
    print(_phoneme_label(ph1, args.arpabet), _phoneme_label(ph2, args.arpabet))


def cmd_vocab(args, assets):
    t = assets.table
    pair = None
    if args.ph1 or args.ph2:
        if not (args.ph1 and args.ph2):
            raise _Usage("--ph1 and --ph2 go together")
        pair = (args.ph1, args.ph2)
    cl = vocab.build_candidate_list(args.topic, t.word_initial_set(), assets.lexicon,
                                    assets.embeddings, args.n, args.seed, t, pair)
    log.info("phonemes %s %s", cl.ph1, cl.ph2)
    with _open_out(args.output) as out:
        for w in cl.words:
            out.write(f"{w.token}\t{t.lookup(w.initial).ipa}\t{w.score:.4f}\n")


def _provider(args):
    return lm.open_provider(args.provider)


def cmd_decode(args, assets):
    cfg = pacd.DecoderConfig.default(
        assets.lexicon, assets.table, function_words=assets.function_words,
        max_length=args.max_length, function_window=args.window,
        min_word_length=args.min_length, max_repetition=args.max_repetition,
        scan_limit=args.scan_limit, rng_seed=args.seed)
    provider = _provider(args)
    results = [pacd.decode(topic, provider, cfg, assets.lexicon, assets.table) for topic in args.topic]
    with _open_out(args.output) as out:
        for r in results:
            if args.format == "json":
                out.write(json.dumps(r.to_dict(), ensure_ascii=False) + "\n")
            elif r.status != pacd.PROVIDER_ERROR:
                out.write(r.text + "\n")
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            for r in results:
                fh.write(r.trace_lines())
    status = 0
    for r in results:
        log.info("%s: /%s/ /%s/ %s, %d words", r.topic, r.ph1.ipa, r.ph2.ipa, r.status, len(r.generated))
        if r.status == pacd.PROVIDER_ERROR:
            print(f"error: provider failed for {r.topic!r}: {r.error}", file=sys.stderr)
            status = 2
    return status


def cmd_ngram_train(args, assets):
    if args.corpus:
        with open(args.corpus, encoding="utf-8") as fh:
            lines = [l for l in fh if l.strip()]
    else:
        lines = _bundled_lines("corpus.txt")
    model = lm.train_ngram(lines, args.order, args.k)
    model.save(args.output)
    log.info("trained order-%d model over %d types", model.order, len(model.vocab))


def cmd_score(args, assets):
    provider = _provider(args)
    with _open_out(args.output) as out:
        for text in _read_lines(args):
            out.write(f"{pipeline.text_perplexity(provider, text):.{args.precision}f}\t{text}\n")


def _load_records(path):
    with open(path, encoding="utf-8") as fh:
        return pipeline.loads_records(fh.read())


def cmd_filter(args, assets):
    records = _load_records(args.input)
    if args.stage in ("ppl", "phonemic"):
        scorer = _provider(args)
        stats = pipeline.reference_stats(_reference_texts(args), scorer, assets.table,
                                         assets.lexicon, args.metric)
        if args.stage == "ppl":
            res = pipeline.ppl_filter(records, scorer, stats)
        else:
            res = pipeline.phonemic_filter(records, assets.table, stats, args.metric, assets.lexicon)
    elif args.stage == "dedup":
        res = pipeline.dedup(records, args.threshold)
    elif args.stage == "profanity":
        res = pipeline.profanity_filter(records, assets.bank)
    else:
        res = pipeline.dedup_topics(records)
    with _open_out(args.output) as out:
        out.write(pipeline.dumps_records(res.kept))
    if args.removed:
        with open(args.removed, "w", encoding="utf-8") as fh:
            for rm in res.removed:
                fh.write(json.dumps(pipeline._reason(rm)) + "\n")
    log.info("%s: kept %d, removed %d", args.stage, len(res.kept), len(res.removed))


def cmd_pipeline(args, assets):
    stages = tuple(s.strip() for s in args.stages.split(",") if s.strip())
    cfg = pipeline.PipelineConfig(n_topics=args.n_topics, seed=args.seed, n_candidates=args.n,
                                  stages=stages, dedup_threshold=args.threshold,
                                  phonemic_metric=args.metric, paraphrase=args.paraphrase)
    if args.generator == "stub":
        generator = pipeline.StubGenerator(_bundled_lines("classic_twisters.txt"))
    else:
        generator = lm.open_provider(args.generator)
    records = _load_records(args.input) if args.input else None
    try:
        kept, report = pipeline.run_pipeline(
            cfg, generator, _provider(args), records=records, lex=assets.lexicon,
            table=assets.table, emb=assets.embeddings, bank=assets.bank,
            reference_texts=_reference_texts(args))
    except Exception as exc:
        rep = getattr(exc, "report", None)
        if rep is not None and args.report:
            _write_report(args.report, rep)
        raise
    with _open_out(args.output) as out:
        out.write(pipeline.dumps_records(kept))
    if args.report:
        _write_report(args.report, report)
    for s in report.stages:
        log.info("%-12s in %4d  kept %4d  removed %4d", s.stage, s.input, s.kept, s.removed)


def _write_report(path, report):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")


def cmd_serve(args, assets):
    from .lm.server import make_server, serve_in_thread
    provider = _provider(args)
    if args.check:
        server, url = serve_in_thread(provider, args.host, 0)
        try:
            with lm.RemoteProvider(url) as client:
                cands = client.next_token_distribution(["the"], 5)
        finally:
            server.shutdown()
            server.server_close()
        print(f"ok {len(cands)} candidates from {url}")
        return 0
    server = make_server(provider, args.host, args.port)
    h, p = server.server_address[:2]
    print(f"serving on http://{h}:{p}", file=sys.stderr, flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("common")
    g.add_argument("--config", help="flat key = value file of option defaults")
    g.add_argument("--print-config", action="store_true", help="print the effective options and exit")
    g.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"random seed (default {DEFAULT_SEED})")
    g.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    for key, what in (("lexicon", "CMUDict-format pronunciation file"),
                      ("table", "phoneme feature table"),
                      ("embeddings", "word vectors, one 'token v1 .. vd' per line"),
                      ("stopwords", "function-word list"),
                      ("profanity", "offensive-word bank"),
                      ("familiar", "familiar-word list for Dale-Chall")):
        g.add_argument(f"--{key}", metavar="PATH", help=f"{what} (default: bundled)")

    def text_inputs(p):
        p.add_argument("--text", action="append", help="input text (repeatable)")
        p.add_argument("--input", metavar="PATH", help="file with one text per line ('-' for stdin)")

    def provider_opt(p, help="next-token provider: ngram:bundled, ngram:PATH or remote:URL"):
        p.add_argument("--provider", default=DEFAULT_PROVIDER, help=help)

    def output_opt(p):
        p.add_argument("-o", "--output", metavar="PATH", help="write primary output here instead of stdout")

    parser = _Parser(prog="tonguetwist", description="Tongue-twister generation and evaluation toolkit.")
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, parents=[common], help=help, description=help)
        p.set_defaults(func=func)
        return p

    p = add("transcribe", cmd_transcribe, "G2P transcription of texts")
    text_inputs(p)
    p.add_argument("words", nargs="*", help="text to transcribe")
    p.add_argument("--format", choices=("arpabet", "ipa", "tsv"), default="arpabet")
    output_opt(p)

    p = add("metrics", cmd_metrics, "phonemic overlap, phonemic distance and readability per text")
    text_inputs(p)
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--precision", type=int, default=4, help="decimal places (default 4)")
    p.add_argument("--figure", metavar="PATH", help="also render a bar chart image")
    p.add_argument("--title", help="figure title")
    output_opt(p)

    p = add("pair", cmd_pair, "nearest word-initial partner phoneme")
    p.add_argument("--ph", help="primary phoneme (IPA or ARPABET)")
    p.add_argument("--topic", help="draw the primary phoneme with --seed instead")
    p.add_argument("--arpabet", action="store_true", help="print ARPABET instead of IPA")

    p = add("vocab", cmd_vocab, "topic-ranked candidate words for a phoneme pair")
    p.add_argument("--topic", required=True)
    p.add_argument("--n", type=int, default=vocab.DEFAULT_N, help="words per phoneme")
    p.add_argument("--ph1")
    p.add_argument("--ph2")
    output_opt(p)

    p = add("decode", cmd_decode, "phoneme-aware constrained decoding")
    p.add_argument("--topic", action="append", required=True, help="topic phrase (repeatable)")
    provider_opt(p)
    p.add_argument("--max-length", type=int, default=30)
    p.add_argument("--window", type=int, default=1, help="rank window for function words")
    p.add_argument("--min-length", type=int, default=3)
    p.add_argument("--max-repetition", type=int, default=1)
    p.add_argument("--scan-limit", type=int, default=2500)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--trace", metavar="PATH", help="write per-step decisions as JSON lines")
    output_opt(p)

    p = add("ngram-train", cmd_ngram_train, "train an add-k n-gram model")
    p.add_argument("--corpus", metavar="PATH", help="one sentence per line (default: bundled corpus)")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--k", type=float, default=0.1)
    p.add_argument("-o", "--output", metavar="PATH", required=True)

    p = add("score", cmd_score, "perplexity of texts under a provider")
    text_inputs(p)
    provider_opt(p)
    p.add_argument("--precision", type=int, default=4)
    output_opt(p)

    p = add("filter", cmd_filter, "apply one refinement filter to JSONL records")
    p.add_argument("--input", required=True, metavar="PATH")
    p.add_argument("--stage", required=True, choices=pipeline.DEFAULT_STAGES[1:])
    provider_opt(p, "scorer for the ppl stage")
    p.add_argument("--reference", metavar="PATH", help="reference twisters, one per line (default: bundled)")
    p.add_argument("--metric", choices=("iped", "oped"), default="iped")
    p.add_argument("--threshold", type=float, default=pipeline.DEFAULT_DEDUP_THRESHOLD)
    p.add_argument("--removed", metavar="PATH", help="write removal reasons as JSON lines")
    output_opt(p)

    p = add("pipeline", cmd_pipeline, "generate, refine, filter and enrich a twister dataset")
    p.add_argument("--input", metavar="PATH", help="start from these records instead of generating")
    p.add_argument("--n-topics", type=int, default=10)
    p.add_argument("--n", type=int, default=vocab.DEFAULT_N, help="words per phoneme bank")
    p.add_argument("--generator", default="stub", help="'stub' (offline) or a provider spec")
    provider_opt(p, "scorer used by the perplexity stage")
    p.add_argument("--stages", default=",".join(pipeline.DEFAULT_STAGES))
    p.add_argument("--reference", metavar="PATH")
    p.add_argument("--metric", choices=("iped", "oped"), default="iped")
    p.add_argument("--threshold", type=float, default=pipeline.DEFAULT_DEDUP_THRESHOLD)
    p.add_argument("--paraphrase", action="store_true")
    p.add_argument("--report", metavar="PATH", help="write the stage report as JSON")
    output_opt(p)

    p = add("serve", cmd_serve, "expose a provider over HTTP")
    provider_opt(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--check", action="store_true", help="start, answer one request, stop")

    parser._subparser_map = sub.choices
    return parser


# ---------------------------------------------------------------------------
# config handling

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def read_config(path) -> dict[str, str]:
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#", ";"))
    with open(path, encoding="utf-8") as fh:
        cp.read_string("[run]\n" + fh.read(), source=str(path))
    return dict(cp["run"])


def _config_defaults(sub: argparse.ArgumentParser, raw: dict[str, str]) -> dict:
    actions = {a.dest: a for a in sub._actions if a.dest not in _INTERNAL | {"help"}}
    out = {}
    for key, value in raw.items():
        dest = key.strip().replace("-", "_")
        a = actions.get(dest)
        if a is None:
            raise _Usage(f"config: unknown option {key!r} for {sub.prog}")
        if a.nargs == 0:
            v = value.strip().lower()
            if v not in _TRUE | _FALSE:
                raise _Usage(f"config: {key} expects a boolean, got {value!r}")
            val = v in _TRUE
        else:
            try:
                val = a.type(value) if a.type else value
            except ValueError:
                raise _Usage(f"config: bad value for {key}: {value!r}") from None
            if a.choices and val not in a.choices:
                raise _Usage(f"config: {key} must be one of {list(a.choices)}")
            if isinstance(a, argparse._AppendAction):
                val = [val]
        out[dest] = val
    return out


def _flag_given(argv, flag):
    return any(a == flag or a.startswith(flag + "=") for a in argv)


def effective_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = parser._subparser_map[args.command]
    if args.config:
        if not os.path.exists(args.config):
            raise FileNotFoundError(f"config file not found: {args.config}")
        try:
            sub.set_defaults(**_config_defaults(sub, read_config(args.config)))
        except _Usage as exc:
            sub.error(str(exc))
        args = parser.parse_args(argv)
    endpoint = os.environ.get(ENV_ENDPOINT)
    if endpoint and hasattr(args, "provider") and not _flag_given(argv, "--provider"):
        args.provider = endpoint
    return parser, args


def format_config(args) -> str:
    lines = []
    for k, v in sorted(vars(args).items()):
        if k in _INTERNAL:
            continue
        if isinstance(v, list):
            v = ",".join(map(str, v))
        lines.append(f"{k} = {'' if v is None else v}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        parser, args = effective_args(argv)
    except SystemExit as exc:  # --help or a usage error from argparse
        return exc.code if isinstance(exc.code, int) else 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    if args.print_config:
        sys.stdout.write(format_config(args))
        return 0
    for key in ASSET_KEYS:
        path = getattr(args, key, None)
        if path is not None and not os.path.isfile(path):
            print(f"error: {key} file not found: {path}", file=sys.stderr)
            return 2
    if getattr(args, "words", None):
        args.text = (args.text or []) + [" ".join(args.words)]
    try:
        status = args.func(args, Assets(args))
    except _Usage as exc:
        parser._subparser_map[args.command].print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (TwisterError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return status or 0


if __name__ == "__main__":
    sys.exit(main())
