"""Command-line entry points for the offline workflows.

Exit codes: 0 success, 1 usage error, 2 data/validation error,
3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import socket
import sys
from pathlib import Path

from .corpus import load_redaction_rules, load_tickets, query_text, redact_ticket, save_tickets
from .errors import ConfigError, DataError, TicketrecError
from .evaluation import (
    build_report,
    evaluate_technique,
    load_positions_dir,
    make_eval_subgroups,
    render_report_text,
)
from .techniques import (
    Bm25Params,
    Bm25Technique,
    EmbeddingCache,
    EmbeddingProviderSpec,
    ExpertSystemTechnique,
    ExternalEmbeddingTechnique,
    LdaConfig,
    LdaTechnique,
    RandomTechnique,
    RemoteEmbeddingClient,
    TfidfTechnique,
    WordVectorTechnique,
    bundled_lexicon,
    load_artifact,
    load_lexicon,
    save_artifact,
    write_vector_file,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3

log = logging.getLogger("ticketrec")


class CliUsageError(TicketrecError):
    """A flag combination the parser alone cannot catch (exit code 1)."""

TECHNIQUE_CHOICES = (
    "expert",
    "tfidf",
    "bm25",
    "lda",
    "wordvec-avg",
    "external-embed",
    "random",
)


class CliParser(argparse.ArgumentParser):
    """argparse parser whose usage failures exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _global_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument(
        "--seed",
        type=int,
        default=argparse.SUPPRESS,
        help="random seed (default 13)",
    )
    parent.add_argument(
        "--verbose",
        action="store_true",
        default=argparse.SUPPRESS,
        help="enable debug logging",
    )
    parent.add_argument(
        "--config",
        default=argparse.SUPPRESS,
        help="path to a JSON config file (used by serve)",
    )
    return parent


def build_parser() -> CliParser:
    shared = _global_flags()
    parser = CliParser(prog="ticketrec", parents=[shared])
    parser.set_defaults(seed=13, verbose=False, config=None, handler=None)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=CliParser)

    p_ingest = sub.add_parser(
        "ingest",
        parents=[shared],
        help="validate (and optionally redact) a raw ticket file",
    )
    p_ingest.add_argument("--input", required=True, help="raw ticket JSONL file")
    p_ingest.add_argument("--output", required=True, help="validated JSONL output path")
    p_ingest.add_argument(
        "--redact-rules", help="JSON rules file; applied to all text fields"
    )
    p_ingest.set_defaults(handler=cmd_ingest)

    p_fit = sub.add_parser(
        "fit", parents=[shared], help="fit a technique and write its model artifact"
    )
    p_fit.add_argument("--technique", required=True, choices=TECHNIQUE_CHOICES)
    p_fit.add_argument("--train", help="training corpus JSONL (required for corpus-fitted techniques)")
    p_fit.add_argument("--model-out", required=True, help="artifact output path")
    p_fit.add_argument("--name", help="instance name stored in the artifact")
    p_fit.add_argument("--vocab-size", type=int, default=500, help="tfidf vocabulary cap")
    p_fit.add_argument("--k1", type=float, default=1.5, help="bm25 k1")
    p_fit.add_argument("--b", type=float, default=0.75, help="bm25 b")
    p_fit.add_argument("--epsilon", type=float, default=0.25, help="bm25 idf floor fraction")
    p_fit.add_argument("--topics", type=int, default=300, help="lda topic count")
    p_fit.add_argument("--alpha", type=float, help="lda document-topic smoothing (default 50/topics)")
    p_fit.add_argument("--beta", type=float, default=0.01, help="lda topic-word smoothing")
    p_fit.add_argument("--iterations", type=int, default=200, help="lda training iterations")
    p_fit.add_argument(
        "--fold-in-iterations", type=int, default=50, help="lda fold-in iterations"
    )
    p_fit.add_argument("--lexicon", help="expert lexicon JSON (default: bundled sample)")
    p_fit.add_argument("--vectors", help="word-vector text file for wordvec-avg")
    p_fit.add_argument("--provider-name", help="external provider name")
    p_fit.add_argument("--provider-dim", type=int, help="external provider dimension")
    p_fit.add_argument("--provider-endpoint", help="external provider HTTP endpoint")
    p_fit.add_argument(
        "--vector-file", help="precomputed ticket-embedding JSONL for external-embed"
    )
    p_fit.add_argument("--cache-dir", help="persistent embedding cache directory")
    p_fit.set_defaults(handler=cmd_fit)

    p_compare = sub.add_parser(
        "compare",
        parents=[shared],
        help="benchmark techniques over the labeled subgroups",
    )
    p_compare.add_argument(
        "--positions-dir", required=True, help="directory of per-subgroup positions CSVs"
    )
    p_compare.add_argument("--eval-corpus", required=True, help="labeled tickets JSONL")
    p_compare.add_argument(
        "--techniques",
        required=True,
        nargs="+",
        metavar="ARTIFACT",
        help="model artifact path(s) to compare",
    )
    p_compare.add_argument(
        "--report-out",
        required=True,
        help="report base path; writes <base>.json and <base>.txt",
    )
    p_compare.add_argument("--k", type=int, default=5, help="recommendations per query")
    p_compare.add_argument(
        "--with-paper-refs",
        action="store_true",
        help="attach published reference values to matching rows",
    )
    p_compare.set_defaults(handler=cmd_compare)

    p_embed = sub.add_parser(
        "embed-cache",
        parents=[shared],
        help="precompute external embeddings for a corpus into a vector file",
    )
    p_embed.add_argument("--input", required=True, help="ticket corpus JSONL")
    p_embed.add_argument("--output", required=True, help="embedding JSONL output path")
    p_embed.add_argument("--provider-name", required=True)
    p_embed.add_argument("--provider-dim", type=int, required=True)
    p_embed.add_argument("--provider-endpoint", required=True)
    p_embed.add_argument("--cache-dir", help="persistent embedding cache directory")
    p_embed.add_argument("--timeout", type=float, default=10.0, help="request timeout (s)")
    p_embed.add_argument("--retries", type=int, default=2, help="retries per request")
    p_embed.set_defaults(handler=cmd_embed_cache)

    p_serve = sub.add_parser(
        "serve", parents=[shared], help="run the recommendation service"
    )
    p_serve.set_defaults(handler=cmd_serve)

    return parser


def cmd_ingest(args) -> int:
    corpus = load_tickets(args.input)
    rules = load_redaction_rules(args.redact_rules) if args.redact_rules else []
    if rules:
        from .corpus import Corpus

        corpus = Corpus([redact_ticket(t, rules) for t in corpus])
    save_tickets(corpus, args.output)
    print(f"ingested {len(corpus)} ticket(s) -> {args.output}")
    return EXIT_OK


def _build_technique(args):
    family = args.technique
    if family == "expert":
        lexicon = load_lexicon(args.lexicon) if args.lexicon else bundled_lexicon()
        return ExpertSystemTechnique(lexicon, name=args.name), False
    if family == "tfidf":
        return TfidfTechnique(vocab_size=args.vocab_size, name=args.name), True
    if family == "bm25":
        return (
            Bm25Technique(Bm25Params(args.k1, args.b, args.epsilon), name=args.name),
            True,
        )
    if family == "lda":
        config = LdaConfig(
            num_topics=args.topics,
            alpha=args.alpha,
            beta=args.beta,
            train_iterations=args.iterations,
            fold_in_iterations=args.fold_in_iterations,
            seed=args.seed,
        )
        return LdaTechnique(config, name=args.name), True
    if family == "wordvec-avg":
        if not args.vectors:
            raise CliUsageError("wordvec-avg requires --vectors")
        return WordVectorTechnique(vector_path=args.vectors, name=args.name), False
    if family == "external-embed":
        if not args.provider_name or not args.provider_dim:
            raise CliUsageError("external-embed requires --provider-name and --provider-dim")
        spec = EmbeddingProviderSpec(
            name=args.provider_name,
            dim=args.provider_dim,
            endpoint=args.provider_endpoint,
            vector_file=args.vector_file,
        )
        return (
            ExternalEmbeddingTechnique(spec, cache_dir=args.cache_dir, name=args.name),
            False,
        )
    if family == "random":
        return RandomTechnique(seed=args.seed, name=args.name), False
    raise ConfigError(f"unknown technique {family!r}")


def cmd_fit(args) -> int:
    technique, needs_corpus = _build_technique(args)
    if needs_corpus:
        if not args.train:
            raise CliUsageError(f"technique {args.technique!r} requires --train")
        technique.fit(load_tickets(args.train))
    elif args.train:
        technique.fit(load_tickets(args.train))
    save_artifact(technique, args.model_out)
    print(f"fitted {technique.name!r} -> {args.model_out}")
    return EXIT_OK


def cmd_compare(args) -> int:
    positions = load_positions_dir(args.positions_dir)
    corpus = load_tickets(args.eval_corpus)
    subgroups = make_eval_subgroups(corpus, positions)

    # Refuse to mix artifacts whose shared normalization steps disagree;
    # silent drift there would invalidate the whole comparison. Stopword
    # removal is a per-technique choice and raw-text techniques opt out
    # of preprocessing entirely, so only the base fields are compared.
    base_seen: dict = {}
    names = []
    for path in args.techniques:
        technique = load_artifact(path)
        names.append(technique.name)
        cfg = technique.preprocessing_config()
        if cfg is not None:
            fields = cfg.fingerprint_fields()
            base = {k: fields[k] for k in ("lowercase", "strip_chars", "unicode_fold")}
            base_seen[path] = json.dumps(base, sort_keys=True)
    if len(set(base_seen.values())) > 1:
        raise DataError(
            "artifacts were fitted with different preprocessing configs: "
            + ", ".join(sorted(base_seen))
        )

    rows, error_rows = [], []
    for path, name in zip(args.techniques, names):
        try:
            rows.append(
                evaluate_technique(lambda p=path: load_artifact(p), subgroups, k=args.k)
            )
        except TicketrecError as exc:
            log.error("technique %s failed: %s", name, exc)
            error_rows.append({"technique": name, "error": str(exc)})
    report = build_report(rows, include_reference=args.with_paper_refs, error_rows=error_rows)
    text = render_report_text(report)
    base = Path(args.report_out)
    base.parent.mkdir(parents=True, exist_ok=True)
    base.with_suffix(".json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    base.with_suffix(".txt").write_text(text, encoding="utf-8")
    print(text, end="")
    return EXIT_RUNTIME if error_rows else EXIT_OK


def cmd_embed_cache(args) -> int:
    corpus = load_tickets(args.input)
    spec = EmbeddingProviderSpec(
        name=args.provider_name,
        dim=args.provider_dim,
        endpoint=args.provider_endpoint,
        timeout_s=args.timeout,
        retries=args.retries,
    )
    cache = EmbeddingCache(args.cache_dir) if args.cache_dir else None
    client = RemoteEmbeddingClient(spec, cache)
    vectors = {t.external_id: client.embed(query_text(t)) for t in corpus}
    write_vector_file(args.output, spec, vectors)
    print(f"embedded {len(vectors)} ticket(s) -> {args.output}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import RecommenderService, create_app, load_service_config

    config = load_service_config(args.config)
    # Probe the listen address first so a taken port is a clean runtime
    # failure instead of a traceback from deep inside the server.
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((config.host, config.port))
    except OSError as exc:
        print(f"cannot bind {config.host}:{config.port}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    finally:
        probe.close()

    service, summary = RecommenderService.start(config)
    if summary is not None:
        print(f"bootstrap: indexed {summary.indexed}, failed {summary.failed}")
    app = create_app(service)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    finally:
        service.close()
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.handler is None:
        parser.print_help()
        return EXIT_USAGE
    try:
        return args.handler(args)
    except CliUsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return EXIT_DATA
    except (DataError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except TicketrecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
