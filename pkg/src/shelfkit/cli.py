"""Command-line batch orchestration.

Subcommands: gen-corpus, extract, shelves, eval. A single JSON config
document describes the run; --seed and --jobs override individual keys.
Exit codes: 0 success, 1 usage or config error, 2 data error, 3 extraction
finished with per-item failures.
"""

from __future__ import annotations

import argparse
import functools
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Callable, Sequence

from .affinity import build_candidate_lists, load_interactions
from .catalog import Catalog, load_catalog, load_items
from .config import RunConfig, load_run_config
from .errors import ConfigError, DataError
from .evaluation import (
    baseline_page,
    compute_report,
    format_report_table,
    simulate_exposure,
)
from .extraction import (
    ExtractionBackendKind,
    default_prompt_spec,
    extract_remote,
    extract_rule_based,
    load_lexicon,
    load_prompt_spec,
    run_batch,
    write_descriptors_file,
    write_failures_file,
)
from .shelfgen import ShelfPage, generate_page, page_to_json_dict
from .synth import build_corpus, describe_corpus, write_corpus
from .templates import default_templates, load_templates

AUTH_TOKEN_ENV = "SHELFKIT_LLM_TOKEN"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_PARTIAL = 3


class _Parser(argparse.ArgumentParser):
    """argparse's default usage-error exit code is 2; this project reserves 2
    for data errors, so usage problems are rethrown as config errors."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigError(message)


def _require(path: Path | None, key: str) -> Path:
    if path is None:
        raise ConfigError(f"config is missing required path {key!r} for this command")
    if not path.is_file():
        raise ConfigError(f"{key} file not found: {path}")
    return path


def _load_catalog(cfg: RunConfig) -> Catalog:
    return load_catalog(
        _require(cfg.paths.items, "paths.items"),
        _require(cfg.paths.descriptors, "paths.descriptors"),
    )


def _shelf_config(cfg: RunConfig):
    if cfg.paths.templates is not None:
        templates = load_templates(_require(cfg.paths.templates, "paths.templates"))
    else:
        templates = default_templates()
    return replace(cfg.shelf, enabled_templates=tuple(templates))


def _generate_pages(cfg: RunConfig, catalog: Catalog) -> list[ShelfPage]:
    interactions = load_interactions(_require(cfg.paths.interactions, "paths.interactions"))
    lists = build_candidate_lists(interactions, catalog, cfg.k, cfg.shelf.embedding_dim)
    shelf_cfg = _shelf_config(cfg)

    def make(cl):
        return generate_page(cl.user, cl, catalog, shelf_cfg)

    if cfg.jobs > 1 and len(lists) > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(make, lists))
    return [make(cl) for cl in lists]


def _baseline_pages(cfg: RunConfig, catalog: Catalog) -> list[ShelfPage]:
    interactions = load_interactions(_require(cfg.paths.interactions, "paths.interactions"))
    lists = build_candidate_lists(interactions, catalog, cfg.k, cfg.shelf.embedding_dim)
    return [baseline_page(cl, cfg.budget) for cl in lists]


def cmd_gen_corpus(cfg: RunConfig) -> int:
    for key, path in (
        ("paths.items", cfg.paths.items),
        ("paths.descriptors", cfg.paths.descriptors),
        ("paths.interactions", cfg.paths.interactions),
    ):
        if path is None:
            raise ConfigError(f"config is missing required path {key!r} for gen-corpus")
    corpus = build_corpus(cfg.corpus)
    write_corpus(corpus, cfg.paths.items, cfg.paths.descriptors, cfg.paths.interactions)
    summary = describe_corpus(corpus)
    print(
        f"wrote corpus: {summary['items']} items, {summary['descriptor_rows']} descriptor rows, "
        f"{summary['interactions']} interactions ({summary['users']} users)"
    )
    return EXIT_OK


def _build_extract_fn(cfg: RunConfig) -> Callable:
    settings = cfg.extraction
    if settings.backend is ExtractionBackendKind.RuleBased:
        lexicon = load_lexicon(
            _require(cfg.paths.lexicon, "paths.lexicon"),
            genre_code_map=settings.genre_code_map,
        )
        return functools.partial(extract_rule_based, lexicon=lexicon)
    if not settings.endpoint:
        raise ConfigError("extraction.endpoint is required for the remote_llm backend")
    if settings.prompt_spec is not None:
        spec = load_prompt_spec(_require(settings.prompt_spec, "extraction.prompt_spec"))
    else:
        spec = default_prompt_spec()
    return functools.partial(
        extract_remote,
        spec=spec,
        endpoint=settings.endpoint,
        allowed_genres=settings.allowed_genres,
        timeout_s=settings.timeout_s,
        retries=settings.retries,
        auth_token=os.environ.get(AUTH_TOKEN_ENV),
    )


def cmd_extract(cfg: RunConfig) -> int:
    items_by_id = load_items(_require(cfg.paths.items, "paths.items"))
    extract_fn = _build_extract_fn(cfg)
    if cfg.extraction.backend is ExtractionBackendKind.RemoteLlm:
        workers = cfg.extraction.max_in_flight
    else:
        workers = cfg.jobs
    items = [items_by_id[item_id] for item_id in sorted(items_by_id)]
    results, failures = run_batch(items, extract_fn, max_in_flight=workers)

    out_dir = cfg.paths.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    descriptors_path = out_dir / "descriptors.ndjson"
    failures_path = out_dir / "extract_failures.ndjson"
    write_descriptors_file(descriptors_path, results)
    write_failures_file(failures_path, failures)
    print(f"wrote {descriptors_path} ({len(results)} items ok, {len(failures)} failed)")
    if failures:
        print(f"failures listed in {failures_path}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_shelves(cfg: RunConfig) -> int:
    catalog = _load_catalog(cfg)
    pages = _generate_pages(cfg, catalog)
    out_dir = cfg.paths.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    pages_path = out_dir / "pages.ndjson"
    with open(pages_path, "w", encoding="utf-8") as fh:
        for page in pages:
            fh.write(json.dumps(page_to_json_dict(page), ensure_ascii=False) + "\n")
    print(f"wrote {pages_path} ({len(pages)} pages)")
    return EXIT_OK


def cmd_eval(cfg: RunConfig) -> int:
    catalog = _load_catalog(cfg)
    if cfg.eval_treatment == "generic":
        treatment_pages = _baseline_pages(cfg, catalog)
    else:
        treatment_pages = _generate_pages(cfg, catalog)
    baseline_pages = _baseline_pages(cfg, catalog)
    treatment_log = simulate_exposure(treatment_pages, cfg.budget)
    baseline_log = simulate_exposure(baseline_pages, cfg.budget)
    report = compute_report(treatment_log, baseline_log, catalog, cfg.shelf.embedding_dim)

    out_dir = cfg.paths.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "report.json"
    table_path = out_dir / "report.txt"
    report_path.write_text(
        json.dumps(report.to_json_dict(), indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    table = format_report_table(report)
    table_path.write_text(table, encoding="utf-8")
    print(table, end="")
    print(f"wrote {report_path} and {table_path}")
    return EXIT_OK


_COMMANDS = {
    "gen-corpus": cmd_gen_corpus,
    "extract": cmd_extract,
    "shelves": cmd_shelves,
    "eval": cmd_eval,
}


_COMMAND_HELP = {
    "gen-corpus": "generate a seeded synthetic corpus",
    "extract": "extract descriptors for every catalog item",
    "shelves": "generate one shelf page per user",
    "eval": "compare descriptive pages against the generic shelf",
}


def build_parser() -> argparse.ArgumentParser:
    # Global flags accepted before or after the subcommand. SUPPRESS keeps the
    # subparser copy from clobbering a value parsed by the main parser.
    shared = _Parser(add_help=False)
    shared.add_argument("--config", metavar="PATH", default=argparse.SUPPRESS,
                        help="run config JSON document")
    shared.add_argument("--seed", type=int, metavar="U64", default=argparse.SUPPRESS,
                        help="override the config seed")
    shared.add_argument("--jobs", type=int, metavar="N", default=argparse.SUPPRESS,
                        help="override worker parallelism")

    parser = _Parser(prog="shelfkit", parents=[shared], description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    for name in _COMMANDS:
        sub.add_parser(name, parents=[shared], help=_COMMAND_HELP[name])
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise ConfigError("a command is required (gen-corpus, extract, shelves, eval)")
        config_path = getattr(args, "config", None)
        if not config_path:
            raise ConfigError("--config is required")
        cfg = load_run_config(
            config_path,
            seed=getattr(args, "seed", None),
            jobs=getattr(args, "jobs", None),
        )
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"shelfkit: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"shelfkit: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
