"""Run configuration: one JSON document fully describes a batch run.

Paths inside the document are resolved relative to the document's directory,
so a config checked into an experiment folder stays portable. The --seed and
--jobs command line flags override the corresponding keys.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .errors import ConfigError
from .evaluation import SlotBudget
from .extraction import ExtractionBackendKind
from .shelfgen import ShelfConfig
from .synth import CorpusSpec
from .templates import DecorationConfig

_EVAL_TREATMENTS = ("descriptive", "generic")


@dataclass(frozen=True)
class RunPaths:
    items: Path | None = None
    descriptors: Path | None = None
    interactions: Path | None = None
    templates: Path | None = None
    lexicon: Path | None = None
    output_dir: Path = Path("out")


@dataclass(frozen=True)
class ExtractionSettings:
    backend: ExtractionBackendKind = ExtractionBackendKind.RuleBased
    endpoint: str | None = None
    timeout_s: float = 10.0
    retries: int = 2
    max_in_flight: int = 4
    prompt_spec: Path | None = None
    genre_code_map: Mapping[str, str] = field(default_factory=dict)
    allowed_genres: tuple[str, ...] | None = None


@dataclass(frozen=True)
class RunConfig:
    paths: RunPaths = RunPaths()
    seed: int = 42
    jobs: int = 1
    k: int = 100
    shelf: ShelfConfig = ShelfConfig()
    budget: SlotBudget = SlotBudget(5, 10)
    eval_treatment: str = "descriptive"
    extraction: ExtractionSettings = ExtractionSettings()
    corpus: CorpusSpec = CorpusSpec()


def _section(raw: Mapping[str, Any], key: str) -> dict:
    value = raw.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(f"config section {key!r} must be an object")
    return dict(value)


def _resolve(base: Path, value: Any, key: str) -> Path | None:
    if value is None:
        return None
    if not isinstance(value, str) or not value:
        raise ConfigError(f"path {key!r} must be a non-empty string")
    path = Path(value)
    return path if path.is_absolute() else base / path


def load_run_config(
    config_path: str | Path,
    *,
    seed: int | None = None,
    jobs: int | None = None,
) -> RunConfig:
    """Parse and validate a run config document, applying flag overrides."""
    config_path = Path(config_path)
    if not config_path.is_file():
        raise ConfigError(f"config file not found: {config_path}")
    try:
        raw = json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{config_path}: invalid JSON ({exc.msg})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{config_path}: config must be a JSON object")
    base = config_path.parent

    paths_raw = _section(raw, "paths")
    paths = RunPaths(
        items=_resolve(base, paths_raw.get("items"), "items"),
        descriptors=_resolve(base, paths_raw.get("descriptors"), "descriptors"),
        interactions=_resolve(base, paths_raw.get("interactions"), "interactions"),
        templates=_resolve(base, paths_raw.get("templates"), "templates"),
        lexicon=_resolve(base, paths_raw.get("lexicon"), "lexicon"),
        output_dir=_resolve(base, paths_raw.get("output_dir", "out"), "output_dir") or base / "out",
    )

    effective_seed = seed if seed is not None else raw.get("seed", 42)
    if not isinstance(effective_seed, int) or not 0 <= effective_seed < 2**64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {effective_seed!r}")
    effective_jobs = jobs if jobs is not None else raw.get("jobs", 1)
    if not isinstance(effective_jobs, int) or effective_jobs < 1:
        raise ConfigError(f"jobs must be a positive integer, got {effective_jobs!r}")

    candidates_raw = _section(raw, "candidates")
    k = candidates_raw.get("k", 100)
    if not isinstance(k, int) or k < 1:
        raise ConfigError(f"candidates.k must be a positive integer, got {k!r}")

    shelf_raw = _section(raw, "shelf")
    decoration_raw = shelf_raw.pop("decoration", {})
    try:
        decoration = DecorationConfig(
            header=str(decoration_raw.get("header", "Audiobooks for you")),
            max_title_chars=int(decoration_raw.get("max_title_chars", 40)),
        )
        shelf = ShelfConfig(
            enabled_templates=(),
            n_shelves=int(shelf_raw.get("n_shelves", 5)),
            tau=float(shelf_raw.get("tau", 0.8)),
            min_items=int(shelf_raw.get("min_items", 3)),
            max_items=int(shelf_raw.get("max_items", 20)),
            idf_smoothing=float(shelf_raw.get("idf_smoothing", 1.0)),
            embedding_dim=int(shelf_raw.get("embedding_dim", 64)),
            dedupe_items_across_shelves=bool(shelf_raw.get("dedupe_items_across_shelves", False)),
            decoration=decoration,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"shelf config: {exc}") from None

    budget_raw = _section(raw, "budget")
    try:
        budget = SlotBudget(
            shelves_visible=int(budget_raw.get("shelves_visible", 5)),
            slots_per_shelf=int(budget_raw.get("slots_per_shelf", 10)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"budget config: {exc}") from None

    eval_raw = _section(raw, "eval")
    eval_treatment = eval_raw.get("treatment", "descriptive")
    if eval_treatment not in _EVAL_TREATMENTS:
        raise ConfigError(f"eval.treatment must be one of {_EVAL_TREATMENTS}, got {eval_treatment!r}")

    extraction_raw = _section(raw, "extraction")
    backend_name = extraction_raw.get("backend", "rule_based")
    try:
        backend = ExtractionBackendKind(backend_name)
    except ValueError:
        raise ConfigError(f"extraction.backend must be 'rule_based' or 'remote_llm', got {backend_name!r}") from None
    genre_code_map = extraction_raw.get("genre_code_map", {})
    if not isinstance(genre_code_map, dict):
        raise ConfigError("extraction.genre_code_map must be an object")
    allowed_genres_raw = extraction_raw.get("allowed_genres")
    if allowed_genres_raw is not None and not isinstance(allowed_genres_raw, list):
        raise ConfigError("extraction.allowed_genres must be an array or null")
    try:
        extraction = ExtractionSettings(
            backend=backend,
            endpoint=extraction_raw.get("endpoint"),
            timeout_s=float(extraction_raw.get("timeout_s", 10.0)),
            retries=int(extraction_raw.get("retries", 2)),
            max_in_flight=int(extraction_raw.get("max_in_flight", 4)),
            prompt_spec=_resolve(base, extraction_raw.get("prompt_spec"), "prompt_spec"),
            genre_code_map={str(k_): str(v) for k_, v in genre_code_map.items()},
            allowed_genres=tuple(str(g) for g in allowed_genres_raw) if allowed_genres_raw is not None else None,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"extraction config: {exc}") from None

    corpus_raw = _section(raw, "corpus")
    try:
        corpus = CorpusSpec(
            item_count=int(corpus_raw.get("item_count", 1000)),
            user_count=int(corpus_raw.get("user_count", 200)),
            seed=effective_seed,
            interactions_per_user=int(corpus_raw.get("interactions_per_user", 30)),
            zipf_exponent=float(corpus_raw.get("zipf_exponent", 1.1)),
            anchor_affinity=float(corpus_raw.get("anchor_affinity", 0.85)),
            vocab_sizes=corpus_raw.get("vocab_sizes", {}),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"corpus config: {exc}") from None

    return RunConfig(
        paths=paths,
        seed=effective_seed,
        jobs=effective_jobs,
        k=k,
        shelf=shelf,
        budget=budget,
        eval_treatment=str(eval_treatment),
        extraction=extraction,
        corpus=corpus,
    )
