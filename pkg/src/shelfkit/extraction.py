"""Descriptor extraction for catalog items.

Two backends produce a :class:`DescriptorSet` per item from its metadata: a
deterministic rule/lexicon matcher for offline runs, and a remote LLM endpoint
speaking a small JSON protocol. Both feed the same grounding validation, which
drops descriptors the item's own metadata cannot support.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Mapping

import requests

from .catalog import (
    Descriptor,
    DescriptorSet,
    DescriptorType,
    Item,
    ItemId,
    canonicalize,
)
from .errors import DataError, ExtractionError, LlmResponseError

logger = logging.getLogger(__name__)


class ExtractionBackendKind(str, Enum):
    RuleBased = "rule_based"
    RemoteLlm = "remote_llm"


# ---------------------------------------------------------------------------
# Rule-based backend
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LexiconEntry:
    pattern: str
    dtype: DescriptorType
    display: str

    def __post_init__(self) -> None:
        pattern = canonicalize(self.pattern)
        if not pattern:
            raise ValueError("lexicon pattern must be non-empty")
        if not self.display.strip():
            raise ValueError("lexicon display must be non-empty")
        object.__setattr__(self, "pattern", pattern)


@dataclass(frozen=True)
class Lexicon:
    """Substring patterns plus a genre-code map, standing in for the LLM."""

    entries: tuple[LexiconEntry, ...] = ()
    genre_code_map: Mapping[str, str] = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        object.__setattr__(self, "genre_code_map", dict(self.genre_code_map or {}))
        seen: set[tuple[str, DescriptorType]] = set()
        for entry in self.entries:
            key = (entry.pattern, entry.dtype)
            if key in seen:
                raise ValueError(f"duplicate lexicon entry for ({entry.pattern!r}, {entry.dtype.value})")
            seen.add(key)


def load_lexicon(path: str | Path, genre_code_map: Mapping[str, str] | None = None) -> Lexicon:
    """Read lexicon entries from newline-delimited JSON with pattern/type/display."""
    path = Path(path)
    entries: list[LexiconEntry] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from None
            try:
                entries.append(
                    LexiconEntry(
                        pattern=str(record["pattern"]),
                        dtype=DescriptorType(record["type"]),
                        display=str(record["display"]),
                    )
                )
            except (KeyError, ValueError) as exc:
                raise DataError(f"{path}: line {lineno}: {exc}") from None
    try:
        return Lexicon(entries=tuple(entries), genre_code_map=genre_code_map)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None


def match_text(item: Item) -> str:
    """The canonicalized haystack rule-based extraction matches against."""
    return canonicalize(f"{item.title} {item.description}")


def extract_rule_based(item: Item, lexicon: Lexicon) -> DescriptorSet:
    """Emit a descriptor for every lexicon pattern found in the item's
    title + description, plus a Genre descriptor for every mapped genre code.
    Deterministic; types with no hits stay empty."""
    haystack = match_text(item)
    found: list[Descriptor] = []
    for entry in lexicon.entries:
        if entry.pattern in haystack:
            found.append(Descriptor(entry.dtype, entry.display))
    for code in item.genre_codes:
        display = lexicon.genre_code_map.get(code)
        if display is not None:
            found.append(Descriptor(DescriptorType.Genre, display))
    return DescriptorSet(found)


# ---------------------------------------------------------------------------
# Prompt construction and response parsing
# ---------------------------------------------------------------------------

_DEFAULT_SCHEMA_HINT = (
    "Respond with a single JSON object whose keys are exactly the ten "
    "descriptor type names and whose values are arrays of strings. "
    "Return an empty list for every type with no supported descriptors."
)

_DEFAULT_INSTRUCTIONS: dict[DescriptorType, str] = {
    DescriptorType.Genre: "Genre: the broad publishing category of the audiobook.",
    DescriptorType.Theme: "Theme: a topic or subject matter the audiobook centers on.",
    DescriptorType.Character: "Character: a notable trait of the cast or protagonist.",
    DescriptorType.Mood: "Mood: the emotional tone a listener should expect.",
    DescriptorType.Setting: "Setting: the time or place where the story unfolds.",
    DescriptorType.PersonalSituation: "PersonalSituation: a life circumstance the audiobook speaks to.",
    DescriptorType.StoryTrope: "StoryTrope: a recognizable narrative device or plot pattern.",
    DescriptorType.TargetAudience: "TargetAudience: who the audiobook is written for.",
    DescriptorType.Objective: "Objective: a concrete goal the listener can pursue with it.",
    DescriptorType.NamedEntity: "NamedEntity: a real person, place, or organization named in the metadata.",
}


@dataclass(frozen=True)
class PromptSpec:
    """Prompt material: one instruction per taxonomy type plus worked examples."""

    taxonomy_instructions: Mapping[DescriptorType, str]
    incontext_examples: tuple[tuple[Item, DescriptorSet], ...]
    response_schema_hint: str = _DEFAULT_SCHEMA_HINT

    def __post_init__(self) -> None:
        instructions = dict(self.taxonomy_instructions)
        missing = [t.value for t in DescriptorType if t not in instructions]
        if missing:
            raise ValueError(f"taxonomy instructions missing for types: {missing}")
        if len(instructions) != len(DescriptorType):
            extra = set(instructions) - set(DescriptorType)
            raise ValueError(f"unexpected instruction keys: {sorted(k.value for k in extra)}")
        if not self.incontext_examples:
            raise ValueError("at least one in-context example is required")
        object.__setattr__(self, "taxonomy_instructions", instructions)
        object.__setattr__(self, "incontext_examples", tuple(self.incontext_examples))


def default_prompt_spec() -> PromptSpec:
    example_item = Item(
        id="example-1",
        title="The Long Way Home",
        authors=("Dana Reyes",),
        description="An uplifting small town romance about starting over after loss.",
        genre_codes=("FIC027000",),
    )
    example_set = DescriptorSet(
        [
            Descriptor(DescriptorType.Genre, "Romance"),
            Descriptor(DescriptorType.Mood, "Uplifting"),
            Descriptor(DescriptorType.Setting, "Small Town"),
            Descriptor(DescriptorType.PersonalSituation, "Starting Over"),
        ]
    )
    return PromptSpec(
        taxonomy_instructions=dict(_DEFAULT_INSTRUCTIONS),
        incontext_examples=((example_item, example_set),),
    )


def load_prompt_spec(path: str | Path) -> PromptSpec:
    """Read a PromptSpec from a JSON document, so prompt text lives in data."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc.msg})") from None
    try:
        instructions = {
            DescriptorType(name): str(text)
            for name, text in raw["taxonomy_instructions"].items()
        }
        examples = []
        for entry in raw["incontext_examples"]:
            item = Item(
                id=str(entry["item"].get("id", "example")),
                title=str(entry["item"]["title"]),
                authors=tuple(entry["item"].get("authors", [])),
                description=str(entry["item"].get("description", "")),
                genre_codes=tuple(entry["item"].get("genre_codes", [])),
            )
            dset = parse_llm_response(json.dumps(entry["descriptors"]))
            examples.append((item, dset))
        return PromptSpec(
            taxonomy_instructions=instructions,
            incontext_examples=tuple(examples),
            response_schema_hint=str(raw.get("response_schema_hint", _DEFAULT_SCHEMA_HINT)),
        )
    except (KeyError, TypeError, ValueError, LlmResponseError) as exc:
        raise DataError(f"{path}: malformed prompt spec: {exc}") from None


def _metadata_block(item: Item) -> str:
    return (
        f"Title: {item.title}\n"
        f"Authors: {', '.join(item.authors)}\n"
        f"Description: {item.description}\n"
        f"Genre codes: {', '.join(item.genre_codes)}"
    )


def build_prompt(item: Item, spec: PromptSpec) -> str:
    """Deterministic extraction prompt: instructions, examples, then the item."""
    lines = ["Extract descriptors of the following types from audiobook metadata:"]
    for dtype in DescriptorType:
        lines.append(f"- {spec.taxonomy_instructions[dtype]}")
    lines.append("")
    lines.append(spec.response_schema_hint)
    for example_item, example_set in spec.incontext_examples:
        lines.append("")
        lines.append("Example:")
        lines.append(_metadata_block(example_item))
        lines.append(f"Descriptors: {json.dumps(example_set.to_json_lists(), ensure_ascii=False)}")
    lines.append("")
    lines.append("Now extract descriptors for:")
    lines.append(_metadata_block(item))
    lines.append("Descriptors:")
    return "\n".join(lines)


def parse_llm_response(text: str) -> DescriptorSet:
    """Parse the descriptor JSON an LLM returns.

    Unknown keys are ignored and missing types read as empty. Raises
    :class:`LlmResponseError` (carrying the raw text) on anything that is not
    an object of string arrays.
    """
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LlmResponseError(f"response is not valid JSON ({exc.msg})", raw=text) from None
    if not isinstance(payload, dict):
        raise LlmResponseError("response JSON must be an object", raw=text)
    descriptors: list[Descriptor] = []
    for dtype in DescriptorType:
        values = payload.get(dtype.value)
        if values is None:
            continue
        if not isinstance(values, list):
            raise LlmResponseError(f"field {dtype.value!r} must be an array", raw=text)
        for value in values:
            if not isinstance(value, str) or not value.strip():
                raise LlmResponseError(
                    f"field {dtype.value!r} must contain non-empty strings", raw=text
                )
            descriptors.append(Descriptor(dtype, value))
    return DescriptorSet(descriptors)


# ---------------------------------------------------------------------------
# Grounding validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroundingReport:
    item_id: ItemId
    violations: tuple[tuple[Descriptor, str], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def grounding_text(item: Item) -> str:
    return canonicalize(f"{item.title} {' '.join(item.authors)} {item.description}")


def validate_grounding(
    result: DescriptorSet,
    item: Item,
    allowed_genres: Iterable[str] | None = None,
) -> GroundingReport:
    """Check descriptors against the item's own metadata.

    NamedEntity descriptors must occur verbatim (canonicalized substring) in
    title + authors + description. Genre descriptors must be in the allowed
    vocabulary when one is configured. Abstractive types (Mood, Theme, ...)
    always pass; they rarely appear verbatim in metadata.
    """
    haystack = grounding_text(item)
    allowed = None if allowed_genres is None else {canonicalize(g) for g in allowed_genres}
    violations: list[tuple[Descriptor, str]] = []
    for descriptor in result:
        if descriptor.dtype is DescriptorType.NamedEntity:
            if descriptor.canonical not in haystack:
                violations.append((descriptor, "named entity not found in item metadata"))
        elif descriptor.dtype is DescriptorType.Genre and allowed is not None:
            if descriptor.canonical not in allowed:
                violations.append((descriptor, "genre not in the allowed vocabulary"))
    return GroundingReport(item_id=item.id, violations=tuple(violations))


def _drop_violations(result: DescriptorSet, report: GroundingReport) -> DescriptorSet:
    if report.ok:
        return result
    rejected = {descriptor for descriptor, _ in report.violations}
    return DescriptorSet(d for d in result if d not in rejected)


# ---------------------------------------------------------------------------
# Remote LLM backend
# ---------------------------------------------------------------------------

def extract_remote(
    item: Item,
    spec: PromptSpec,
    endpoint: str,
    *,
    allowed_genres: Iterable[str] | None = None,
    timeout_s: float = 10.0,
    retries: int = 2,
    auth_token: str | None = None,
    session: requests.Session | None = None,
) -> DescriptorSet:
    """Extract descriptors for one item via the remote LLM protocol.

    POSTs {"prompt": ...} to ``endpoint`` and parses {"text": ...} from the
    response. Transport and parse failures are retried up to ``retries``
    times; after that an :class:`ExtractionError` is raised. Descriptors that
    fail grounding are dropped and logged, never fatal.
    """
    prompt = build_prompt(item, spec)
    headers = {}
    if auth_token:
        headers["Authorization"] = f"Bearer {auth_token}"
    post = (session or requests).post

    last_reason = "no attempts made"
    for attempt in range(retries + 1):
        try:
            response = post(endpoint, json={"prompt": prompt}, timeout=timeout_s, headers=headers)
            response.raise_for_status()
            body = response.json()
            if not isinstance(body, dict) or not isinstance(body.get("text"), str):
                raise LlmResponseError("endpoint response must be an object with a 'text' string", raw=response.text)
            result = parse_llm_response(body["text"])
        except (requests.RequestException, LlmResponseError, ValueError) as exc:
            last_reason = str(exc)
            if attempt < retries:
                logger.debug("retrying item %s after failure: %s", item.id, last_reason)
                continue
            raise ExtractionError(item.id, last_reason) from exc
        report = validate_grounding(result, item, allowed_genres)
        for descriptor, reason in report.violations:
            logger.warning(
                "dropping ungrounded descriptor %s:%r for item %s (%s)",
                descriptor.dtype.value, descriptor.display, item.id, reason,
            )
        return _drop_violations(result, report)
    raise ExtractionError(item.id, last_reason)  # pragma: no cover - loop always returns/raises


# ---------------------------------------------------------------------------
# Batch driving and file output
# ---------------------------------------------------------------------------

def run_batch(
    items: Iterable[Item],
    extract_fn: Callable[[Item], DescriptorSet],
    max_in_flight: int = 1,
) -> tuple[dict[ItemId, DescriptorSet], list[tuple[ItemId, str]]]:
    """Run extraction over many items, continuing past per-item failures.

    Results are keyed by item id, so output is independent of completion
    order. Returns (results, failures) with failures as (item_id, reason).
    """
    items = list(items)
    results: dict[ItemId, DescriptorSet] = {}
    failures: dict[ItemId, str] = {}

    def one(item: Item) -> tuple[ItemId, DescriptorSet | None, str | None]:
        try:
            return item.id, extract_fn(item), None
        except ExtractionError as exc:
            return item.id, None, exc.reason
        except (DataError, ValueError) as exc:
            return item.id, None, str(exc)

    if max_in_flight > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
            outcomes = list(pool.map(one, items))
    else:
        outcomes = [one(item) for item in items]

    for item_id, dset, reason in outcomes:
        if reason is None and dset is not None:
            results[item_id] = dset
        else:
            failures[item_id] = reason or "unknown failure"
    return results, [(item_id, failures[item_id]) for item_id in sorted(failures)]


def write_descriptors_file(path: str | Path, results: Mapping[ItemId, DescriptorSet]) -> None:
    """Write extraction results in the catalog descriptors file format,
    sorted by item id then taxonomy type order."""
    with open(path, "w", encoding="utf-8") as fh:
        for item_id in sorted(results):
            for descriptor in results[item_id]:
                record = {
                    "item_id": item_id,
                    "type": descriptor.dtype.value,
                    "text": descriptor.display,
                }
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def write_failures_file(path: str | Path, failures: Iterable[tuple[ItemId, str]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for item_id, reason in failures:
            fh.write(json.dumps({"item_id": item_id, "reason": reason}, ensure_ascii=False) + "\n")
