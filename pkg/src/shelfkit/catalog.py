"""Catalog data model: items, typed descriptors, and deterministic text embeddings.

Every other module builds on the types here. A loaded :class:`Catalog` is
immutable and safe to share across threads; all functions in this module are
pure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import DataError

DEFAULT_EMBEDDING_DIM = 64

ItemId = str


class DescriptorType(str, Enum):
    """Closed ten-type descriptor taxonomy. Values are the wire names."""

    Genre = "Genre"
    Theme = "Theme"
    Character = "Character"
    Mood = "Mood"
    Setting = "Setting"
    PersonalSituation = "PersonalSituation"
    StoryTrope = "StoryTrope"
    TargetAudience = "TargetAudience"
    Objective = "Objective"
    NamedEntity = "NamedEntity"


def canonicalize(text: str) -> str:
    """Lowercase, trim, and collapse internal whitespace runs to single spaces.

    Idempotent. Diacritics are preserved; casing uses the plain lowercase
    mapping so behavior is locale independent.
    """
    return " ".join(text.lower().split())


@dataclass(frozen=True)
class Item:
    """One catalog entry with the metadata descriptors are extracted from."""

    id: ItemId
    title: str
    authors: tuple[str, ...] = ()
    description: str = ""
    genre_codes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("item id must be non-empty")
        if not self.title:
            raise ValueError(f"item {self.id!r}: title must be non-empty")
        object.__setattr__(self, "authors", tuple(self.authors))
        object.__setattr__(self, "genre_codes", tuple(self.genre_codes))


@dataclass(frozen=True)
class Descriptor:
    """A typed tag. Equality and hashing use (dtype, canonical) only, so
    descriptors differing in case or whitespace compare equal."""

    dtype: DescriptorType
    display: str = field(compare=False)
    canonical: str = field(init=False)

    def __post_init__(self) -> None:
        display = self.display.strip()
        if not display:
            raise ValueError("descriptor display text must be non-empty")
        object.__setattr__(self, "display", display)
        object.__setattr__(self, "canonical", canonicalize(display))


class DescriptorSet:
    """Per-item descriptor collection grouped by type.

    Duplicate canonical keys within one type are dropped, keeping the first
    occurrence. Types with no descriptors read as empty tuples.
    """

    __slots__ = ("_by_type",)

    def __init__(self, descriptors: Iterable[Descriptor] = ()) -> None:
        grouped: dict[DescriptorType, list[Descriptor]] = {}
        seen: set[tuple[DescriptorType, str]] = set()
        for desc in descriptors:
            key = (desc.dtype, desc.canonical)
            if key in seen:
                continue
            seen.add(key)
            grouped.setdefault(desc.dtype, []).append(desc)
        self._by_type: dict[DescriptorType, tuple[Descriptor, ...]] = {
            dtype: tuple(descs) for dtype, descs in grouped.items()
        }

    def of_type(self, dtype: DescriptorType) -> tuple[Descriptor, ...]:
        return self._by_type.get(dtype, ())

    def contains(self, descriptor: Descriptor) -> bool:
        return descriptor in self._by_type.get(descriptor.dtype, ())

    def contains_all(self, descriptors: Iterable[Descriptor]) -> bool:
        return all(self.contains(d) for d in descriptors)

    def is_empty(self) -> bool:
        return not self._by_type

    def __iter__(self) -> Iterator[Descriptor]:
        for dtype in DescriptorType:
            yield from self.of_type(dtype)

    def __len__(self) -> int:
        return sum(len(descs) for descs in self._by_type.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DescriptorSet):
            return NotImplemented
        return self._by_type == other._by_type

    def __repr__(self) -> str:
        parts = ", ".join(
            f"{dtype.value}={[d.display for d in descs]}"
            for dtype, descs in self._by_type.items()
        )
        return f"DescriptorSet({parts})"

    def to_json_lists(self) -> dict[str, list[str]]:
        """Wire form: one array of display strings per taxonomy type name."""
        return {dtype.value: [d.display for d in self.of_type(dtype)] for dtype in DescriptorType}


EMPTY_DESCRIPTOR_SET = DescriptorSet()


class Catalog:
    """Immutable catalog snapshot with per-descriptor document frequencies.

    Document frequency counts items, not occurrences: an item contributes at
    most one count per (type, canonical) key.
    """

    __slots__ = ("_items", "_descriptors", "_df")

    def __init__(
        self,
        items: Mapping[ItemId, Item],
        descriptors: Mapping[ItemId, DescriptorSet] | None = None,
    ) -> None:
        descriptors = dict(descriptors or {})
        unknown = sorted(set(descriptors) - set(items))
        if unknown:
            raise DataError(f"descriptors reference unknown item id {unknown[0]!r}")
        df: dict[tuple[DescriptorType, str], int] = {}
        for dset in descriptors.values():
            for desc in dset:
                key = (desc.dtype, desc.canonical)
                df[key] = df.get(key, 0) + 1
        self._items = MappingProxyType(dict(items))
        self._descriptors = MappingProxyType(descriptors)
        self._df = MappingProxyType(df)

    @property
    def items(self) -> Mapping[ItemId, Item]:
        return self._items

    @property
    def item_count(self) -> int:
        return len(self._items)

    @property
    def document_frequencies(self) -> Mapping[tuple[DescriptorType, str], int]:
        return self._df

    def item(self, item_id: ItemId) -> Item:
        try:
            return self._items[item_id]
        except KeyError:
            raise DataError(f"unknown item id {item_id!r}") from None

    def descriptor_set(self, item_id: ItemId) -> DescriptorSet:
        return self._descriptors.get(item_id, EMPTY_DESCRIPTOR_SET)

    def document_frequency(self, dtype: DescriptorType, canonical: str) -> int:
        return self._df.get((dtype, canonical), 0)

    def sorted_item_ids(self) -> list[ItemId]:
        return sorted(self._items)


# ---------------------------------------------------------------------------
# File loading (newline-delimited JSON, UTF-8)
# ---------------------------------------------------------------------------

def _iter_ndjson(path: Path) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(record, dict):
                raise DataError(f"{path}: line {lineno}: expected a JSON object")
            yield lineno, record


def _require_str(record: dict, key: str, where: str) -> str:
    value = record.get(key)
    if not isinstance(value, str):
        raise DataError(f"{where}: field {key!r} must be a string")
    return value


def _require_str_list(record: dict, key: str, where: str) -> list[str]:
    value = record.get(key, [])
    if not isinstance(value, list) or any(not isinstance(v, str) for v in value):
        raise DataError(f"{where}: field {key!r} must be an array of strings")
    return value


def parse_item_record(record: dict, where: str) -> Item:
    try:
        return Item(
            id=_require_str(record, "id", where),
            title=_require_str(record, "title", where),
            authors=tuple(_require_str_list(record, "authors", where)),
            description=record.get("description", "") or "",
            genre_codes=tuple(_require_str_list(record, "genre_codes", where)),
        )
    except ValueError as exc:
        raise DataError(f"{where}: {exc}") from None


def item_to_record(item: Item) -> dict:
    return {
        "id": item.id,
        "title": item.title,
        "authors": list(item.authors),
        "description": item.description,
        "genre_codes": list(item.genre_codes),
    }


def load_items(items_path: str | Path) -> dict[ItemId, Item]:
    """Read the items file, rejecting duplicate ids."""
    items_path = Path(items_path)
    items: dict[ItemId, Item] = {}
    for lineno, record in _iter_ndjson(items_path):
        item = parse_item_record(record, f"{items_path}: line {lineno}")
        if item.id in items:
            raise DataError(f"{items_path}: line {lineno}: duplicate item id {item.id!r}")
        items[item.id] = item
    return items


def load_catalog(items_path: str | Path, descriptors_path: str | Path) -> Catalog:
    """Load a catalog from an items file and a descriptors file.

    Raises :class:`DataError` on duplicate item ids, descriptors referencing
    unknown items, or malformed records (with the offending line number).
    """
    descriptors_path = Path(descriptors_path)
    items = load_items(items_path)

    per_item: dict[ItemId, list[Descriptor]] = {}
    for lineno, record in _iter_ndjson(descriptors_path):
        where = f"{descriptors_path}: line {lineno}"
        item_id = _require_str(record, "item_id", where)
        if item_id not in items:
            raise DataError(f"{where}: descriptor references unknown item id {item_id!r}")
        type_name = _require_str(record, "type", where)
        try:
            dtype = DescriptorType(type_name)
        except ValueError:
            raise DataError(f"{where}: unknown descriptor type {type_name!r}") from None
        text = _require_str(record, "text", where)
        try:
            descriptor = Descriptor(dtype, text)
        except ValueError as exc:
            raise DataError(f"{where}: {exc}") from None
        per_item.setdefault(item_id, []).append(descriptor)

    descriptors = {item_id: DescriptorSet(descs) for item_id, descs in per_item.items()}
    return Catalog(items, descriptors)


# ---------------------------------------------------------------------------
# Embeddings
# ---------------------------------------------------------------------------

_FNV_OFFSET = 0xCBF29CE484B222B5
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash. Fixed and portable; used for embedding buckets."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


@lru_cache(maxsize=1 << 16)
def _embed_canonical(text: str, dim: int) -> np.ndarray:
    vec = np.zeros(dim, dtype=np.float64)
    for i in range(len(text) - 2):
        h = fnv1a64(text[i : i + 3].encode("utf-8"))
        sign = 1.0 if (h >> 63) == 0 else -1.0
        vec[h % dim] += sign
    norm = float(np.linalg.norm(vec))
    if norm > 0.0:
        vec /= norm
    vec.flags.writeable = False  # cached and shared; callers must not mutate
    return vec


def embed_text(text: str, dim: int = DEFAULT_EMBEDDING_DIM) -> np.ndarray:
    """Deterministic hashed character-trigram embedding of ``text``.

    The text is canonicalized, then every character trigram is hashed with
    64-bit FNV-1a: the bucket is the hash modulo ``dim`` and the sign comes
    from the hash's top bit. The signed count vector is L2-normalized.
    Empty or sub-trigram text yields the zero vector. The returned array is
    read-only (results are cached).
    """
    if dim < 2:
        raise ValueError(f"embedding dim must be >= 2, got {dim}")
    return _embed_canonical(canonicalize(text), dim)


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Inner product of unit vectors, clamped to [-1, 1].

    Zero vectors compare as 0 against anything. Exactly equal nonzero vectors
    compare as exactly 1.0, so identical texts are never "diverse enough"
    under any threshold <= 1.
    """
    if a.shape != b.shape:
        raise ValueError(f"embedding dimension mismatch: {a.shape} vs {b.shape}")
    if not a.any() or not b.any():
        return 0.0
    if a is b or np.array_equal(a, b):
        return 1.0
    return min(1.0, max(-1.0, float(np.dot(a, b))))
