"""User profiles and per-user top-K candidate lists.

This is a deliberately simple content-embedding dot-product scorer behind a
plug-in seam: anything that produces a :class:`CandidateList` can replace it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .catalog import (
    DEFAULT_EMBEDDING_DIM,
    Catalog,
    Item,
    ItemId,
    embed_text,
)
from .errors import DataError

UserId = str


@dataclass(frozen=True)
class Interaction:
    user: UserId
    item: ItemId
    weight: float

    def __post_init__(self) -> None:
        if not self.user:
            raise ValueError("interaction user id must be non-empty")
        if not self.item:
            raise ValueError("interaction item id must be non-empty")
        if not self.weight >= 0:
            raise ValueError(f"interaction weight must be >= 0, got {self.weight}")


@dataclass(frozen=True)
class UserProfile:
    user: UserId
    embedding: np.ndarray


@dataclass(frozen=True)
class CandidateList:
    """Per-user scored items, non-increasing by score with ties broken by
    ascending item id. This ordering is the contract every downstream stage
    relies on."""

    user: UserId
    entries: tuple[tuple[ItemId, float], ...]

    def __post_init__(self) -> None:
        seen: set[ItemId] = set()
        previous: tuple[float, ItemId] | None = None
        for item_id, score in self.entries:
            if item_id in seen:
                raise ValueError(f"candidate list for {self.user!r} repeats item {item_id!r}")
            seen.add(item_id)
            key = (-score, item_id)
            if previous is not None and key < previous:
                raise ValueError(f"candidate list for {self.user!r} is not in ranking order")
            previous = key

    def item_ids(self) -> list[ItemId]:
        return [item_id for item_id, _ in self.entries]

    def score_map(self) -> dict[ItemId, float]:
        return dict(self.entries)


def item_content_text(item: Item) -> str:
    return " ".join([item.title, item.description, *item.genre_codes])


def item_content_embedding(item: Item, dim: int = DEFAULT_EMBEDDING_DIM) -> np.ndarray:
    """Hashed-trigram embedding of the item's title, description, and genre codes."""
    return embed_text(item_content_text(item), dim)


def build_profile(
    user: UserId,
    history: Iterable[Interaction],
    catalog: Catalog,
    dim: int = DEFAULT_EMBEDDING_DIM,
) -> UserProfile:
    """Weight-weighted mean of interacted items' content embeddings,
    renormalized to unit length. Empty or all-zero history yields the zero
    vector (cold start). Scaling all weights by a constant does not change
    the result."""
    acc = np.zeros(dim, dtype=np.float64)
    for interaction in history:
        if interaction.item not in catalog.items:
            raise DataError(
                f"interaction for user {user!r} references unknown item {interaction.item!r}"
            )
        acc += interaction.weight * item_content_embedding(catalog.item(interaction.item), dim)
    norm = float(np.linalg.norm(acc))
    if norm == 0.0:
        return UserProfile(user=user, embedding=np.zeros(dim, dtype=np.float64))
    return UserProfile(user=user, embedding=acc / norm)


def top_k(profile: UserProfile, catalog: Catalog, k: int) -> CandidateList:
    """Score every catalog item against the profile and keep the best K.

    Cold-start profiles (zero embedding) degrade to the first K items by
    ascending id with score 0, which keeps evaluation reproducible.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    dim = profile.embedding.shape[0]
    scored = [
        (item_id, float(np.dot(item_content_embedding(item, dim), profile.embedding)))
        for item_id, item in catalog.items.items()
    ]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return CandidateList(user=profile.user, entries=tuple(scored[:k]))


def load_interactions(path: str | Path) -> list[Interaction]:
    path = Path(path)
    interactions: list[Interaction] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"{path}: line {lineno}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{where}: invalid JSON ({exc.msg})") from None
            try:
                interactions.append(
                    Interaction(
                        user=str(record["user_id"]),
                        item=str(record["item_id"]),
                        weight=float(record["weight"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise DataError(f"{where}: {exc}") from None
    return interactions


def build_candidate_lists(
    interactions: Sequence[Interaction],
    catalog: Catalog,
    k: int,
    dim: int = DEFAULT_EMBEDDING_DIM,
) -> list[CandidateList]:
    """One CandidateList per user seen in the interactions, ascending user id."""
    by_user: dict[UserId, list[Interaction]] = {}
    for interaction in interactions:
        by_user.setdefault(interaction.user, []).append(interaction)
    lists: list[CandidateList] = []
    for user in sorted(by_user):
        profile = build_profile(user, by_user[user], catalog, dim)
        lists.append(top_k(profile, catalog, k))
    return lists
