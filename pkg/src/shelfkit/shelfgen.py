"""Descriptive shelf assembly.

The pipeline for one user: collect distinct title candidates from the
candidate items' descriptors, rank them by user relevance balanced with an
IDF penalty on overly common descriptors, greedily diversify by title
embedding similarity, fill each surviving title with the matching candidate
items, decorate, and keep the first N shelves that survive.

Everything here is a pure function of (candidate list, catalog, config), so
pages for different users can be generated concurrently and results never
depend on scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .affinity import CandidateList, UserId
from .catalog import (
    DEFAULT_EMBEDDING_DIM,
    Catalog,
    ItemId,
    canonicalize,
    cosine_similarity,
    embed_text,
)
from .templates import (
    DecorationConfig,
    TemplateSpec,
    TitleCandidate,
    decorate,
    expand_titles,
)


@dataclass(frozen=True)
class ShelfConfig:
    """Knobs for shelf generation; defaults are the shipped baseline tuning."""

    enabled_templates: tuple[TemplateSpec, ...] = ()
    n_shelves: int = 5
    tau: float = 0.8
    min_items: int = 3
    max_items: int = 20
    idf_smoothing: float = 1.0
    embedding_dim: int = DEFAULT_EMBEDDING_DIM
    dedupe_items_across_shelves: bool = False
    decoration: DecorationConfig = DecorationConfig()

    def __post_init__(self) -> None:
        object.__setattr__(self, "enabled_templates", tuple(self.enabled_templates))
        if self.n_shelves < 1:
            raise ValueError(f"n_shelves must be >= 1, got {self.n_shelves}")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must be in [0, 1], got {self.tau}")
        if self.min_items < 1 or self.min_items > self.max_items:
            raise ValueError(
                f"need 1 <= min_items <= max_items, got {self.min_items}..{self.max_items}"
            )


@dataclass(frozen=True)
class TitleScored:
    """A distinct title candidate with its supporting items and relevance."""

    title: TitleCandidate
    support: frozenset[ItemId]
    relevance: float
    title_embedding: np.ndarray

    @property
    def canonical_display(self) -> str:
        return canonicalize(self.title.display)


@dataclass(frozen=True)
class Shelf:
    header: str
    title: str
    items: tuple[tuple[ItemId, float], ...]
    source: TitleCandidate | None = None


@dataclass(frozen=True)
class ShelfPage:
    user: UserId
    shelves: tuple[Shelf, ...]


def collect_title_candidates(
    cl: CandidateList, catalog: Catalog, cfg: ShelfConfig
) -> list[TitleScored]:
    """Distinct title candidates over the user's candidate items.

    Candidates are merged on the canonicalized display with supports unioned.
    Candidates that would fail the decoration character limit, or whose
    support is below min_items, are excluded here so later stages never see
    them. Output keeps first-appearance order; ranking happens separately.
    """
    first_seen: dict[str, TitleCandidate] = {}
    supports: dict[str, set[ItemId]] = {}
    for item_id, _score in cl.entries:
        dset = catalog.descriptor_set(item_id)
        if dset.is_empty():
            continue
        for candidate in expand_titles(dset, cfg.enabled_templates):
            key = canonicalize(candidate.display)
            if key not in first_seen:
                first_seen[key] = candidate
                supports[key] = {item_id}
            else:
                supports[key].add(item_id)

    collected: list[TitleScored] = []
    for key, candidate in first_seen.items():
        if decorate(candidate, cfg.decoration) is None:
            continue
        support = supports[key]
        if len(support) < cfg.min_items:
            continue
        collected.append(
            TitleScored(
                title=candidate,
                support=frozenset(support),
                relevance=0.0,
                title_embedding=embed_text(candidate.display, cfg.embedding_dim),
            )
        )
    return collected


def _idf(title: TitleScored, catalog: Catalog, smoothing: float) -> float:
    broadest = max(
        catalog.document_frequency(d.dtype, d.canonical) for d in title.title.source
    )
    return math.log(catalog.item_count / (smoothing + broadest))


def rank_titles(
    candidates: list[TitleScored],
    cl: CandidateList,
    catalog: Catalog,
    cfg: ShelfConfig,
) -> list[TitleScored]:
    """Sort candidates by relevance to the user.

    relevance = (sum of the candidate-list scores of the supporting items)
    times an IDF factor, ln(catalog size / (smoothing + max document
    frequency over the title's source descriptors)). The IDF keeps broad
    descriptors that blanket the catalog from always outranking specific
    ones. Ties break on ascending canonical display, so the order is total
    and deterministic.
    """
    score_of = cl.score_map()
    rescored = []
    for candidate in candidates:
        # Summation over sorted ids keeps float results run-independent.
        mass = sum(score_of[item_id] for item_id in sorted(candidate.support))
        rescored.append(replace(candidate, relevance=mass * _idf(candidate, catalog, cfg.idf_smoothing)))
    rescored.sort(key=lambda t: (-t.relevance, t.canonical_display))
    return rescored


def diversify_titles(ranked: list[TitleScored], tau: float, n: int) -> list[TitleScored]:
    """Greedy diversification scan in rank order.

    A candidate is kept iff its title embedding's cosine similarity to every
    already-kept candidate is strictly below tau. Stops after n candidates
    are kept or the input is exhausted; output preserves rank order.
    """
    kept: list[TitleScored] = []
    for candidate in ranked:
        if len(kept) >= n:
            break
        if all(
            cosine_similarity(candidate.title_embedding, other.title_embedding) < tau
            for other in kept
        ):
            kept.append(candidate)
    return kept


def populate_shelf(
    title: TitleScored,
    cl: CandidateList,
    catalog: Catalog,
    cfg: ShelfConfig,
    exclude: set[ItemId] | None = None,
) -> Shelf | None:
    """Fill a shelf with candidate items that carry all of the title's source
    descriptors, in candidate-list score order, truncated to max_items.

    Returns None (rejection) when fewer than min_items qualify or the title
    fails decoration. Combination titles are conjunctive: an item must carry
    every slot descriptor to qualify.
    """
    source = title.title.source
    items: list[tuple[ItemId, float]] = []
    for item_id, score in cl.entries:
        if exclude is not None and item_id in exclude:
            continue
        if catalog.descriptor_set(item_id).contains_all(source):
            items.append((item_id, score))
            if len(items) == cfg.max_items:
                break
    if len(items) < cfg.min_items:
        return None
    decorated = decorate(title.title, cfg.decoration)
    if decorated is None:
        return None
    return Shelf(
        header=decorated.header,
        title=decorated.display,
        items=tuple(items),
        source=title.title,
    )


def generate_page(
    user: UserId, cl: CandidateList, catalog: Catalog, cfg: ShelfConfig
) -> ShelfPage:
    """Run the full pipeline for one user and return at most n_shelves shelves.

    The diversification scan continues past n_shelves kept titles whenever
    populate_shelf rejects one, so a page is not starved by popular but thin
    titles. The interleaved scan below is exactly equivalent to diversifying
    the whole ranked list first and populating the survivors in order, it
    just stops early once the page is full.
    """
    if not cl.entries:
        return ShelfPage(user=user, shelves=())
    ranked = rank_titles(collect_title_candidates(cl, catalog, cfg), cl, catalog, cfg)

    shelves: list[Shelf] = []
    kept_embeddings: list[np.ndarray] = []
    used_titles: set[str] = set()
    used_items: set[ItemId] = set()
    for candidate in ranked:
        if len(shelves) == cfg.n_shelves:
            break
        diverse = all(
            cosine_similarity(candidate.title_embedding, other) < cfg.tau
            for other in kept_embeddings
        )
        if not diverse:
            continue
        kept_embeddings.append(candidate.title_embedding)
        shelf = populate_shelf(
            candidate,
            cl,
            catalog,
            cfg,
            exclude=used_items if cfg.dedupe_items_across_shelves else None,
        )
        if shelf is None:
            continue
        title_key = canonicalize(shelf.title)
        if title_key in used_titles:
            continue
        used_titles.add(title_key)
        if cfg.dedupe_items_across_shelves:
            used_items.update(item_id for item_id, _ in shelf.items)
        shelves.append(shelf)
    return ShelfPage(user=user, shelves=tuple(shelves))


def page_to_json_dict(page: ShelfPage) -> dict:
    """Wire form for the pages file: one object per user."""
    return {
        "user_id": page.user,
        "shelves": [
            {
                "header": shelf.header,
                "title": shelf.title,
                "items": [
                    {"item_id": item_id, "score": score} for item_id, score in shelf.items
                ],
            }
            for shelf in page.shelves
        ],
    }
