"""Offline evaluation: descriptive pages vs a single generic shelf.

Both variants are compared under an equal slot budget, using a deterministic
truncation model of impressions (top shelves, top slots, no click simulation).
Only exposure-side discovery and diversity metrics are computed; engagement
rates need live traffic and are reported as not available offline.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .affinity import CandidateList, UserId
from .catalog import (
    DEFAULT_EMBEDDING_DIM,
    Catalog,
    Descriptor,
    ItemId,
    canonicalize,
    cosine_similarity,
    embed_text,
)
from .errors import DataError
from .shelfgen import Shelf, ShelfPage

GENERIC_SHELF_TITLE = "Audiobooks for you"


@dataclass(frozen=True)
class SlotBudget:
    shelves_visible: int
    slots_per_shelf: int

    def __post_init__(self) -> None:
        if self.shelves_visible < 1 or self.slots_per_shelf < 1:
            raise ValueError("slot budget dimensions must be >= 1")

    @property
    def total_slots(self) -> int:
        return self.shelves_visible * self.slots_per_shelf


@dataclass(frozen=True)
class ExposedShelf:
    """One shelf as the user saw it: title, its source descriptors (empty for
    the generic shelf), and the impressed item ids in display order."""

    title: str
    source: tuple[Descriptor, ...]
    items: tuple[ItemId, ...]


@dataclass(frozen=True)
class ExposureLog:
    entries: Mapping[UserId, tuple[ExposedShelf, ...]]

    def users(self) -> list[UserId]:
        return sorted(self.entries)


def baseline_page(cl: CandidateList, budget: SlotBudget) -> ShelfPage:
    """The single generic shelf holding the top candidates.

    Its size is the full budget (shelves_visible * slots_per_shelf), so the
    treatment and baseline expose the same number of slots. An empty
    candidate list yields an empty page.
    """
    if not cl.entries:
        return ShelfPage(user=cl.user, shelves=())
    shelf = Shelf(
        header="",
        title=GENERIC_SHELF_TITLE,
        items=tuple(cl.entries[: budget.total_slots]),
        source=None,
    )
    return ShelfPage(user=cl.user, shelves=(shelf,))


def simulate_exposure(pages: Iterable[ShelfPage], budget: SlotBudget) -> ExposureLog:
    """Deterministic impression model: the first shelves_visible shelves of a
    page are seen, and the first slots_per_shelf items of each seen shelf."""
    entries: dict[UserId, tuple[ExposedShelf, ...]] = {}
    for page in sorted(pages, key=lambda p: p.user):
        exposed = []
        for shelf in page.shelves[: budget.shelves_visible]:
            source = shelf.source.source if shelf.source is not None else ()
            impressed = tuple(item_id for item_id, _ in shelf.items[: budget.slots_per_shelf])
            exposed.append(ExposedShelf(title=shelf.title, source=source, items=impressed))
        entries[page.user] = tuple(exposed)
    return ExposureLog(entries=entries)


@dataclass(frozen=True)
class EvalReport:
    variant: str
    distinct_items_impressed: int
    distinct_titles_global: int
    mean_distinct_titles_per_user: float
    catalog_coverage: float
    mean_inter_shelf_title_distance: float
    coherence: float

    def to_json_dict(self) -> dict:
        return {
            "variant": self.variant,
            "distinct_items_impressed": self.distinct_items_impressed,
            "distinct_titles_global": self.distinct_titles_global,
            "mean_distinct_titles_per_user": self.mean_distinct_titles_per_user,
            "catalog_coverage": self.catalog_coverage,
            "mean_inter_shelf_title_distance": self.mean_inter_shelf_title_distance,
            "coherence": self.coherence,
        }


_NUMERIC_FIELDS = (
    "distinct_items_impressed",
    "distinct_titles_global",
    "mean_distinct_titles_per_user",
    "catalog_coverage",
    "mean_inter_shelf_title_distance",
    "coherence",
)


def summarize_log(
    log: ExposureLog,
    catalog: Catalog,
    variant: str,
    embedding_dim: int = DEFAULT_EMBEDDING_DIM,
) -> EvalReport:
    """Aggregate one variant's exposure log into an EvalReport.

    All aggregation iterates users in sorted order so reports serialize to
    identical bytes run after run.
    """
    users = log.users()
    distinct_items: set[ItemId] = set()
    title_keys_global: set[str] = set()
    per_user_title_counts: list[int] = []
    pair_cosines: list[float] = []
    impressions = 0
    coherent = 0

    for user in users:
        shelves = log.entries[user]
        user_titles = {canonicalize(shelf.title) for shelf in shelves}
        per_user_title_counts.append(len(user_titles))
        title_keys_global.update(user_titles)
        embeddings = [embed_text(shelf.title, embedding_dim) for shelf in shelves]
        for i in range(len(shelves)):
            for j in range(i + 1, len(shelves)):
                pair_cosines.append(cosine_similarity(embeddings[i], embeddings[j]))
        for shelf in shelves:
            for item_id in shelf.items:
                distinct_items.add(item_id)
                impressions += 1
                if catalog.descriptor_set(item_id).contains_all(shelf.source):
                    coherent += 1

    mean_titles = (
        sum(per_user_title_counts) / len(per_user_title_counts) if per_user_title_counts else 0.0
    )
    coverage = len(distinct_items) / catalog.item_count if catalog.item_count else 0.0
    distance = 1.0 - (sum(pair_cosines) / len(pair_cosines)) if pair_cosines else 0.0
    coherence = coherent / impressions if impressions else 1.0
    return EvalReport(
        variant=variant,
        distinct_items_impressed=len(distinct_items),
        distinct_titles_global=len(title_keys_global),
        mean_distinct_titles_per_user=mean_titles,
        catalog_coverage=coverage,
        mean_inter_shelf_title_distance=distance,
        coherence=coherence,
    )


@dataclass(frozen=True)
class ComparisonReport:
    treatment: EvalReport
    baseline: EvalReport
    deltas: Mapping[str, float]

    def to_json_dict(self) -> dict:
        return {
            "treatment": self.treatment.to_json_dict(),
            "baseline": self.baseline.to_json_dict(),
            "deltas": dict(self.deltas),
            "not_available_offline": ["i2c", "i2s", "interacted"],
        }


def compute_report(
    treatment: ExposureLog,
    baseline: ExposureLog,
    catalog: Catalog,
    embedding_dim: int = DEFAULT_EMBEDDING_DIM,
) -> ComparisonReport:
    """Compare two exposure logs over the same user set.

    Deltas are treatment/baseline ratios, emitted only where the baseline
    value is nonzero. Engagement-rate metrics are never computed offline.
    """
    if set(treatment.entries) != set(baseline.entries):
        raise DataError("treatment and baseline logs cover different user sets")
    treatment_report = summarize_log(treatment, catalog, "descriptive_shelves", embedding_dim)
    baseline_report = summarize_log(baseline, catalog, "generic_shelf", embedding_dim)
    deltas: dict[str, float] = {}
    for field in _NUMERIC_FIELDS:
        base = getattr(baseline_report, field)
        if base:
            deltas[field] = getattr(treatment_report, field) / base
    return ComparisonReport(treatment=treatment_report, baseline=baseline_report, deltas=deltas)


def format_report_table(report: ComparisonReport) -> str:
    """Plain-text summary with one row per metric; engagement rows are
    explicitly marked not measurable offline."""
    rows: list[tuple[str, str, str, str]] = [
        ("metric", "baseline", "treatment", "delta"),
        ("i2c", "n/a offline", "n/a offline", "n/a"),
        ("i2s", "n/a offline", "n/a offline", "n/a"),
    ]
    labels = {
        "distinct_items_impressed": "# impressed (distinct)",
        "distinct_titles_global": "# shelf titles (distinct)",
        "mean_distinct_titles_per_user": "titles per user (mean)",
        "catalog_coverage": "catalog coverage",
        "mean_inter_shelf_title_distance": "inter-shelf title distance",
        "coherence": "coherence",
    }
    for field, label in labels.items():
        base = getattr(report.baseline, field)
        treat = getattr(report.treatment, field)
        delta = report.deltas.get(field)
        rows.append(
            (
                label,
                f"{base:.4f}" if isinstance(base, float) else str(base),
                f"{treat:.4f}" if isinstance(treat, float) else str(treat),
                f"{delta:.2f}x" if delta is not None else "n/a",
            )
        )
    widths = [max(len(row[col]) for row in rows) for col in range(4)]
    lines = [
        "  ".join(cell.ljust(widths[col]) for col, cell in enumerate(row)).rstrip()
        for row in rows
    ]
    lines.insert(1, "-" * len(lines[0]))
    return "\n".join(lines) + "\n"
