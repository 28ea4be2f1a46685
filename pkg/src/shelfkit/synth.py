"""Seeded synthetic corpus generation.

No public corpus ships with this project, so the evaluation harness runs on a
generated one: items with typed descriptors drawn from per-type vocabularies
under Zipf-like popularity, and users whose interaction histories follow a
small set of anchor interests. Given the same spec (including the seed), the
generator produces byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .affinity import Interaction
from .catalog import (
    Descriptor,
    DescriptorSet,
    DescriptorType,
    Item,
    ItemId,
    item_to_record,
)

_WORD_POOLS: dict[DescriptorType, tuple[str, ...]] = {
    DescriptorType.Genre: (
        "Romance", "Fantasy", "Science Fiction", "Mystery", "Thriller",
        "Historical Fiction", "Biography", "Self Help", "True Crime", "Horror",
        "Literary Fiction", "Young Adult", "Business", "Memoir", "Adventure",
        "Classics",
    ),
    DescriptorType.Theme: (
        "Found Family", "Global Politics", "Coming of Age", "Second Chances",
        "Small Town Secrets", "Forbidden Love", "Artificial Intelligence",
        "Climate Change", "Court Intrigue", "Family Sagas", "Overcoming Obstacles",
        "Hidden Identities", "Space Exploration", "Organized Crime", "First Love",
        "Lost Civilizations", "Workplace Drama", "Royal Scandals",
        "Survival Against the Odds", "Female Friendship", "War and Peace",
        "Immigrant Journeys", "Haunted Houses", "Culinary Adventures",
        "Financial Freedom", "Digital Privacy", "Wilderness Survival",
        "Music and Fame", "Sports Rivalries", "Time Travel",
    ),
    DescriptorType.Character: (
        "Female Protagonist", "Reluctant Hero", "Antihero", "Unreliable Narrator",
        "Ensemble Cast", "Brooding Detective", "Charming Rogue", "Wise Mentor",
        "Orphaned Hero", "Genius Inventor", "Single Parent", "Retired Spy",
        "Small Town Sheriff", "Ambitious Lawyer",
    ),
    DescriptorType.Mood: (
        "Emotional", "Uplifting", "Dark", "Cozy", "Suspenseful", "Heartwarming",
        "Adventurous", "Haunting", "Witty", "Gritty", "Whimsical", "Hopeful",
    ),
    DescriptorType.Setting: (
        "Victorian London", "Deep Space", "Rural Montana", "Ancient Rome",
        "Coastal Maine", "Medieval Europe", "Tokyo Nights", "The Scottish Highlands",
        "Postwar Paris", "A Desert Outpost", "The Amazon Rainforest",
        "Gilded Age New York", "A Remote Island", "Cold War Berlin",
        "A Mountain Village", "The High Seas", "Renaissance Florence",
        "The Australian Outback", "A Future Megacity", "The Antebellum South",
    ),
    DescriptorType.PersonalSituation: (
        "Dealing with Loss", "Starting Over", "New Parenthood", "Career Change",
        "Empty Nest", "Recovering from Burnout", "Long Distance Love",
        "Caring for Aging Parents", "Moving to a New City", "Navigating Divorce",
        "First Year of College", "Facing Retirement",
    ),
    DescriptorType.StoryTrope: (
        "Enemies to Lovers", "Chosen One", "Time Loop", "Love Triangle",
        "Locked Room Mystery", "Rags to Riches", "Fish out of Water",
        "Heist Gone Wrong", "Secret Royalty", "Fake Relationship",
        "Redemption Arc", "Quest for a Lost Artifact", "Mistaken Identity",
        "Second Chance Romance", "Found Footage", "Deal with the Devil",
    ),
    DescriptorType.TargetAudience: (
        "Children's Literature", "Young Listeners", "Book Clubs",
        "Busy Professionals", "New Managers", "Lifelong Learners",
        "Aspiring Writers", "History Buffs",
    ),
    DescriptorType.Objective: (
        "Learn Japanese", "Build Better Habits", "Master Public Speaking",
        "Sleep Better", "Start a Business", "Declutter Your Home",
        "Run a Marathon", "Cook with Confidence", "Manage Your Money",
        "Meditate Daily", "Write a Novel", "Negotiate Effectively",
    ),
    DescriptorType.NamedEntity: (
        "Eleanor Vance", "Marcus Webb", "Priya Sharma", "Hideo Tanaka",
        "Rosa Delgado", "Samuel Okafor", "Ingrid Larsen", "Caleb Stone",
        "Mei Lin", "Victor Haas", "Amara Diallo", "Theo Brandt",
        "Lucia Ferrari", "Nadia Petrov", "Owen Gallagher", "Zara Malik",
        "Felix Moreau", "Harriet Blake", "Diego Ramos", "Astrid Nilsen",
    ),
}

_EXTENDERS = ("Modern", "Classic", "Epic", "Quiet", "Wild", "Hidden", "Golden", "Late")

_FIRST_NAMES = (
    "Ada", "Bram", "Clara", "Dev", "Esme", "Frank", "Greta", "Hassan",
    "Iris", "Jonas", "Kira", "Luis", "Mara", "Nils", "Opal", "Pavel",
)
_LAST_NAMES = (
    "Archer", "Bell", "Castillo", "Dunn", "Eriksen", "Fontaine", "Grady",
    "Holt", "Ishida", "Juarez", "Keller", "Lund", "Mercer", "Novak",
)

_TITLE_NOUNS = (
    "Horizon", "Promise", "Garden", "Echo", "Crown", "Voyage", "Letter",
    "Shadow", "Harbor", "Thread", "Orchard", "Compass", "Lantern", "River",
    "Season", "Atlas", "Hollow", "Ember", "Bridge", "Archive",
)

DEFAULT_VOCAB_SIZES: dict[DescriptorType, int] = {
    DescriptorType.Genre: 12,
    DescriptorType.Theme: 30,
    DescriptorType.Character: 14,
    DescriptorType.Mood: 12,
    DescriptorType.Setting: 20,
    DescriptorType.PersonalSituation: 12,
    DescriptorType.StoryTrope: 16,
    DescriptorType.TargetAudience: 8,
    DescriptorType.Objective: 12,
    DescriptorType.NamedEntity: 20,
}

# Chance an item carries at least one descriptor of each type.
_PRESENCE: dict[DescriptorType, float] = {
    DescriptorType.Genre: 0.97,
    DescriptorType.Theme: 0.92,
    DescriptorType.Character: 0.55,
    DescriptorType.Mood: 0.88,
    DescriptorType.Setting: 0.60,
    DescriptorType.PersonalSituation: 0.35,
    DescriptorType.StoryTrope: 0.50,
    DescriptorType.TargetAudience: 0.30,
    DescriptorType.Objective: 0.20,
    DescriptorType.NamedEntity: 0.30,
}

_MULTI_PROB = 0.35  # chance a present type carries a second descriptor


def type_vocabulary(dtype: DescriptorType, size: int) -> list[str]:
    """Deterministic vocabulary of display strings for one descriptor type."""
    pool = _WORD_POOLS[dtype]
    vocab: list[str] = []
    for index in range(size):
        if index < len(pool):
            vocab.append(pool[index])
        elif dtype is DescriptorType.NamedEntity:
            generation = index // len(pool) + 1
            vocab.append(f"{pool[index % len(pool)]} {'I' * generation}")
        else:
            extender = _EXTENDERS[(index // len(pool) - 1) % len(_EXTENDERS)]
            vocab.append(f"{extender} {pool[index % len(pool)]}")
    return vocab


@dataclass(frozen=True)
class CorpusSpec:
    item_count: int = 1000
    user_count: int = 200
    seed: int = 42
    interactions_per_user: int = 18
    zipf_exponent: float = 0.4
    anchor_affinity: float = 0.8
    vocab_sizes: Mapping[DescriptorType, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.item_count < 0 or self.user_count < 0:
            raise ValueError("item_count and user_count must be >= 0")
        if not 0.0 <= self.anchor_affinity <= 1.0:
            raise ValueError("anchor_affinity must be in [0, 1]")
        sizes = dict(DEFAULT_VOCAB_SIZES)
        for key, value in dict(self.vocab_sizes).items():
            sizes[DescriptorType(key)] = int(value)
        if any(size < 0 for size in sizes.values()):
            raise ValueError("vocabulary sizes must be >= 0")
        object.__setattr__(self, "vocab_sizes", sizes)

    def vocabulary(self, dtype: DescriptorType) -> list[str]:
        return type_vocabulary(dtype, self.vocab_sizes[dtype])


@dataclass(frozen=True)
class Corpus:
    items: tuple[Item, ...]
    descriptors: Mapping[ItemId, DescriptorSet]
    interactions: tuple[Interaction, ...]


def genre_code(index: int) -> str:
    return f"GEN{index:03d}"


def genre_code_map(spec: CorpusSpec) -> dict[str, str]:
    """Genre code to display mapping matching the generated catalog."""
    return {genre_code(i): text for i, text in enumerate(spec.vocabulary(DescriptorType.Genre))}


def _zipf_weights(size: int, exponent: float) -> np.ndarray:
    ranks = np.arange(1, size + 1, dtype=np.float64)
    weights = ranks ** -exponent
    return weights / weights.sum()


def _pick(rng: np.random.Generator, size: int, count: int, weights: np.ndarray) -> list[int]:
    count = min(count, size)
    return [int(i) for i in rng.choice(size, size=count, replace=False, p=weights)]


def _describe(assigned: dict[DescriptorType, list[str]], entity_sentences: list[str]) -> str:
    sentences: list[str] = []
    genre = assigned.get(DescriptorType.Genre)
    mood = assigned.get(DescriptorType.Mood)
    if genre and mood:
        sentences.append(f"A {mood[0].lower()} {genre[0].lower()} audiobook.")
    elif genre:
        sentences.append(f"A {genre[0].lower()} audiobook.")
    elif mood:
        sentences.append(f"A {mood[0].lower()} listen.")
    if DescriptorType.Theme in assigned:
        sentences.append(f"It explores {' and '.join(t.lower() for t in assigned[DescriptorType.Theme])}.")
    if DescriptorType.Character in assigned:
        sentences.append(f"Features {assigned[DescriptorType.Character][0].lower()}.")
    if DescriptorType.Setting in assigned:
        sentences.append(f"Set in {assigned[DescriptorType.Setting][0]}.")
    if DescriptorType.PersonalSituation in assigned:
        sentences.append(f"For anyone {assigned[DescriptorType.PersonalSituation][0].lower()}.")
    if DescriptorType.StoryTrope in assigned:
        sentences.append(f"A {assigned[DescriptorType.StoryTrope][0].lower()} story.")
    if DescriptorType.TargetAudience in assigned:
        sentences.append(f"Perfect for {assigned[DescriptorType.TargetAudience][0].lower()}.")
    if DescriptorType.Objective in assigned:
        sentences.append(f"Helps you {assigned[DescriptorType.Objective][0].lower()}.")
    sentences.extend(entity_sentences)
    return " ".join(sentences)


def build_corpus(spec: CorpusSpec) -> Corpus:
    """Generate the full corpus for a spec. Deterministic per seed."""
    rng = np.random.default_rng(spec.seed)
    vocabs = {dtype: spec.vocabulary(dtype) for dtype in DescriptorType}
    weights = {
        dtype: _zipf_weights(len(vocab), spec.zipf_exponent)
        for dtype, vocab in vocabs.items()
        if vocab
    }

    items: list[Item] = []
    descriptors: dict[ItemId, DescriptorSet] = {}
    by_descriptor: dict[tuple[DescriptorType, str], list[int]] = {}

    for index in range(spec.item_count):
        item_id = f"itm{index:05d}"
        assigned: dict[DescriptorType, list[str]] = {}
        genre_indices: list[int] = []
        for dtype in DescriptorType:
            vocab = vocabs[dtype]
            if not vocab or rng.random() >= _PRESENCE[dtype]:
                continue
            count = 1 + (1 if rng.random() < _MULTI_PROB else 0)
            chosen = _pick(rng, len(vocab), count, weights[dtype])
            assigned[dtype] = [vocab[i] for i in chosen]
            if dtype is DescriptorType.Genre:
                genre_indices = chosen
            for i in chosen:
                by_descriptor.setdefault((dtype, vocab[i].lower()), []).append(index)

        noun = _TITLE_NOUNS[int(rng.integers(len(_TITLE_NOUNS)))]
        pattern = int(rng.integers(3))
        if pattern == 0 and DescriptorType.Mood in assigned:
            title = f"The {assigned[DescriptorType.Mood][0]} {noun}"
        elif pattern == 1 and DescriptorType.Theme in assigned:
            title = f"A {noun} of {assigned[DescriptorType.Theme][0]}"
        else:
            title = f"The {noun} of {_TITLE_NOUNS[int(rng.integers(len(_TITLE_NOUNS)))]}"

        author_count = 2 if rng.random() < 0.2 else 1
        authors = tuple(
            f"{_FIRST_NAMES[int(rng.integers(len(_FIRST_NAMES)))]} "
            f"{_LAST_NAMES[int(rng.integers(len(_LAST_NAMES)))]}"
            for _ in range(author_count)
        )
        entity_sentences = [
            f"With appearances by {entity}."
            for entity in assigned.get(DescriptorType.NamedEntity, [])
        ]
        items.append(
            Item(
                id=item_id,
                title=title,
                authors=authors,
                description=_describe(assigned, entity_sentences),
                genre_codes=tuple(genre_code(i) for i in genre_indices),
            )
        )
        descriptors[item_id] = DescriptorSet(
            Descriptor(dtype, text) for dtype in DescriptorType for text in assigned.get(dtype, [])
        )

    interactions: list[Interaction] = []
    anchor_types = (
        DescriptorType.Genre,
        DescriptorType.Theme,
        DescriptorType.Mood,
        DescriptorType.Setting,
        DescriptorType.PersonalSituation,
        DescriptorType.StoryTrope,
        DescriptorType.Objective,
    )
    for user_index in range(spec.user_count):
        user_id = f"usr{user_index:04d}"
        if not items:
            continue
        pool: list[int] = []
        usable = [t for t in anchor_types if vocabs[t]]
        chosen_types = [usable[i] for i in _pick(rng, len(usable), min(2, len(usable)), _zipf_weights(len(usable), 0.0))]
        for anchor_type in chosen_types:
            vocab = vocabs[anchor_type]
            anchor = vocab[_pick(rng, len(vocab), 1, weights[anchor_type])[0]]
            pool.extend(by_descriptor.get((anchor_type, anchor.lower()), []))
        pool = sorted(set(pool))
        for _ in range(spec.interactions_per_user):
            if pool and rng.random() < spec.anchor_affinity:
                item_index = pool[int(rng.integers(len(pool)))]
            else:
                item_index = int(rng.integers(len(items)))
            interactions.append(
                Interaction(
                    user=user_id,
                    item=items[item_index].id,
                    weight=float(1 + int(rng.integers(8))),
                )
            )

    return Corpus(items=tuple(items), descriptors=descriptors, interactions=tuple(interactions))


def write_corpus(
    corpus: Corpus,
    items_path: str | Path,
    descriptors_path: str | Path,
    interactions_path: str | Path,
) -> None:
    """Write the three corpus files in the catalog module's formats."""
    for path in (items_path, descriptors_path, interactions_path):
        Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(items_path, "w", encoding="utf-8") as fh:
        for item in corpus.items:
            fh.write(json.dumps(item_to_record(item), ensure_ascii=False) + "\n")
    with open(descriptors_path, "w", encoding="utf-8") as fh:
        for item in corpus.items:
            for descriptor in corpus.descriptors.get(item.id, DescriptorSet()):
                record = {
                    "item_id": item.id,
                    "type": descriptor.dtype.value,
                    "text": descriptor.display,
                }
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    with open(interactions_path, "w", encoding="utf-8") as fh:
        for interaction in corpus.interactions:
            record = {
                "user_id": interaction.user,
                "item_id": interaction.item,
                "weight": interaction.weight,
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def describe_corpus(corpus: Corpus) -> dict:
    """Small summary used by the CLI after generation."""
    return {
        "items": len(corpus.items),
        "users": len({i.user for i in corpus.interactions}),
        "interactions": len(corpus.interactions),
        "descriptor_rows": sum(len(d) for d in corpus.descriptors.values()),
    }
