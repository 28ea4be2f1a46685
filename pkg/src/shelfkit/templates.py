"""Shelf title templates: slot-filling over typed descriptors, plus decoration."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .catalog import Descriptor, DescriptorSet, DescriptorType, canonicalize
from .errors import DataError

MAX_TEMPLATE_SLOTS = 2


@dataclass(frozen=True)
class TemplateSpec:
    """A title pattern: one or two descriptor-type slots joined by ``joiner``.

    ``suffix`` (e.g. " Audiobooks") is applied at decoration time, not when
    candidates are assembled.
    """

    slots: tuple[DescriptorType, ...]
    joiner: str = " "
    suffix: str = ""

    def __post_init__(self) -> None:
        slots = tuple(DescriptorType(s) for s in self.slots)
        if not 1 <= len(slots) <= MAX_TEMPLATE_SLOTS:
            raise ValueError(f"template must have 1..{MAX_TEMPLATE_SLOTS} slots, got {len(slots)}")
        object.__setattr__(self, "slots", slots)


@dataclass(frozen=True)
class TitleCandidate:
    """A candidate shelf title assembled from one descriptor per template slot."""

    display: str
    source: tuple[Descriptor, ...]
    template: TemplateSpec

    def __post_init__(self) -> None:
        if not self.display:
            raise ValueError("title candidate display must be non-empty")
        if len(self.source) != len(self.template.slots):
            raise ValueError("source arity does not match template slots")
        for descriptor, slot in zip(self.source, self.template.slots):
            if descriptor.dtype is not slot:
                raise ValueError(f"slot expects {slot.value}, got {descriptor.dtype.value}")


def assemble(template: TemplateSpec, descriptors: Sequence[Descriptor]) -> TitleCandidate:
    display = template.joiner.join(d.display for d in descriptors)
    return TitleCandidate(display=display, source=tuple(descriptors), template=template)


def expand_titles(dset: DescriptorSet, templates: Iterable[TemplateSpec]) -> list[TitleCandidate]:
    """All title candidates an item's descriptors can fill.

    For each template, the Cartesian product of the item's descriptors of the
    slot types, in template order then descriptor list order. Candidates are
    deduplicated on the canonicalized display, keeping the first occurrence.
    """
    out: list[TitleCandidate] = []
    seen: set[str] = set()
    for template in templates:
        if len(template.slots) == 1:
            combos = [(d,) for d in dset.of_type(template.slots[0])]
        else:
            first, second = template.slots
            combos = [(a, b) for a in dset.of_type(first) for b in dset.of_type(second)]
        for combo in combos:
            candidate = assemble(template, combo)
            key = canonicalize(candidate.display)
            if key in seen:
                continue
            seen.add(key)
            out.append(candidate)
    return out


@dataclass(frozen=True)
class DecorationConfig:
    header: str = "Audiobooks for you"
    max_title_chars: int = 40

    def __post_init__(self) -> None:
        if self.max_title_chars < 8:
            raise ValueError(f"max_title_chars must be >= 8, got {self.max_title_chars}")


@dataclass(frozen=True)
class DecoratedTitle:
    header: str
    display: str


def decorate(candidate: TitleCandidate, cfg: DecorationConfig) -> DecoratedTitle | None:
    """Apply the template suffix and attach the header.

    Returns None (rejection, not an error) when the suffixed display exceeds
    the character limit.
    """
    display = candidate.display + candidate.template.suffix
    if len(display) > cfg.max_title_chars:
        return None
    return DecoratedTitle(header=cfg.header, display=display)


def default_templates() -> list[TemplateSpec]:
    """Shipped default template set; production sets are configuration."""
    return [
        TemplateSpec(slots=(DescriptorType.Mood, DescriptorType.Genre)),
        TemplateSpec(slots=(DescriptorType.Theme,)),
        TemplateSpec(slots=(DescriptorType.StoryTrope,)),
        TemplateSpec(slots=(DescriptorType.PersonalSituation,)),
        TemplateSpec(slots=(DescriptorType.Setting,)),
        TemplateSpec(slots=(DescriptorType.Objective,)),
    ]


def load_templates(path: str | Path) -> list[TemplateSpec]:
    """Read a JSON array of {"slots": [...], "joiner": ..., "suffix": ...}."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc.msg})") from None
    if not isinstance(raw, list):
        raise DataError(f"{path}: expected a JSON array of template objects")
    templates: list[TemplateSpec] = []
    for index, entry in enumerate(raw):
        if not isinstance(entry, dict) or "slots" in entry and not isinstance(entry["slots"], list):
            raise DataError(f"{path}: template #{index} must be an object with a 'slots' array")
        try:
            slots = tuple(DescriptorType(s) for s in entry.get("slots", []))
            templates.append(
                TemplateSpec(
                    slots=slots,
                    joiner=str(entry.get("joiner", " ")),
                    suffix=str(entry.get("suffix", "")),
                )
            )
        except ValueError as exc:
            raise DataError(f"{path}: template #{index}: {exc}") from None
    return templates
