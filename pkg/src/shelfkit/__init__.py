"""shelfkit: personalized, diversified, titled recommendation shelves.

The library turns a catalog of audiobook-like items plus per-item typed
descriptors into per-user "descriptive shelf" pages, with a descriptor
extraction layer and an offline evaluation harness against a single generic
shelf baseline.
"""

from .affinity import (
    CandidateList,
    Interaction,
    UserId,
    UserProfile,
    build_candidate_lists,
    build_profile,
    item_content_embedding,
    top_k,
)
from .catalog import (
    Catalog,
    Descriptor,
    DescriptorSet,
    DescriptorType,
    Item,
    ItemId,
    canonicalize,
    cosine_similarity,
    embed_text,
    load_catalog,
)
from .errors import ConfigError, DataError, ExtractionError, LlmResponseError
from .evaluation import (
    ComparisonReport,
    EvalReport,
    ExposureLog,
    SlotBudget,
    baseline_page,
    compute_report,
    simulate_exposure,
)
from .extraction import (
    ExtractionBackendKind,
    GroundingReport,
    Lexicon,
    LexiconEntry,
    PromptSpec,
    build_prompt,
    extract_remote,
    extract_rule_based,
    parse_llm_response,
    validate_grounding,
)
from .shelfgen import (
    Shelf,
    ShelfConfig,
    ShelfPage,
    TitleScored,
    collect_title_candidates,
    diversify_titles,
    generate_page,
    populate_shelf,
    rank_titles,
)
from .synth import Corpus, CorpusSpec, build_corpus, write_corpus
from .templates import (
    DecorationConfig,
    TemplateSpec,
    TitleCandidate,
    decorate,
    default_templates,
    expand_titles,
)

__version__ = "0.1.0"

__all__ = [
    "CandidateList",
    "Catalog",
    "ComparisonReport",
    "ConfigError",
    "Corpus",
    "CorpusSpec",
    "DataError",
    "DecorationConfig",
    "Descriptor",
    "DescriptorSet",
    "DescriptorType",
    "EvalReport",
    "ExposureLog",
    "ExtractionBackendKind",
    "ExtractionError",
    "GroundingReport",
    "Interaction",
    "Item",
    "ItemId",
    "Lexicon",
    "LexiconEntry",
    "LlmResponseError",
    "PromptSpec",
    "Shelf",
    "ShelfConfig",
    "ShelfPage",
    "SlotBudget",
    "TemplateSpec",
    "TitleCandidate",
    "TitleScored",
    "UserId",
    "UserProfile",
    "baseline_page",
    "build_candidate_lists",
    "build_corpus",
    "build_profile",
    "build_prompt",
    "canonicalize",
    "collect_title_candidates",
    "compute_report",
    "cosine_similarity",
    "decorate",
    "default_templates",
    "diversify_titles",
    "embed_text",
    "expand_titles",
    "extract_remote",
    "extract_rule_based",
    "generate_page",
    "item_content_embedding",
    "load_catalog",
    "parse_llm_response",
    "populate_shelf",
    "rank_titles",
    "simulate_exposure",
    "top_k",
    "validate_grounding",
    "write_corpus",
]
