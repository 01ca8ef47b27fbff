"""Mutation-based evaluation harness for LLM code summaries."""

__version__ = "0.1.0"

from mutsum.corpus import ComplexityCategory, Origin, Program
from mutsum.mutation import LocationBucket, Mutant, MutationSite, MutationType
from mutsum.review import FailureMode, Label, Verdict
from mutsum.store import CampaignConfig, CampaignStore, Phase
from mutsum.summaries import ProviderConfig, SummaryRecord

__all__ = [
    "CampaignConfig",
    "CampaignStore",
    "ComplexityCategory",
    "FailureMode",
    "Label",
    "LocationBucket",
    "Mutant",
    "MutationSite",
    "MutationType",
    "Origin",
    "Phase",
    "Program",
    "ProviderConfig",
    "SummaryRecord",
    "Verdict",
    "__version__",
]
