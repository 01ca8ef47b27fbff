from mutsum.mutation.types import (
    LocationBucket,
    Mutant,
    MutationSite,
    MutationType,
)
from mutsum.mutation.engine import (
    OperatorApplyError,
    PlanResult,
    apply,
    bucket_of,
    enumerate_sites,
    generate_plan,
    site_candidates,
    uniform_quota,
)
from mutsum.mutation.smoke import RunnerConfig, SmokeOutcome, smoke_check

__all__ = [
    "LocationBucket",
    "Mutant",
    "MutationSite",
    "MutationType",
    "OperatorApplyError",
    "PlanResult",
    "RunnerConfig",
    "SmokeOutcome",
    "apply",
    "bucket_of",
    "enumerate_sites",
    "generate_plan",
    "site_candidates",
    "smoke_check",
    "uniform_quota",
]
