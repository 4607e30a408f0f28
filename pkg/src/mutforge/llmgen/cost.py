"""
Cost metrics.

    AGT         = sum(wall time) / sum(candidates)               seconds per mutation
    USD per 1K  = 1000 * sum(token cost) / sum(candidates)
    token cost  = prompt_tokens / 1000 * price_prompt
                + completion_tokens / 1000 * price_completion

Totals are plain sums, so results can be folded in any order.
"""

from collections.abc import Iterable

from pydantic import BaseModel, ConfigDict

from mutforge.config import BackendConfig
from mutforge.errors import CostError
from mutforge.llmgen.backends import GenerationResult
from mutforge.schemas.mutation import GenerationSummary, TokenUsage


class CostReport(BaseModel):
    """
    Attributes:
        agt: Average generation time per mutation, seconds.
        usd_per_1k: Dollars per 1000 mutations.
        mutations: Candidates the totals are divided by.
        wall_time: Total seconds.
        usage: Total token usage.
    """

    model_config = ConfigDict(frozen=True)

    agt: float
    usd_per_1k: float
    mutations: int
    wall_time: float
    usage: TokenUsage


def token_cost(usage: TokenUsage, backend: BackendConfig) -> float:
    return (
        usage.prompt_tokens / 1000 * backend.price_prompt
        + usage.completion_tokens / 1000 * backend.price_completion
    )


def cost_of(
    results: Iterable[GenerationResult | GenerationSummary],
    backend: BackendConfig | None,
) -> CostReport:
    """
    AGT and dollars per 1K mutations over a batch of generations.

    Args:
        results: Backend answers or their pool summaries.
        backend: Price basis; None (rule generators) means zero price.

    Raises:
        CostError: If the batch produced no candidates.
    """
    summaries = [r.summary() if isinstance(r, GenerationResult) else r for r in results]
    mutations = sum(s.candidates for s in summaries)
    if mutations == 0:
        raise CostError("no candidates were produced, cost per mutation is undefined")
    wall_time = sum(s.wall_time for s in summaries)
    usage = sum((s.usage for s in summaries if s.usage is not None), TokenUsage())
    dollars = token_cost(usage, backend) if backend is not None else 0.0
    return CostReport(
        agt=wall_time / mutations,
        usd_per_1k=1000 * dollars / mutations,
        mutations=mutations,
        wall_time=wall_time,
        usage=usage,
    )
