"""
Sampling plan for equivalent-mutant labeling.

Cochran's formula with finite-population correction:

    n0 = z^2 * p * (1 - p) / e^2          (unrounded; 384.16 at 95% / 5%)
    n  = ceil(n0 / (1 + (n0 - 1) / N))    capped at N

Example Usage:
    >>> from mutforge.metrics.sampling import sample_size
    >>> sample_size(351_332)
    384
    >>> sample_size(225)
    143
"""

import math
from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from mutforge.errors import MetricError

Z_SCORES: dict[float, float] = {0.90: 1.645, 0.95: 1.96, 0.99: 2.576}
DEFAULT_CONFIDENCE = 0.95
DEFAULT_MARGIN = 0.05
DEFAULT_P = 0.5


def z_score(confidence: float) -> float:
    for level, z in Z_SCORES.items():
        if math.isclose(confidence, level):
            return z
    raise MetricError(f"confidence must be one of {sorted(Z_SCORES)}, got {confidence}")


def sample_size(
    population: int,
    confidence: float = DEFAULT_CONFIDENCE,
    margin: float = DEFAULT_MARGIN,
    p: float = DEFAULT_P,
) -> int:
    """
    Sample size for estimating a proportion.

    Raises:
        MetricError: On an unknown confidence level, a margin or proportion
            outside (0, 1), or a population below 1.
    """
    if population < 1:
        raise MetricError(f"population must be >= 1, got {population}")
    if not 0 < margin < 1:
        raise MetricError(f"margin must lie in (0, 1), got {margin}")
    if not 0 < p < 1:
        raise MetricError(f"assumed proportion must lie in (0, 1), got {p}")
    z = z_score(confidence)
    n0 = z * z * p * (1 - p) / (margin * margin)
    n = math.ceil(n0 / (1 + (n0 - 1) / population))
    return min(n, population)


class SamplingPlan(BaseModel):
    """
    Attributes:
        population: N.
        confidence: 0.90, 0.95 or 0.99.
        margin: e.
        p: Assumed proportion.
        n: Computed sample size.
        seed: Seed for drawing the sample.
    """

    model_config = ConfigDict(frozen=True)

    population: int = Field(..., ge=1)
    confidence: float = DEFAULT_CONFIDENCE
    margin: float = DEFAULT_MARGIN
    p: float = DEFAULT_P
    n: int = 0
    seed: int = 0

    @model_validator(mode="after")
    def validate_size(self) -> "SamplingPlan":
        if not 1 <= self.n <= self.population:
            raise ValueError(f"SAMPLING_PLAN: n must lie in [1, {self.population}], got {self.n}")
        return self

    @classmethod
    def for_population(
        cls,
        population: int,
        confidence: float = DEFAULT_CONFIDENCE,
        margin: float = DEFAULT_MARGIN,
        seed: int = 0,
        p: float = DEFAULT_P,
    ) -> "SamplingPlan":
        return cls(
            population=population,
            confidence=confidence,
            margin=margin,
            p=p,
            n=sample_size(population, confidence, margin, p),
            seed=seed,
        )

    def draw(self, ids: Sequence[str]) -> list[str]:
        """Seeded uniform sample of ``n`` ids, kept in their input order."""
        if len(ids) != self.population:
            raise MetricError(f"plan is for {self.population} items, got {len(ids)}")
        rng = np.random.default_rng(self.seed % (2**32))
        chosen = np.sort(rng.choice(len(ids), size=self.n, replace=False))
        return [ids[int(i)] for i in chosen]
