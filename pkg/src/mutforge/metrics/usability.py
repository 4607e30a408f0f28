"""
Usability metrics.

    CR  = |C| / |A|
    UMR = |U| / |A|
    EMR = equivalent / n over the labeled sample (an estimate of |E| / |A|)
"""

import logging

from pydantic import BaseModel, ConfigDict, Field

from mutforge.errors import MetricError
from mutforge.metrics.labels import EquivalenceLabels
from mutforge.metrics.stats import cohen_kappa
from mutforge.schemas.mutation import MutationPool
from mutforge.validation.classifier import set_counts

logger = logging.getLogger(__name__)


class UsabilityReport(BaseModel):
    """
    Attributes:
        cr: Compilation rate.
        umr: Useless mutation rate.
        emr: Equivalent mutation rate estimate, None without labels.
        sample_size: Labeled mutants of this pool the estimate rests on.
        equivalent: Labeled-equivalent mutants in that sample.
        kappa: Cohen's kappa between two annotators, when there are exactly two.
        generated, compilable, useless, viable: |A|, |C|, |U| and |C - U|.
    """

    model_config = ConfigDict(frozen=True)

    cr: float = Field(..., ge=0.0, le=1.0)
    umr: float = Field(..., ge=0.0, le=1.0)
    emr: float | None = Field(default=None, ge=0.0, le=1.0)
    sample_size: int = 0
    equivalent: int = 0
    kappa: float | None = None
    generated: int
    compilable: int
    useless: int
    viable: int


def usability(pool: MutationPool, labels: EquivalenceLabels | None = None) -> UsabilityReport:
    """
    CR, UMR and the EMR estimate for a classified pool.

    Raises:
        MetricError: If the pool is empty.
        IntegrityError: If the pool is not classified.
    """
    generated, compilable, useless, viable = set_counts(pool)
    if generated == 0:
        raise MetricError("usability is undefined for an empty pool")

    emr: float | None = None
    sample = 0
    equivalent = 0
    kappa: float | None = None
    if labels is not None:
        ids = {r.id for r in pool.records}
        sampled = sorted(labels.labeled_ids() & ids)
        sample = len(sampled)
        equivalent = sum(1 for m in sampled if labels.is_equivalent(m))
        if sample:
            emr = equivalent / sample
        else:
            logger.warning(
                "No labeled mutant belongs to the pool",
                extra={"extra_fields": {"project": pool.project_id, "generator": pool.generator_id}},
            )
        if len(labels.annotators()) == 2:
            first, second = labels.paired()
            if first:
                try:
                    kappa = cohen_kappa(first, second)
                except MetricError as exc:
                    logger.warning(
                        "Annotator agreement undefined",
                        extra={"extra_fields": {"reason": exc.detail}},
                    )

    return UsabilityReport(
        cr=compilable / generated,
        umr=useless / generated,
        emr=emr,
        sample_size=sample,
        equivalent=equivalent,
        kappa=kappa,
        generated=generated,
        compilable=compilable,
        useless=useless,
        viable=viable,
    )
