"""
Statistics helpers: Pearson, Spearman (Pearson on average ranks) with
seeded permutation p-values, and Cohen's kappa.
"""

import math
from collections import Counter
from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.stats import rankdata

from mutforge.errors import MetricError

DEFAULT_PERMUTATIONS = 10_000


class Correlation(BaseModel):
    """
    Attributes:
        coefficient: Correlation in [-1, 1].
        p_value: Two-sided permutation p-value, (hits + 1) / (permutations + 1).
        n: Sample size.
        permutations: Permutations drawn.
    """

    model_config = ConfigDict(frozen=True)

    coefficient: float
    p_value: float
    n: int
    permutations: int


def _vectors(xs: Sequence[float], ys: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    if len(xs) != len(ys):
        raise MetricError(f"vectors differ in length ({len(xs)} vs {len(ys)})")
    if len(xs) < 3:
        raise MetricError(f"correlation needs at least 3 pairs, got {len(xs)}")
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    return x, y


def _coefficient(x: np.ndarray, y: np.ndarray) -> float:
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise MetricError("correlation is undefined for a constant vector")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def _permutation_p(x: np.ndarray, y: np.ndarray, observed: float, permutations: int, seed: int) -> float:
    if permutations <= 0:
        return float("nan")
    rng = np.random.default_rng(seed % (2**32))
    shuffled = rng.permuted(np.tile(y, (permutations, 1)), axis=1)
    dx = x - x.mean()
    dy = shuffled - shuffled.mean(axis=1, keepdims=True)
    r = (dy @ dx) / np.sqrt(np.dot(dx, dx) * np.einsum("ij,ij->i", dy, dy))
    hits = int(np.count_nonzero(np.abs(r) >= abs(observed) - 1e-12))
    return (hits + 1) / (permutations + 1)


def pearson(
    xs: Sequence[float],
    ys: Sequence[float],
    permutations: int = DEFAULT_PERMUTATIONS,
    seed: int = 0,
) -> Correlation:
    """
    Pearson correlation.

    Raises:
        MetricError: On fewer than 3 pairs, unequal lengths or zero variance.
    """
    x, y = _vectors(xs, ys)
    r = _coefficient(x, y)
    return Correlation(
        coefficient=r,
        p_value=_permutation_p(x, y, r, permutations, seed),
        n=len(x),
        permutations=permutations,
    )


def spearman(
    xs: Sequence[float],
    ys: Sequence[float],
    permutations: int = DEFAULT_PERMUTATIONS,
    seed: int = 0,
) -> Correlation:
    """Spearman correlation: Pearson on average ranks (ties share their mean rank)."""
    x, y = _vectors(xs, ys)
    rx = rankdata(x, method="average")
    ry = rankdata(y, method="average")
    r = _coefficient(rx, ry)
    return Correlation(
        coefficient=r,
        p_value=_permutation_p(rx, ry, r, permutations, seed),
        n=len(x),
        permutations=permutations,
    )


def cohen_kappa(labels_a: Sequence[str], labels_b: Sequence[str]) -> float:
    """
    Cohen's kappa, (p_o - p_e) / (1 - p_e).

    Raises:
        MetricError: On empty or unequal inputs, or when chance agreement is 1.
    """
    if len(labels_a) != len(labels_b):
        raise MetricError(f"label vectors differ in length ({len(labels_a)} vs {len(labels_b)})")
    n = len(labels_a)
    if n == 0:
        raise MetricError("kappa needs at least one labeled item")
    observed = sum(1 for a, b in zip(labels_a, labels_b, strict=True) if a == b) / n
    count_a = Counter(labels_a)
    count_b = Counter(labels_b)
    expected = sum(count_a[c] * count_b[c] for c in count_a) / (n * n)
    if expected >= 1.0:
        raise MetricError("kappa is undefined when both annotators use a single identical category")
    return (observed - expected) / (1 - expected)
