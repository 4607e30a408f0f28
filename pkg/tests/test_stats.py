"""
Pytest test suite for correlation and agreement statistics.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from mutforge.errors import MetricError
from mutforge.metrics.stats import cohen_kappa, pearson, spearman


def exact_pearson(xs, ys):
    """Pearson with exact rational moments; only the final square root is rounded."""
    x = [Fraction(v) for v in xs]
    y = [Fraction(v) for v in ys]
    mx = sum(x, Fraction(0)) / len(x)
    my = sum(y, Fraction(0)) / len(y)
    sxy = sum(((a - mx) * (b - my) for a, b in zip(x, y, strict=True)), Fraction(0))
    sxx = sum(((a - mx) ** 2 for a in x), Fraction(0))
    syy = sum(((b - my) ** 2 for b in y), Fraction(0))
    return math.copysign(math.sqrt(sxy * sxy / (sxx * syy)), sxy)


def exact_ranks(values):
    return [
        Fraction(2 * sum(1 for w in values if w < v) + sum(1 for w in values if w == v) + 1, 2) for v in values
    ]


def random_pairs(count=100, seed=2024):
    """Seeded vector pairs; odd ones are small integers with ties."""
    rng = np.random.default_rng(seed)
    pairs = []
    for index in range(count):
        n = int(rng.integers(5, 40))
        if index % 2:
            xs = rng.integers(0, 10, size=n).tolist()
            ys = rng.integers(0, 10, size=n).tolist()
            xs[:2] = [0, 9]
            ys[:2] = [0, 9]
        else:
            xs = rng.normal(size=n).tolist()
            ys = (0.5 * np.asarray(xs) + rng.normal(size=n)).tolist()
        pairs.append((xs, ys))
    return pairs


class TestCorrelation:
    """Tests for pearson and spearman."""

    @pytest.mark.smoke
    def test_linear_relation(self):
        xs = [1.0, 2.0, 3.0, 4.0, 5.0]

        result = pearson(xs, [2 * x + 1 for x in xs], permutations=500)

        assert result.coefficient == pytest.approx(1.0), f"Exact linear relation, got {result.coefficient}"
        assert result.n == 5 and result.permutations == 500, "Sample size and permutations are reported"

    def test_decreasing_ranks(self):
        result = spearman([1, 2, 3, 4, 5], [50, 40, 10, 5, 1], permutations=0)

        assert result.coefficient == pytest.approx(-1.0), "Strictly decreasing is -1"
        assert math.isnan(result.p_value), "No permutations, no p-value"

    def test_rank_example(self):
        assert spearman([1, 2, 3, 4], [1, 3, 2, 4], permutations=0).coefficient == pytest.approx(0.8), (
            "1 - 6 * 2 / (4 * 15)"
        )

    def test_ties_share_ranks(self):
        result = spearman([1, 1, 2, 3], [1, 1, 2, 3], permutations=0)

        assert result.coefficient == pytest.approx(1.0), "Equal tied vectors still correlate perfectly"

    def test_p_value_is_seeded(self):
        xs = list(range(12))
        ys = [x + (1 if x % 3 else -2) for x in xs]

        first = pearson(xs, ys, permutations=2000, seed=5)
        second = pearson(xs, ys, permutations=2000, seed=5)

        assert first.p_value == second.p_value, "Same seed, same p-value"
        assert 0 < first.p_value < 0.01, f"Strong correlation should be significant, got {first.p_value}"

    def test_unrelated_vectors_are_not_significant(self):
        result = pearson([1, 2, 3, 4, 5, 6], [3, 1, 4, 1, 5, 2], permutations=2000, seed=1)

        assert result.p_value > 0.05, f"Weak correlation should not be significant, got {result.p_value}"

    def test_pearson_matches_exact_reference(self):
        for xs, ys in random_pairs():
            expected = exact_pearson(xs, ys)
            got = pearson(xs, ys, permutations=0).coefficient

            assert abs(got - expected) <= 1e-12, f"Pearson {got!r} differs from {expected!r} on n={len(xs)}"

    def test_spearman_matches_exact_reference(self):
        for xs, ys in random_pairs():
            expected = exact_pearson(exact_ranks(xs), exact_ranks(ys))
            got = spearman(xs, ys, permutations=0).coefficient

            assert abs(got - expected) <= 1e-12, f"Spearman {got!r} differs from {expected!r} on n={len(xs)}"

    @pytest.mark.parametrize("n", [3, 7, 50, 200])
    def test_monotone_vectors_are_exactly_one(self, n):
        xs = [float(i) for i in range(n)]
        rising = [math.exp(i / 10) for i in range(n)]
        falling = [-(i**3) for i in range(n)]

        assert spearman(xs, rising, permutations=0).coefficient == 1.0, "A strictly increasing map gives exactly 1"
        assert spearman(xs, falling, permutations=0).coefficient == -1.0, "A strictly decreasing map gives exactly -1"

    @pytest.mark.parametrize(
        ("xs", "ys"),
        [([1, 2], [1, 2]), ([1, 2, 3], [1, 2]), ([1, 1, 1], [1, 2, 3])],
    )
    def test_undefined(self, xs, ys):
        with pytest.raises(MetricError):
            pearson(xs, ys, permutations=0)


class TestKappa:
    """Tests for cohen_kappa."""

    @pytest.mark.smoke
    def test_identical_labels(self):
        labels = ["EQUIVALENT", "NONEQUIVALENT", "NONEQUIVALENT", "UNSURE"]

        assert cohen_kappa(labels, labels) == 1.0, "Identical labels with several categories give 1"

    def test_partial_agreement(self):
        a = ["E", "E", "N", "N", "N", "N"]
        b = ["E", "N", "N", "N", "N", "E"]
        # p_o = 4/6, p_e = (2*2 + 4*4) / 36 = 20/36
        expected = (4 / 6 - 20 / 36) / (1 - 20 / 36)

        assert cohen_kappa(a, b) == pytest.approx(expected), "Observed against chance agreement"

    def test_agreement_at_chance_is_zero(self):
        assert cohen_kappa(["E", "N", "N", "N"], ["N", "N", "N", "N"]) == 0.0, "p_o = p_e = 3/4 gives exactly 0"

    def test_systematic_disagreement_is_negative(self):
        assert cohen_kappa(["E", "N"], ["N", "E"]) == pytest.approx(-1.0), "Total disagreement"

    @pytest.mark.parametrize(
        ("a", "b"),
        [([], []), (["E"], ["E", "N"]), (["N", "N"], ["N", "N"])],
    )
    def test_undefined(self, a, b):
        with pytest.raises(MetricError):
            cohen_kappa(a, b)
