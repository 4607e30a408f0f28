"""
Quantitative metrics for mutation pools.

This module exports:
- sample_size, SamplingPlan: equivalence sampling plan
- EquivalenceLabels, read_labels, write_label_skeleton, apply_labels: label files
- UsabilityReport, usability: CR, UMR and the EMR estimate
- bleu, diversity, exact_match_count, syntactic_report: syntactic metrics
- ochiai, coupling_rate, real_bug_detectability, behavior_report: behavior metrics
- pearson, spearman, cohen_kappa: statistics helpers

Example:
    >>> from mutforge.metrics import sample_size, ochiai
    >>> sample_size(225)
    143
"""

from mutforge.metrics.behavior import (
    BehaviorReport,
    BugBehavior,
    behavior_report,
    bug_behavior,
    coupling_rate,
    is_coupled,
    is_detected,
    mean_ochiai,
    ochiai,
    real_bug_detectability,
)
from mutforge.metrics.labels import (
    EquivalenceLabel,
    EquivalenceLabels,
    apply_labels,
    read_labels,
    write_label_skeleton,
)
from mutforge.metrics.sampling import Z_SCORES, SamplingPlan, sample_size, z_score
from mutforge.metrics.stats import Correlation, cohen_kappa, pearson, spearman
from mutforge.metrics.syntactic import (
    DiversityReport,
    KindShare,
    MutationSyntax,
    SyntacticReport,
    bleu,
    diversity,
    exact_match_count,
    shifted_window,
    syntactic_report,
    top_kinds,
)
from mutforge.metrics.usability import UsabilityReport, usability

__all__ = [
    "BehaviorReport",
    "BugBehavior",
    "Correlation",
    "DiversityReport",
    "EquivalenceLabel",
    "EquivalenceLabels",
    "KindShare",
    "MutationSyntax",
    "SamplingPlan",
    "SyntacticReport",
    "UsabilityReport",
    "Z_SCORES",
    "apply_labels",
    "behavior_report",
    "bleu",
    "bug_behavior",
    "cohen_kappa",
    "coupling_rate",
    "diversity",
    "exact_match_count",
    "is_coupled",
    "is_detected",
    "mean_ochiai",
    "ochiai",
    "pearson",
    "read_labels",
    "real_bug_detectability",
    "sample_size",
    "shifted_window",
    "spearman",
    "syntactic_report",
    "top_kinds",
    "usability",
    "write_label_skeleton",
    "z_score",
]
