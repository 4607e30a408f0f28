"""
Report contract validation for mutforge.

This module implements the report contracts defined in docs/contracts.md. A
report bundle is accepted only when every number in report.json recomputes
from the per-cell counts of manifest.json.

Contracts Implemented:
    - Contract 1: Required Sections
    - Contract 2: Set Algebra (U <= C <= A, |C| = |U| + viable)
    - Contract 3: Count Closure (report counts equal summed manifest counts)
    - Contract 4: Ratio Closure (every ratio equals its count quotient)
    - Contract 5: Distribution Closure (error-type and origin-node shares sum to 1)

Both inputs are plain dicts as loaded from the bundle's JSON files, so the
validator can audit bundles written by earlier runs.

Example Usage:
    >>> import json
    >>> from mutforge.validation.contracts import ReportValidator
    >>> report = json.loads(Path("out/report.json").read_text())
    >>> manifest = json.loads(Path("out/manifest.json").read_text())
    >>> is_valid, errors = ReportValidator().validate_closure(report, manifest)
"""

import logging
import math
from collections import Counter
from statistics import fmean
from typing import Any

logger = logging.getLogger(__name__)

REQUIRED_SECTIONS = ("format", "run", "generators", "cells", "subsample")
REL_TOL = 1e-12
ABS_TOL = 1e-15
SHARE_TOL = 1e-9
SUMMED_COUNTS = (
    "generated",
    "compilable",
    "useless",
    "viable",
    "noncompilable",
    "noncompilable_deletions",
    "executed",
    "killed",
    "coupled",
    "detected",
    "deletions",
    "diversity_base",
    "exact_matches",
    "bleu_count",
    "ast_distance_sum",
    "ast_distance_count",
)


def _quotient(numerator: float, denominator: float) -> float | None:
    return numerator / denominator if denominator else None


def _same(expected: Any, actual: Any) -> bool:
    if expected is None or actual is None:
        return expected is None and actual is None
    return math.isclose(float(expected), float(actual), rel_tol=REL_TOL, abs_tol=ABS_TOL)


class ReportValidator:
    """
    Validates a report tree against its run manifest.

    Every contract is checked independently and all violations are
    collected, in the manner of a data-contract validator.

    Example:
        >>> validator = ReportValidator()
        >>> is_valid, errors = validator.validate_closure(report, manifest)
        >>> for error in errors:
        ...     print(f"Contract violation: {error}")
    """

    def validate_closure(self, report: dict[str, Any], manifest: dict[str, Any]) -> tuple[bool, list[str]]:
        """
        Check that every reported number recomputes from the manifest counts.

        Args:
            report: Parsed report.json.
            manifest: Parsed manifest.json.

        Returns:
            Tuple of (is_valid, errors).
        """
        errors: list[str] = []

        # Contract 1: Required Sections
        errors.extend(self._check_required_sections(report))
        if errors:
            return self._finish(errors)

        cells: dict[str, dict[str, Any]] = manifest.get("cells", {})
        for generator_id, section in report["generators"].items():
            counts = [
                row[generator_id]["counts"]
                for row in cells.values()
                if generator_id in row and row[generator_id].get("status") == "ok"
            ]
            failed = sum(
                1 for row in cells.values() if generator_id in row and row[generator_id].get("status") != "ok"
            )
            prefix = f"generators.{generator_id}"

            # Contract 2: Set Algebra
            errors.extend(self._check_set_algebra(prefix, counts))

            # Contract 3: Count Closure
            errors.extend(self._check_counts(prefix, section, counts, failed))

            # Contract 4: Ratio Closure
            errors.extend(self._check_ratios(prefix, section, counts))

            # Contract 5: Distribution Closure
            errors.extend(self._check_distributions(prefix, section, counts))

        errors.extend(self._check_cells(report["cells"], cells))
        return self._finish(errors)

    def _finish(self, errors: list[str]) -> tuple[bool, list[str]]:
        is_valid = len(errors) == 0
        if not is_valid:
            logger.warning(
                "Report closure validation failed",
                extra={"extra_fields": {"error_count": len(errors), "errors": errors[:10]}},
            )
        return is_valid, errors

    def _check_required_sections(self, report: dict[str, Any]) -> list[str]:
        missing = [key for key in REQUIRED_SECTIONS if key not in report]
        if missing:
            return [f"REQUIRED_SECTIONS: report is missing {missing}"]
        return []

    def _check_set_algebra(self, prefix: str, counts: list[dict[str, Any]]) -> list[str]:
        errors: list[str] = []
        for c in counts:
            if not c["useless"] <= c["compilable"] <= c["generated"]:
                errors.append(f"SET_ALGEBRA: {prefix}: U <= C <= A violated ({c['useless']}, {c['compilable']}, {c['generated']})")
            if c["compilable"] != c["useless"] + c["viable"]:
                errors.append(f"SET_ALGEBRA: {prefix}: |C| != |U| + viable")
        return errors

    def _check_counts(
        self, prefix: str, section: dict[str, Any], counts: list[dict[str, Any]], failed: int
    ) -> list[str]:
        errors: list[str] = []
        total = {name: sum(c[name] for c in counts) for name in SUMMED_COUNTS}

        expected_cells = {"ok": len(counts), "failed": failed}
        if section.get("cells") != expected_cells:
            errors.append(f"COUNT_CLOSURE: {prefix}.cells is {section.get('cells')}, manifest gives {expected_cells}")
        if section.get("mutation_count") != total["generated"]:
            errors.append(f"COUNT_CLOSURE: {prefix}.mutation_count != sum of generated")

        usability = section.get("usability")
        if isinstance(usability, dict):
            for name in ("generated", "compilable", "useless", "viable"):
                if usability.get(name) != total[name]:
                    errors.append(f"COUNT_CLOSURE: {prefix}.usability.{name} != {total[name]}")
        elif total["generated"]:
            errors.append(f"COUNT_CLOSURE: {prefix}.usability missing for a non-empty pool")

        behavior = section.get("behavior")
        if isinstance(behavior, dict):
            expected = {
                "bugs_considered": len(counts),
                "bugs_detected": total["detected"],
                "executed": total["executed"],
                "killed": total["killed"],
                "coupled": total["coupled"],
            }
            for name, value in expected.items():
                if behavior.get(name) != value:
                    errors.append(f"COUNT_CLOSURE: {prefix}.behavior.{name} != {value}")

        syntactic = section.get("syntactic", {})
        for name in ("deletions", "diversity_base", "exact_matches"):
            if syntactic.get(name) != total[name]:
                errors.append(f"COUNT_CLOSURE: {prefix}.syntactic.{name} != {total[name]}")
        if syntactic.get("histogram") != dict(_merged(counts, "new_kinds")):
            errors.append(f"COUNT_CLOSURE: {prefix}.syntactic.histogram != merged manifest tallies")

        errors_section = section.get("errors", {})
        if errors_section.get("noncompilable") != total["noncompilable"]:
            errors.append(f"COUNT_CLOSURE: {prefix}.errors.noncompilable != {total['noncompilable']}")
        if errors_section.get("deletions") != total["noncompilable_deletions"]:
            errors.append(f"COUNT_CLOSURE: {prefix}.errors.deletions != {total['noncompilable_deletions']}")
        return errors

    def _check_ratios(self, prefix: str, section: dict[str, Any], counts: list[dict[str, Any]]) -> list[str]:
        errors: list[str] = []
        total = {name: sum(c[name] for c in counts) for name in SUMMED_COUNTS}
        expected: dict[str, float | None] = {}

        if isinstance(section.get("usability"), dict):
            expected["usability.cr"] = _quotient(total["compilable"], total["generated"])
            expected["usability.umr"] = _quotient(total["useless"], total["generated"])

        if isinstance(section.get("behavior"), dict):
            executed = [c for c in counts if c["executed"]]
            expected["behavior.rbd"] = _quotient(total["detected"], len(counts))
            expected["behavior.cpr_micro"] = _quotient(total["coupled"], total["executed"])
            expected["behavior.mutation_score"] = _quotient(total["killed"], total["executed"])
            expected["behavior.ochiai_micro"] = _quotient(
                math.fsum(c["ochiai_sum"] for c in counts), total["executed"]
            )
            expected["behavior.cpr_macro"] = (
                fmean(c["coupled"] / c["executed"] for c in executed) if executed else None
            )
            expected["behavior.ochiai_macro"] = (
                fmean(c["ochiai_sum"] / c["executed"] for c in executed) if executed else None
            )

        expected["syntactic.deletion_ratio"] = _quotient(total["deletions"], total["diversity_base"])
        expected["syntactic.bleu_mean"] = _quotient(math.fsum(c["bleu_sum"] for c in counts), total["bleu_count"])
        expected["syntactic.ast_distance_mean"] = _quotient(total["ast_distance_sum"], total["ast_distance_count"])
        expected["errors.deletion_share"] = _quotient(total["noncompilable_deletions"], total["noncompilable"])

        for path, value in expected.items():
            group, name = path.split(".")
            actual = section.get(group, {}).get(name)
            if not _same(value, actual):
                errors.append(f"RATIO_CLOSURE: {prefix}.{path} is {actual}, counts give {value}")

        histogram_total = sum(sum(c["new_kinds"].values()) for c in counts)
        for entry in section.get("syntactic", {}).get("top_kinds", []):
            if not _same(_quotient(entry["count"], histogram_total), entry["share"]):
                errors.append(f"RATIO_CLOSURE: {prefix}.syntactic.top_kinds[{entry['kind']}] share")
        return errors

    def _check_distributions(self, prefix: str, section: dict[str, Any], counts: list[dict[str, Any]]) -> list[str]:
        errors: list[str] = []
        errors_section = section.get("errors", {})
        for key, tally_name in (("types", "error_types"), ("origin_nodes", "origin_nodes")):
            merged = _merged(counts, tally_name)
            reported = errors_section.get(key, {})
            if {k: v["count"] for k, v in reported.items()} != dict(merged):
                errors.append(f"DISTRIBUTION_CLOSURE: {prefix}.errors.{key} counts != manifest tallies")
                continue
            total = sum(merged.values())
            for name, entry in reported.items():
                if not _same(entry["count"] / total, entry["share"]):
                    errors.append(f"DISTRIBUTION_CLOSURE: {prefix}.errors.{key}.{name} share")
            if reported and not math.isclose(math.fsum(v["share"] for v in reported.values()), 1.0, abs_tol=SHARE_TOL):
                errors.append(f"DISTRIBUTION_CLOSURE: {prefix}.errors.{key} shares do not sum to 1")
        if sum(_merged(counts, "error_types").values()) != sum(c["noncompilable"] for c in counts):
            errors.append(f"DISTRIBUTION_CLOSURE: {prefix}: not every non-compilable mutant has an error type")
        return errors

    def _check_cells(self, report_cells: dict[str, Any], manifest_cells: dict[str, Any]) -> list[str]:
        errors: list[str] = []
        for bug_id, row in report_cells.items():
            for generator_id, cell in row.items():
                entry = manifest_cells.get(bug_id, {}).get(generator_id)
                where = f"cells.{bug_id}.{generator_id}"
                if entry is None:
                    errors.append(f"COUNT_CLOSURE: {where} has no manifest entry")
                    continue
                if cell["status"] != entry["status"]:
                    errors.append(f"COUNT_CLOSURE: {where} status differs from the manifest")
                    continue
                if cell["status"] != "ok":
                    continue
                counts = entry["counts"]
                for name, value in cell["counts"].items():
                    if counts.get(name) != value:
                        errors.append(f"COUNT_CLOSURE: {where}.counts.{name} != {counts.get(name)}")
                if not _same(_quotient(counts["compilable"], counts["generated"]), cell["cr"]):
                    errors.append(f"RATIO_CLOSURE: {where}.cr")
                if not _same(_quotient(counts["useless"], counts["generated"]), cell["umr"]):
                    errors.append(f"RATIO_CLOSURE: {where}.umr")
        return errors


def _merged(counts: list[dict[str, Any]], name: str) -> Counter[str]:
    merged: Counter[str] = Counter()
    for c in counts:
        merged.update(c[name])
    return merged
