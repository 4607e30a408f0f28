"""
Pytest test suite for report contract validation.

A small rule-only experiment provides a report and manifest that close;
each test breaks one number and expects the matching contract to flag it.
"""

import copy
import json

import pytest

from mutforge.config import bundled_bugs_dir, validate_config
from mutforge.study.experiment import run_experiment
from mutforge.validation.contracts import ReportValidator


@pytest.fixture(scope="module")
def bundle():
    cfg = validate_config(
        {
            "bugs_dir": str(bundled_bugs_dir()),
            "bugs": ["bug-001", "bug-002"],
            "generators": [{"id": "rule", "kind": "rule"}],
            "subsample_rounds": 2,
        }
    )
    outcome = run_experiment(cfg, write=False)
    report = json.loads(json.dumps(outcome.report))
    manifest = json.loads(outcome.manifest.model_dump_json())
    return report, manifest


@pytest.fixture
def report(bundle):
    return copy.deepcopy(bundle[0])


@pytest.fixture
def manifest(bundle):
    return copy.deepcopy(bundle[1])


def rule_counts(manifest, bug_id="bug-002"):
    return manifest["cells"][bug_id]["rule"]["counts"]


class TestReportValidator:
    """Tests for ReportValidator.validate_closure."""

    @pytest.mark.smoke
    def test_experiment_report_closes(self, report, manifest):
        is_valid, errors = ReportValidator().validate_closure(report, manifest)

        assert is_valid is True, f"A freshly built report should close, got: {errors}"
        assert errors == [], f"Should have no errors, got: {errors}"

    def test_missing_section(self, report, manifest):
        del report["subsample"]

        is_valid, errors = ReportValidator().validate_closure(report, manifest)

        assert is_valid is False, "A report without its subsample section is incomplete"
        assert len(errors) == 1 and "REQUIRED_SECTIONS" in errors[0], (
            f"Only the section check should run, got: {errors}"
        )

    def test_set_algebra_violation(self, report, manifest):
        counts = rule_counts(manifest)
        counts["useless"] = counts["compilable"] + 1

        _, errors = ReportValidator().validate_closure(report, manifest)

        assert any("SET_ALGEBRA" in err for err in errors), f"Should flag U > C, got: {errors}"

    def test_count_closure_violation(self, report, manifest):
        report["generators"]["rule"]["mutation_count"] += 1

        _, errors = ReportValidator().validate_closure(report, manifest)

        assert any("COUNT_CLOSURE" in err and "mutation_count" in err for err in errors), (
            f"Should flag the mutation count, got: {errors}"
        )

    def test_ratio_closure_violation(self, report, manifest):
        usability = report["generators"]["rule"]["usability"]
        usability["cr"] = usability["cr"] / 2

        _, errors = ReportValidator().validate_closure(report, manifest)

        assert any("RATIO_CLOSURE" in err and "usability.cr" in err for err in errors), (
            f"Should flag CR, got: {errors}"
        )

    def test_ratio_closure_is_tight(self, report, manifest):
        score = report["generators"]["rule"]["behavior"]["mutation_score"]
        report["generators"]["rule"]["behavior"]["mutation_score"] = score + 1e-9

        _, errors = ReportValidator().validate_closure(report, manifest)

        assert any("mutation_score" in err for err in errors), "A drift of 1e-9 is not rounding"

    def test_distribution_closure_violation(self, report, manifest):
        counts = rule_counts(manifest)
        counts["error_types"] = {**counts["error_types"], "Unclassified": counts["error_types"].get("Unclassified", 0) + 1}

        _, errors = ReportValidator().validate_closure(report, manifest)

        assert any("DISTRIBUTION_CLOSURE" in err for err in errors), (
            f"An extra error type breaks the tally, got: {errors}"
        )

    def test_cell_status_mismatch(self, report, manifest):
        report["cells"]["bug-002"]["rule"]["status"] = "failed"

        _, errors = ReportValidator().validate_closure(report, manifest)

        assert any("status differs" in err for err in errors), f"Should flag the cell status, got: {errors}"

    def test_cell_without_manifest_entry(self, report, manifest):
        del manifest["cells"]["bug-001"]

        _, errors = ReportValidator().validate_closure(report, manifest)

        assert any("no manifest entry" in err for err in errors), f"Should flag the orphan cell, got: {errors}"
