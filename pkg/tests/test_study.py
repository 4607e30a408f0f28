"""
Pytest test suite for the study pipeline: bug-case loading, target
extraction, compile-error taxonomy, generators and the experiment grid.
"""

import json
import math
import shutil
import time
from pathlib import Path

import pytest

from mutforge.config import BackendConfig, ClassifierRule, load_run_config, validate_config
from mutforge.errors import FixtureInvalidError, MetricError, TransportError
from mutforge.harness.execution import screen_records
from mutforge.harness.minilang import MiniLangAdapter
from mutforge.llmgen.backends import ChatBackend, StubBackend, request_mutations
from mutforge.llmgen.prompts import PromptRequest, PromptTemplateId, build_prompt
from mutforge.metrics.usability import usability
from mutforge.rulegen.operators import parse_operators
from mutforge.schemas.bug_case import ProjectSnapshot
from mutforge.schemas.location import SourceLocation
from mutforge.schemas.mutation import Diagnostic, MutantStatus, StatusKind, TokenUsage
from mutforge.study.analysis import (
    changed_span,
    equal_count_subsample,
    origin_node,
    origin_node_counts,
    origin_node_distribution,
)
from mutforge.study.context import extract_target, window_lines
from mutforge.study.experiment import CellCounts, run_experiment, sum_counts
from mutforge.study.fixtures import discover_bug_cases, load_bug_case
from mutforge.study.generators import LlmGenerator, RuleGenerator, build_generators, split_usage
from mutforge.study.reporting import load_report
from mutforge.study.taxonomy import ErrorType, classify_compile_error, compile_rules, error_type_counts
from mutforge.syntax.parser import parse_mini
from mutforge.syntax.tree import NodeKind
from mutforge.validation.classifier import classify
from mutforge.validation.contracts import ReportValidator

COUPON_LINE = "    return base - discount(base, coupon);"
EXAMPLE_CONFIG = Path(__file__).parent.parent / "config" / "run.example.toml"


@pytest.fixture
def pricing(load_bug):
    return load_bug("bug-001")


@pytest.fixture
def bug_copy(bugs_dir, tmp_path):
    """Writable copy of bug-001."""
    target = tmp_path / "bug-001"
    shutil.copytree(bugs_dir / "bug-001", target)
    return target


def grid_config(bugs_dir, out_dir, bugs=("bug-001", "bug-002"), **fields):
    data = {
        "bugs_dir": str(bugs_dir),
        "bugs": list(bugs),
        "backends": [{"id": "stub", "kind": "stub", "seed": 3}],
        "generators": [
            {"id": "rule", "kind": "rule"},
            {"id": "stub-p1", "kind": "llm", "backend": "stub", "prompt": "P1"},
        ],
        "out_dir": str(out_dir),
        "seed": 11,
        "subsample_rounds": 3,
    }
    data.update(fields)
    return validate_config(data)


class FailingBackend(ChatBackend):
    """Backend whose provider is always down."""

    def _complete(self, prompt):
        raise TransportError("backend unreachable after 1 attempt(s)", backend=self.id)


def without_cost(report):
    trimmed = json.loads(json.dumps(report))
    for section in trimmed["generators"].values():
        section.pop("cost", None)
    return json.dumps(trimmed, sort_keys=True)


def without_wall_times(text):
    report = json.loads(text)
    for section in report["generators"].values():
        for key in ("agt", "wall_time"):
            (section.get("cost") or {}).pop(key, None)
    return json.dumps(report, indent=2, sort_keys=True)


class TestBugCases:
    """Tests for load_bug_case and discover_bug_cases."""

    @pytest.mark.smoke
    def test_bundled_case_validates(self, bugs_dir, tmp_path):
        bug = load_bug_case(bugs_dir / "bug-001", work_dir=tmp_path)

        assert bug.id == "bug-001", "Id defaults to the directory name"
        assert bug.triggering_tests == {"test_total_applies_coupon", "test_total_caps_coupon"}, (
            "Triggering tests come from bug.json"
        )
        assert bug.bug_location.line_start == 15, "Location comes from bug.json"

    def test_discovery_is_sorted(self, bugs_dir):
        names = [p.name for p in discover_bug_cases(bugs_dir)]

        assert names == sorted(names), "Bug cases are listed by name"
        assert names[:2] == ["bug-001", "bug-002"], f"Bundled cases should be found, got {names}"

    def test_missing_part_rejected(self, bug_copy):
        shutil.rmtree(bug_copy / "buggy")

        with pytest.raises(FixtureInvalidError, match="no buggy/ directory"):
            load_bug_case(bug_copy)

    def test_triggering_test_passing_on_buggy_rejected(self, bug_copy, tmp_path):
        shutil.copy(bug_copy / "fixed" / "pricing.mini", bug_copy / "buggy" / "pricing.mini")

        with pytest.raises(FixtureInvalidError, match="pass on the buggy version"):
            load_bug_case(bug_copy, work_dir=tmp_path)

    def test_location_past_end_rejected(self, bug_copy):
        descriptor = json.loads((bug_copy / "bug.json").read_text(encoding="utf-8"))
        descriptor["location"] = {"file": "pricing.mini", "line_start": 99, "line_end": 99}
        (bug_copy / "bug.json").write_text(json.dumps(descriptor), encoding="utf-8")

        with pytest.raises(FixtureInvalidError, match="past the end"):
            load_bug_case(bug_copy, validate=False)

    def test_malformed_descriptor_rejected(self, bug_copy):
        (bug_copy / "bug.json").write_text("{not json", encoding="utf-8")

        with pytest.raises(FixtureInvalidError):
            load_bug_case(bug_copy, validate=False)


class TestTaxonomy:
    """Tests for compile-error classification."""

    @pytest.mark.smoke
    @pytest.mark.parametrize(
        ("kind", "message", "expected"),
        [
            ("parse-error", "expected ';'", ErrorType.STRUCTURAL_DESTRUCTION),
            ("unknown-function", "no function 'gcheck'", ErrorType.UNKNOWN_METHOD),
            ("arity", "'total' takes 3 arguments", ErrorType.INCORRECT_METHOD_PARAMETERS),
            ("javac", "cannot find symbol\n  symbol:   method foo(int)", ErrorType.UNKNOWN_METHOD),
            ("javac", "cannot find symbol\n  symbol:   variable x", ErrorType.UNKNOWN_VARIABLE),
            ("javac", "incompatible types: String cannot be converted to int", ErrorType.TYPE_MISMATCH),
            ("javac", "unreported exception IOException", ErrorType.INCORRECT_EXCEPTIONS),
            ("javac", "something new", ErrorType.UNCLASSIFIED),
        ],
    )
    def test_builtin_rules(self, kind, message, expected):
        assert classify_compile_error([Diagnostic(kind=kind, message=message)]) is expected, (
            f"{kind}: {message!r} should be {expected}"
        )

    def test_rule_order_beats_diagnostic_order(self):
        diagnostics = [
            Diagnostic(kind="arity", message="wrong argument count"),
            Diagnostic(kind="unknown-function", message="no function 'g'"),
        ]

        assert classify_compile_error(diagnostics) is ErrorType.UNKNOWN_METHOD, (
            "The first matching rule wins, whichever diagnostic it matches"
        )

    def test_no_diagnostics_is_unclassified(self):
        assert classify_compile_error([]) is ErrorType.UNCLASSIFIED, "Nothing to match"

    def test_configured_rules_come_first(self):
        rules = compile_rules([ClassifierRule(pattern="cannot find symbol", error_type="UnknownType")])
        diagnostic = Diagnostic(kind="javac", message="cannot find symbol\n  symbol:   variable x")

        assert classify_compile_error([diagnostic], rules) is ErrorType.UNKNOWN_TYPE, (
            "A configured rule overrides the built-in table"
        )

    def test_counts_only_noncompilable(self, make_record):
        records = [
            make_record("m1", "a", "b", status=MutantStatus.non_compilable([Diagnostic(kind="parse-error", message="x")])),
            make_record("m2", "a", "c", status=MutantStatus.non_compilable([Diagnostic(kind="parse-error", message="y")])),
            make_record("m3", "a", "d", status=MutantStatus.non_compilable([Diagnostic(kind="type-error", message="z")])),
            make_record("m4", "a", "e", status=MutantStatus.viable()),
        ]

        assert error_type_counts(records) == {"StructuralDestruction": 2, "TypeMismatch": 1}, (
            "Viable records carry no diagnostics"
        )


class TestTargetWindow:
    """Tests for window_lines and extract_target."""

    @pytest.mark.parametrize(
        ("args", "expected"),
        [
            ((5, 5, 3, 1, 10), (4, 6)),
            ((5, 5, 2, 1, 10), (5, 6)),
            ((5, 5, 1, 1, 10), (5, 5)),
            ((5, 6, 3, 1, 10), (4, 7)),
            ((15, 15, 3, 14, 15), (14, 15)),
            ((1, 1, 3, 2, 10), (1, 2)),
        ],
    )
    def test_window_lines(self, args, expected):
        assert window_lines(*args) == expected, f"window_lines{args}"

    @pytest.mark.smoke
    def test_window_is_clipped_to_function_body(self, pricing):
        window = extract_target(pricing, 3)

        assert (window.location.line_start, window.location.line_end) == (14, 15), (
            "The closing brace is outside the body"
        )
        assert window.target == "    let base = subtotal(price, qty);\n" + COUPON_LINE, "Target is the window text"
        assert window.function_name == "total" and window.tree, "MiniLang windows carry a function"
        assert window.enclosing_function.startswith("fn total(") and window.enclosing_function.endswith("}"), (
            "Enclosing function is the whole declaration"
        )

    def test_unit_tests_are_the_callers(self, pricing):
        tests = extract_target(pricing, 3).unit_tests

        assert "test_total_applies_coupon" in tests and "test_total_caps_coupon" in tests, "Callers are included"
        assert "test_subtotal" not in tests, "subtotal( is not a call of total"

    def test_single_line_window(self, pricing):
        window = extract_target(pricing, 1)

        assert window.target == COUPON_LINE, "One line is the bug line itself"


class TestAnalysis:
    """Tests for origin nodes and subsampling."""

    @pytest.mark.parametrize(
        ("original", "mutated", "expected"),
        [
            ("a + b", "a - b", (2, 3)),
            ("ab", "aXb", (1, 2)),
            ("ab", "abc", (1, 2)),
            ("return x;", ";", (0, 8)),
        ],
    )
    def test_changed_span(self, original, mutated, expected):
        assert changed_span(original, mutated) == expected, f"{original!r} -> {mutated!r}"

    def test_origin_node_of_dropped_call(self, pricing, make_record):
        tree = parse_mini(pricing.fixed_source.read("pricing.mini"))
        record = make_record("m1", COUPON_LINE, "    return base - ;", line=15, file="pricing.mini")

        assert origin_node(record, tree) is NodeKind.METHOD_INVOCATION, "The removed text is the call"

    def test_origin_node_of_flipped_operator(self, pricing, make_record):
        tree = parse_mini(pricing.fixed_source.read("pricing.mini"))
        record = make_record("m1", COUPON_LINE, COUPON_LINE.replace("-", "*"), line=15, file="pricing.mini")

        assert origin_node(record, tree) is NodeKind.BINARY_OPERATION, "Operators belong to their binary node"

    def test_origin_node_distribution(self, pricing, make_record, make_pool):
        broken = MutantStatus.non_compilable([Diagnostic(kind="parse-error", message="expected expression")])
        records = [
            make_record("m1", COUPON_LINE, "    return base - ;", line=15, file="pricing.mini").with_status(broken),
            make_record("m2", COUPON_LINE, COUPON_LINE.replace("-", "*"), line=15, file="pricing.mini").with_status(
                broken
            ),
            make_record("m3", COUPON_LINE, "    return base;", line=15, file="pricing.mini").with_status(
                MutantStatus.viable()
            ),
            make_record("m4", "x", "y", line=1, file="Other.java").with_status(broken),
        ]

        shares = origin_node_distribution(make_pool(records), pricing.fixed_source.read)

        assert shares == {"BinaryOperation": 0.5, "MethodInvocation": 0.5}, (
            f"Only parseable NonCompilable records are tallied, got {shares}"
        )

    def test_equal_count_subsample(self, make_record, make_pool):
        big = make_pool([make_record(f"b{i}", "a", f"b{i}") for i in range(10)], generator_id="big")
        small = make_pool([make_record(f"s{i}", "a", f"s{i}") for i in range(4)], generator_id="small")

        first = equal_count_subsample([big, small], seed=1)
        second = equal_count_subsample([big, small], seed=1)

        assert [len(p.records) for p in first] == [4, 4], "Every subset has the smallest pool's size"
        assert first == second, "Same seed, same subsets"
        ids = [r.id for r in first[0].records]
        assert ids == sorted(ids, key=lambda i: int(i[1:])), "Subsets keep the pool's record order"
        assert first[1].records == small.records, "The smallest pool is kept whole"

    def test_empty_pool_cannot_be_subsampled(self, make_record, make_pool):
        with pytest.raises(MetricError):
            equal_count_subsample([make_pool([make_record("m1", "a", "b")]), make_pool([], generator_id="e")], 0)


class TestGenerators:
    """Tests for rule and LLM generators."""

    def test_split_usage_sums_back(self):
        parts = split_usage(TokenUsage(prompt_tokens=10, completion_tokens=7), 3)

        assert [p.prompt_tokens for p in parts] == [4, 3, 3], "First records take the remainder"
        assert [p.completion_tokens for p in parts] == [3, 2, 2], "Completion tokens split the same way"

    @pytest.mark.smoke
    def test_rule_generator(self, pricing):
        window = extract_target(pricing, 3)
        pool = RuleGenerator("rule", parse_operators(["AOR", "ROR"])).generate(pricing, window)

        assert pool.records, "The window holds operators to mutate"
        assert all(r.id.startswith("bug-001/rule/") for r in pool.records), "Ids are <bug>/<generator>/<n>"
        assert all(14 <= r.location.line_start and r.location.line_end <= 15 for r in pool.records), (
            "Rule mutants stay inside the window"
        )
        assert pool.generations[0].candidates == len(pool.records), "Summary counts every record"

    def test_llm_generator_with_stub(self, pricing):
        backend = StubBackend(BackendConfig(id="stub", kind="stub", seed=2))
        window = extract_target(pricing, 3)
        pool = LlmGenerator("stub-p1", backend, PromptTemplateId("P1")).generate(pricing, window)
        lines = pricing.fixed_source.read("pricing.mini").split("\n")

        assert pool.records, "The stub always answers with code"
        assert pool.records[0].id == "bug-001/stub-p1/0001", "Ids are numbered from 1"
        assert {r.origin for r in pool.records} == {"stub:P1"}, "Origin is backend:template"
        for record in pool.records:
            span = "\n".join(lines[record.location.line_start - 1:record.location.line_end])
            assert record.original_text == span, f"{record.id} should quote the fixed source"
        usage = pool.generations[0].usage
        assert sum(r.token_usage.prompt_tokens for r in pool.records) == usage.prompt_tokens, (
            "Per-record tokens sum to the request"
        )

    def test_build_generators(self, bugs_dir, tmp_path):
        generators = build_generators(grid_config(bugs_dir, tmp_path))

        assert [type(g) for g in generators] == [RuleGenerator, LlmGenerator], "Column order follows the config"
        assert isinstance(generators[1].backend, StubBackend), "Stub descriptors build stub backends"

    def test_sum_counts_merges_tallies(self):
        total = sum_counts(
            [
                CellCounts(generated=3, ochiai_sum=0.5, error_types={"TypeMismatch": 1}),
                CellCounts(generated=2, ochiai_sum=0.25, error_types={"TypeMismatch": 2, "Unclassified": 1}),
            ]
        )

        assert total.generated == 5 and total.ochiai_sum == 0.75, "Fields add up"
        assert total.error_types == {"TypeMismatch": 3, "Unclassified": 1}, "Tallies merge key by key"


@pytest.mark.slow
class TestExperiment:
    """End-to-end runs over bundled bugs with offline generators."""

    @pytest.fixture(autouse=True)
    def clean_env(self, monkeypatch):
        monkeypatch.delenv("MUTFORGE_WORK_DIR", raising=False)
        monkeypatch.delenv("MUTFORGE_API_KEY", raising=False)

    def test_bundle_closes_over_manifest(self, bugs_dir, tmp_path):
        out = tmp_path / "out"
        outcome = run_experiment(grid_config(bugs_dir, out))

        statuses = {c.manifest.status for c in outcome.cells}
        assert statuses == {"ok"}, f"Every cell should complete, got {statuses}"
        report = load_report(out)
        manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
        is_valid, errors = ReportValidator().validate_closure(report, manifest)
        assert is_valid, f"Report should recompute from the manifest: {errors}"
        for name in manifest["outputs"]:
            assert (out / name).is_file(), f"{name} is listed but missing"
        assert any(n.startswith("killmatrix-") for n in manifest["outputs"]), "Kill matrices are written"
        assert "report.json" in manifest["outputs"] and "summary.md" in manifest["outputs"], "Bundle files"
        assert report["subsample"]["status"] == "ok", "Both pools are non-empty"

    def test_rerun_is_deterministic(self, bugs_dir, tmp_path):
        first = run_experiment(grid_config(bugs_dir, tmp_path / "a"), write=False)
        second = run_experiment(grid_config(bugs_dir, tmp_path / "b", workers=4), write=False)

        assert without_cost(first.report) == without_cost(second.report), (
            "Only timing may differ between runs with the same seed"
        )

    def test_screening_uses_configured_workers(self, bugs_dir, tmp_path, monkeypatch):
        seen: list[int] = []

        def recording(*args, **kwargs):
            seen.append(kwargs["workers"])
            return screen_records(*args, **kwargs)

        monkeypatch.setattr("mutforge.study.experiment.screen_records", recording)
        run_experiment(grid_config(bugs_dir, tmp_path / "out", workers=3), write=False)

        assert seen, "Screening should run for every cell"
        assert set(seen) == {3}, f"Screening should get the configured worker count, got {seen}"

    def test_failing_generator_isolated(self, bugs_dir, tmp_path):
        cfg = grid_config(bugs_dir, tmp_path / "out")
        backends = {"stub": FailingBackend(cfg.backend("stub"))}

        outcome = run_experiment(cfg, backends=backends)

        cells = outcome.manifest.cells
        assert all(cells[b]["rule"].status == "ok" for b in ("bug-001", "bug-002")), "Rule cells are unaffected"
        assert all(cells[b]["stub-p1"].status == "failed" for b in ("bug-001", "bug-002")), "LLM cells fail"
        assert cells["bug-001"]["stub-p1"].error["error"] == "TRANSPORT", "The error code is recorded"
        assert outcome.report["generators"]["stub-p1"]["cells"] == {"ok": 0, "failed": 2}, "Failures are counted"
        manifest = json.loads(outcome.manifest.model_dump_json())
        assert ReportValidator().validate_closure(outcome.report, manifest)[0], "Partial reports still close"

    def test_missing_bug_fails_its_row(self, bugs_dir, tmp_path):
        cfg = grid_config(bugs_dir, tmp_path / "out", bugs=("bug-002", "bug-999"))

        outcome = run_experiment(cfg, write=False)

        row = outcome.manifest.cells["bug-999"]
        assert {c.status for c in row.values()} == {"failed"}, "Every cell of a broken bug fails"
        assert row["rule"].error["error"] == "FIXTURE_INVALID", "The loader's error is recorded"
        assert outcome.manifest.cells["bug-002"]["rule"].status == "ok", "Other bugs still run"


@pytest.fixture(scope="class")
def bundled_run(tmp_path_factory):
    """The example configuration over all bundled bugs, run twice."""
    out = tmp_path_factory.mktemp("bundle")
    with pytest.MonkeyPatch.context() as mp:
        mp.delenv("MUTFORGE_WORK_DIR", raising=False)
        mp.delenv("MUTFORGE_API_KEY", raising=False)
        started = time.perf_counter()
        outcome = run_experiment(load_run_config(EXAMPLE_CONFIG, out_dir=str(out / "first")))
        elapsed = time.perf_counter() - started
        run_experiment(load_run_config(EXAMPLE_CONFIG, out_dir=str(out / "second")))
    return outcome, elapsed, out


@pytest.mark.slow
class TestBundledCorpus:
    """Hermetic run of config/run.example.toml over the six bundled bugs."""

    def test_completes_in_time(self, bundled_run):
        outcome, elapsed, _ = bundled_run

        assert elapsed < 120, f"The hermetic run took {elapsed:.1f} s"
        assert len(outcome.cells) == 18, "Six bugs by three generators"
        assert {c.manifest.status for c in outcome.cells} == {"ok"}, "Every cell completes"

    def test_five_of_six_bugs_detected(self, bundled_run):
        outcome, _, _ = bundled_run

        for generator_id, section in outcome.report["generators"].items():
            behavior = section["behavior"]
            assert behavior["bugs_considered"] == 6, f"{generator_id} should see every bug"
            assert behavior["bugs_detected"] == 5, f"{generator_id} detected {behavior['bugs_detected']} bugs"
            assert behavior["rbd"] == pytest.approx(5 / 6), f"{generator_id} RBD is {behavior['rbd']}"
            assert outcome.report["cells"]["bug-004"][generator_id]["behavior"]["detected"] is False, (
                f"The argument swap stays hidden from {generator_id}"
            )

    def test_error_types_partition_noncompilable(self, bundled_run):
        outcome, _, _ = bundled_run

        for result in outcome.cells:
            failed = result.pool.with_kind(StatusKind.NON_COMPILABLE)
            assert all(r.status.diagnostics for r in failed), f"{result.bug_id}/{result.generator_id} lost diagnostics"
            counts = error_type_counts(failed)
            assert sum(counts.values()) == len(failed), "Each non-compilable record gets exactly one type"
        for generator_id, section in outcome.report["generators"].items():
            errors = section["errors"]
            if not errors["noncompilable"]:
                continue
            types = errors["types"]
            assert sum(t["count"] for t in types.values()) == errors["noncompilable"], f"{generator_id} counts"
            assert math.fsum(t["share"] for t in types.values()) == pytest.approx(1.0), f"{generator_id} shares"
            assert set(types) <= {e.value for e in ErrorType}, f"Unknown type names in {sorted(types)}"

    def test_stub_columns_produce_unknown_methods(self, bundled_run):
        outcome, _, _ = bundled_run

        for generator_id in ("stub-p1", "stub-p3"):
            types = outcome.report["generators"][generator_id]["errors"]["types"]
            assert types.get("UnknownMethod", {}).get("count", 0) > 0, (
                f"{generator_id} should inject calls to unknown functions, got {sorted(types)}"
            )

    def test_rerun_report_is_byte_identical(self, bundled_run):
        _, _, out = bundled_run
        first = (out / "first" / "report.json").read_text(encoding="utf-8")
        second = (out / "second" / "report.json").read_text(encoding="utf-8")

        assert without_wall_times(first) == without_wall_times(second), (
            "Only wall times may differ between runs with the same seed"
        )


@pytest.fixture
def churn_project(tmp_path):
    """A 100-line straight-line function, lines 6-105 of corpus.mini."""
    body = [f"    x = step(x) + {n};" for n in range(6, 106)]
    lines = ["fn step(v) {", "    return v;", "}", "", "fn churn(x) {", *body, "    return x;", "}"]
    (tmp_path / "src").mkdir()
    (tmp_path / "tests").mkdir()
    (tmp_path / "src" / "corpus.mini").write_text("\n".join(lines) + "\n", encoding="utf-8")
    snapshot = ProjectSnapshot(source_root=tmp_path / "src", tests_root=tmp_path / "tests")
    return snapshot, lines


class TestStubDefectMix:
    """The stub's screened pool over a 100-line target."""

    @pytest.fixture
    def screened(self, churn_project, make_record, make_pool, tmp_path):
        snapshot, lines = churn_project
        location = SourceLocation(file="corpus.mini", line_start=6, line_end=105)
        prompt = build_prompt(
            PromptRequest(template=PromptTemplateId.P3, target="\n".join(lines[5:105]), location=location, budget=100)
        )
        result = request_mutations(StubBackend(BackendConfig(id="stub", kind="stub", seed=0)), prompt, location)
        records = [
            make_record(f"m{i}", lines[loc.line_start - 1], code, line=loc.line_start, file="corpus.mini")
            for i, (loc, code) in enumerate(result.candidates, start=1)
        ]
        pool = make_pool(records, project_id="corpus")
        (tmp_path / "work").mkdir()
        results = screen_records(MiniLangAdapter(), snapshot, pool.records, workers=2, work_dir=tmp_path / "work")
        return classify(pool, results), snapshot

    def test_rates_stay_in_band(self, screened):
        pool, _ = screened

        report = usability(pool)

        assert report.generated == 100, f"One mutant per target line, got {report.generated}"
        assert 0.60 <= report.cr <= 0.80, f"CR {report.cr} is outside [0.60, 0.80]"
        assert 0.10 <= report.umr <= 0.20, f"UMR {report.umr} is outside [0.10, 0.20]"
        assert (report.cr, report.umr) == (0.75, 0.15), "Five full pattern cycles give 75 compilable and 15 useless"

    def test_unknown_functions_are_unknown_methods(self, screened):
        pool, _ = screened
        injected = [r for r in pool.records if "gstep(" in r.mutated_text]

        assert len(injected) == 15, f"Three U slots per 20 lines, got {len(injected)}"
        for record in injected:
            assert record.status_kind is StatusKind.NON_COMPILABLE, f"{record.id} should not compile"
            assert classify_compile_error(record.status.diagnostics) is ErrorType.UNKNOWN_METHOD, (
                f"{record.id} should be an UnknownMethod, got {record.status.diagnostics}"
            )

    def test_method_invocation_is_modal_origin(self, screened):
        pool, snapshot = screened

        counts = origin_node_counts(pool, snapshot.read)

        assert counts.most_common(1)[0][0] == NodeKind.METHOD_INVOCATION.value, f"Unexpected origins {counts}"
        assert counts == {"MethodInvocation": 15, "Assignment": 10}, f"Unexpected origins {counts}"
