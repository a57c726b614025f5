import json

import pytest

from src.bridge import CoverageReport, ExternalEngine, MockEngine
from src.errors import CorruptLog, EngineNotFound, NoClockPort, ScriptExhausted
from src.forge import parse_annotation_set
from src.frontend import parse_module
from src.loop import (
    BatchStats, Booklog, ConvergenceStatus, Flow, FpvStats, IterationRecord, check_convergence, design_loop,
    export_json, export_table, refine_iteration, resume_plan, sva_flow, sync_ruleset_version,
)
from src.prompter import RULES_DIR, PromptKind
from src.rulebook import RuleSet, load_rules

from conftest import DESIGN, ENGINE, ISSUES, MOCK_GEN, SVA, read


def checkpoint(index: int, n_assertions: int, n_failing: int, compiled: bool = True,
               coverage: CoverageReport = None) -> IterationRecord:
    return IterationRecord(
        index=index,
        flow=Flow.Refine,
        batch_stats=BatchStats(n_assertions=n_assertions),
        fpv_stats=FpvStats(compiled=compiled, n_failing=n_failing if compiled else 0,
                           n_proven=n_assertions - n_failing if compiled else 0),
        coverage=coverage,
    )


@pytest.fixture
def annotation_rules():
    return load_rules(RULES_DIR / "annotation_gen.rules")


@pytest.fixture
def rtl_rules():
    return load_rules(RULES_DIR / "rtl_gen.rules")


class TestBooklog:

    def test_starts_empty(self, booklog):
        assert booklog.records() == []
        assert booklog.next_index() == 1

    def test_add_numbers_records(self, booklog):
        booklog.add(flow=Flow.Refine, notes="first")
        booklog.add(flow=Flow.Refine, notes="second")
        records = booklog.records()
        assert [r.index for r in records] == [1, 2]
        assert json.loads(booklog.path.read_text().splitlines()[0]) == {"schema": 1}

    def test_reopened_log_replays(self, booklog):
        booklog.append(checkpoint(1, 8, 1))
        assert Booklog(booklog.path).records() == booklog.records()

    def test_index_must_grow(self, booklog):
        booklog.append(checkpoint(3, 8, 1))
        with pytest.raises(CorruptLog):
            booklog.append(checkpoint(3, 8, 0))

    def test_bad_header(self, tmp_path):
        path = tmp_path / "log.jsonl"
        path.write_text('{"schema": 2}\n')
        with pytest.raises(CorruptLog, match="expected header"):
            Booklog(path).records()

    def test_unreadable_header(self, tmp_path):
        path = tmp_path / "log.jsonl"
        path.write_text("not json\n")
        with pytest.raises(CorruptLog):
            Booklog(path).records()

    def test_bad_record(self, booklog):
        booklog.add(flow=Flow.Refine)
        with booklog.path.open("a") as fh:
            fh.write('{"index": 2, "flow": "nowhere"}\n')
        with pytest.raises(CorruptLog, match=":3:"):
            booklog.records()

    def test_out_of_order_file(self, booklog):
        booklog.add(flow=Flow.Refine)
        with booklog.path.open("a") as fh:
            fh.write(checkpoint(1, 1, 0).model_dump_json() + "\n")
        with pytest.raises(CorruptLog, match="index 1 after 1"):
            booklog.records()


class TestExport:

    def test_table(self):
        records = [
            IterationRecord(index=1, flow=Flow.Refine, batch_stats=BatchStats(n_assertions=6),
                            lint_categories=["IN", "SY"]),
            IterationRecord(index=2, flow=Flow.Refine, batch_stats=BatchStats(n_assertions=5),
                            fpv_stats=FpvStats(compiled=False)),
            checkpoint(3, 8, 0),
        ]
        lines = export_table(records).splitlines()
        assert lines[0].split() == ["T", "Compile", "#Prop", "#Fail", "Issues"]
        assert set(lines[1]) <= {"-", " "}
        assert lines[2].split() == ["T1", "-", "6", "-", "IN,", "SY"]
        assert lines[3].split() == ["T2", "✗", "5", "-"]
        assert lines[4].split() == ["T3", "✓", "8", "0", "Full", "Proof"]

    def test_error_shows_in_issues(self):
        record = IterationRecord(index=1, flow=Flow.Sva, error="RateLimited: slow down")
        assert export_table([record]).splitlines()[2].endswith("RateLimited: slow down")

    def test_json(self):
        data = json.loads(export_json([checkpoint(1, 8, 2)]))
        assert data[0]["fpv_stats"] == {"compiled": True, "n_failing": 2, "n_proven": 6}
        assert data[0]["flow"] == "refine"


class TestConvergence:

    def test_running_without_fpv(self):
        state = check_convergence([IterationRecord(index=1, flow=Flow.Sva)])
        assert state.status == ConvergenceStatus.Running
        assert not state.converged

    def test_full_proof(self):
        state = check_convergence([checkpoint(1, 8, 2), checkpoint(2, 8, 0)])
        assert state.status == ConvergenceStatus.ConvergedFullProof
        assert state.converged

    def test_incomplete_coverage_blocks_full_proof(self):
        partial = CoverageReport(statement=0.9, toggle=1.0)
        state = check_convergence([checkpoint(1, 8, 0, coverage=partial)])
        assert state.status == ConvergenceStatus.Running
        full = CoverageReport(statement=1.0, toggle=1.0)
        assert check_convergence([checkpoint(1, 8, 0, coverage=full)]).reason.endswith("with full coverage")

    def test_plateau(self):
        state = check_convergence([checkpoint(1, 9, 3), checkpoint(2, 8, 1), checkpoint(3, 8, 1)])
        assert state.status == ConvergenceStatus.ConvergedPlateau
        assert state.reason == "8 assertions, 1 failing for 2 iterations"

    def test_plateau_needs_compiled_runs(self):
        state = check_convergence([checkpoint(1, 8, 0, compiled=False), checkpoint(2, 8, 0, compiled=False)])
        assert state.status == ConvergenceStatus.Running

    def test_wider_window(self):
        records = [checkpoint(1, 8, 1), checkpoint(2, 8, 1)]
        assert check_convergence(records, plateau_window=3).status == ConvergenceStatus.Running
        records.append(checkpoint(3, 8, 1))
        assert check_convergence(records, plateau_window=3).status == ConvergenceStatus.ConvergedPlateau

    def test_exhausted(self):
        state = check_convergence([checkpoint(1, 8, 3), checkpoint(2, 8, 2)], max_iters=2)
        assert state.status == ConvergenceStatus.Exhausted

    def test_replay_gives_same_state(self, booklog):
        for record in (checkpoint(1, 8, 3), checkpoint(2, 8, 1), checkpoint(3, 8, 1)):
            booklog.append(record)
        assert check_convergence(Booklog(booklog.path).records()) == check_convergence(booklog.records())


class TestRulesetSync:

    def recorded(self, rs: RuleSet, kind: str = PromptKind.SvaGen.value) -> IterationRecord:
        return IterationRecord(index=1, flow=Flow.Refine, ruleset_version=rs.version, rules_digest=rs.digest,
                               prompt_kind=kind)

    def test_unchanged_rules_keep_version(self, rules):
        assert sync_ruleset_version(rules, [self.recorded(rules)]).version == rules.version

    def test_edited_rules_are_bumped(self, rules):
        edited = RuleSet(rules=rules.rules[:-1], version=rules.version)
        assert sync_ruleset_version(edited, [self.recorded(rules)]).version == rules.version + 1

    def test_explicit_bump_is_kept(self, rules):
        edited = RuleSet(rules=rules.rules[:-1], version=7)
        assert sync_ruleset_version(edited, [self.recorded(rules)]).version == 7

    def test_other_prompt_kinds_are_ignored(self, rules, annotation_rules):
        history = [self.recorded(annotation_rules, PromptKind.AnnotationGen.value)]
        assert sync_ruleset_version(rules, history, PromptKind.SvaGen.value).version == rules.version


class TestRefine:

    def test_records_lint_results(self, fifo, rules, booklog, make_gateway):
        record = refine_iteration(fifo, rules, make_gateway([read(ISSUES / "t01_unprefixed_internal.sv")]),
                                  booklog)
        assert record.index == 1
        assert record.flow == Flow.Refine
        assert record.batch_stats == BatchStats(n_assertions=1, n_lint_errors=2)
        assert record.lint_categories == ["IN"]
        assert record.fpv_stats is None
        assert record.prompt_kind == "SvaGen"

    def test_with_engine(self, fifo, rules, booklog, make_gateway):
        engine = MockEngine.from_files([ENGINE / "t23_pass.txt"])
        record = refine_iteration(fifo, rules, make_gateway([read(SVA / "t23.sv")]), booklog, engine)
        assert record.fpv_stats == FpvStats(compiled=True, n_failing=0, n_proven=8)
        assert check_convergence(booklog.records()).status == ConvergenceStatus.ConvergedFullProof

    def test_rule_edit_bumps_version(self, fifo, rules, booklog, make_gateway):
        gateway = make_gateway([read(SVA / "t23.sv")] * 2)
        first = refine_iteration(fifo, rules, gateway, booklog)
        edited = RuleSet(rules=rules.rules[:-1], version=rules.version)
        second = refine_iteration(fifo, edited, gateway, booklog)
        assert (first.ruleset_version, second.ruleset_version) == (1, 2)
        assert first.prompt_digest != second.prompt_digest

    def test_gateway_error_is_recorded(self, fifo, rules, booklog, make_gateway):
        with pytest.raises(ScriptExhausted):
            refine_iteration(fifo, rules, make_gateway([]), booklog)
        [record] = booklog.records()
        assert record.error.startswith("ScriptExhausted:")
        assert record.completion_text == ""

    def test_engine_error_is_recorded(self, fifo, rules, booklog, make_gateway, tmp_path):
        engine = ExternalEngine(cmd="no-such-engine", work_root=tmp_path / "work")
        with pytest.raises(EngineNotFound):
            refine_iteration(fifo, rules, make_gateway([read(SVA / "t23.sv")]), booklog, engine)
        [record] = booklog.records()
        assert record.error.startswith("EngineNotFound:")
        assert record.batch_stats.n_assertions == 8

    def test_forge_error_keeps_its_type(self, rules, booklog, make_gateway):
        comb = parse_module("module comb(input logic a, output logic b);\n  assign b = a;\nendmodule\n")
        gateway = make_gateway(["as__b_follows_a: assert property (a |-> b);\n"])
        with pytest.raises(NoClockPort):
            refine_iteration(comb, rules, gateway, booklog, MockEngine.from_files([ENGINE / "t23_pass.txt"]))
        [record] = booklog.records()
        assert record.error.startswith("NoClockPort:")
        assert record.fpv_stats is None


class TestSvaFlow:

    def test_batches_are_merged(self, fifo, rules, annotation_rules, booklog, make_gateway):
        gateway = make_gateway([read(p) for p in sorted(MOCK_GEN.glob("*.txt"))])
        result = sva_flow(fifo, rules, annotation_rules, gateway, 3, booklog)
        assert [r.prompt_kind for r in result.records] == ["AnnotationGen", "SvaGen", "SvaGen", "SvaGen"]
        assert len(result.merged) == 8
        assert result.ft is not None
        assert result.ft.assertion_names == result.merged.names
        assert len(result.annotations.annotations) == 1
        assert result.records[1].notes == "batch 1 of 3"
        assert len(booklog.records()) == 4

    def test_audited_annotations_skip_the_prompt(self, fifo, rules, annotation_rules, booklog,
                                                 make_gateway):
        annotations = parse_annotation_set(read(DESIGN / "responses" / "02_annotations.txt"), fifo)
        gateway = make_gateway([read(SVA / "t23.sv")])
        result = sva_flow(fifo, rules, annotation_rules, gateway, 1, booklog, annotations=annotations)
        assert len(gateway.provider.prompts) == 1
        assert result.ft.assertion_names[-2:] == ["as__push_eventual_response", "as__push_data_stable"]

    def test_lint_errors_refuse_the_ft(self, fifo, rules, annotation_rules, booklog, make_gateway):
        gateway = make_gateway([read(MOCK_GEN / "01_annotations.txt"),
                                read(ISSUES / "t01_unprefixed_internal.sv")])
        result = sva_flow(fifo, rules, annotation_rules, gateway, 1, booklog)
        assert result.ft is None
        assert result.refused is not None
        assert result.merged.names == ["as__val_set"]

    def test_needs_a_batch(self, fifo, rules, annotation_rules, booklog, make_gateway):
        with pytest.raises(ValueError):
            sva_flow(fifo, rules, annotation_rules, make_gateway([]), 0, booklog)


class TestDesignLoop:

    def responses(self, *names):
        return [read(DESIGN / "responses" / n) for n in names]

    def test_scripted_edit_converges(self, rules, annotation_rules, rtl_rules, booklog, make_gateway, tmp_path):
        gateway = make_gateway(self.responses("01_rtl_v1.txt", "02_annotations.txt", "03_sva_v1.txt",
                                              "04_rtl_v2.txt", "05_sva_v2.txt"))
        engine = MockEngine.from_files([DESIGN / "run1.txt", DESIGN / "run2.txt"])
        result = design_loop(read(DESIGN / "spec.txt"), read(DESIGN / "interface.sv"), rules, gateway, engine,
                             booklog, tmp_path / "out", annotation_rules, rtl_rules,
                             edited_sva=[DESIGN / "edited_v1.sv"])

        assert result.state.status == ConvergenceStatus.ConvergedFullProof
        assert result.iterations == 2
        assert [r.prompt_kind for r in result.records] == [
            "RtlGen", "AnnotationGen", "SvaGen", "Fpv", "RtlGen", "SvaGen", "Fpv",
        ]
        assert result.records[3].fpv_stats.n_failing == 1

        prompts = gateway.provider.prompts
        assert len(prompts) == 5
        assert "SENTINEL_RTL_V1" in prompts[1]
        assert all("SENTINEL_RTL_V1" not in p for p in prompts[3:])
        assert "as__reviewed_head_stable" in prompts[3]
        assert "as__head_advances" not in prompts[3]

        out = tmp_path / "out" / "design"
        assert (out / "rtl_v2.sv").read_text().startswith("module fifo")
        assert "as__reviewed_head_step" in (out / "sva_v2.sv").read_text()
        assert (out / "annotations.txt").read_text().startswith("transaction push:")
        assert (out / "iter2" / "ft" / "fifo" / "manifest.json").exists()

    def test_other_flows_do_not_count(self, rules, annotation_rules, rtl_rules, booklog, make_gateway, tmp_path):
        for index in range(1, 10):
            booklog.append(checkpoint(index, 8, 1))
        gateway = make_gateway(self.responses("01_rtl_v1.txt", "02_annotations.txt", "03_sva_v1.txt",
                                              "04_rtl_v2.txt", "05_sva_v2.txt"))
        engine = MockEngine.from_files([DESIGN / "run1.txt", DESIGN / "run2.txt"])
        result = design_loop(read(DESIGN / "spec.txt"), read(DESIGN / "interface.sv"), rules, gateway, engine,
                             booklog, tmp_path / "out", annotation_rules, rtl_rules, max_iters=2,
                             edited_sva=[DESIGN / "edited_v1.sv"])

        assert result.state.status == ConvergenceStatus.ConvergedFullProof
        assert result.iterations == 2
        assert len(result.records) == 7
        assert all(r.flow == Flow.Design for r in result.records)
        assert len(booklog.records()) == 16

    def test_interactive_stop_and_resume(self, rules, annotation_rules, rtl_rules, booklog, make_gateway,
                                         tmp_path):
        spec, interface, out = read(DESIGN / "spec.txt"), read(DESIGN / "interface.sv"), tmp_path / "out"
        first = design_loop(spec, interface, rules,
                            make_gateway(self.responses("01_rtl_v1.txt", "02_annotations.txt", "03_sva_v1.txt")),
                            MockEngine.from_files([DESIGN / "run1.txt"]), booklog, out, annotation_rules,
                            rtl_rules, interactive=True)
        assert first.state.status == ConvergenceStatus.Running
        assert first.pending_sva == out / "design" / "sva_v1.sv"
        assert "as__head_holds" in first.pending_sva.read_text()

        first.pending_sva.write_text(read(DESIGN / "edited_v1.sv"))
        plan = resume_plan(booklog, out)
        assert plan.start_iteration == 2
        assert "as__reviewed_head_stable" in plan.sva_text
        assert len(plan.annotations.annotations) == 1

        gateway = make_gateway(self.responses("04_rtl_v2.txt", "05_sva_v2.txt"))
        second = design_loop(spec, interface, rules, gateway, MockEngine.from_files([DESIGN / "run2.txt"]),
                             booklog, out, annotation_rules, rtl_rules, plan=plan)
        assert second.state.status == ConvergenceStatus.ConvergedFullProof
        assert len(second.records) == 7
        assert "as__reviewed_head_stable" in gateway.provider.prompts[0]

    def test_exhausted(self, rules, annotation_rules, rtl_rules, booklog, make_gateway, tmp_path):
        gateway = make_gateway(self.responses("01_rtl_v1.txt", "02_annotations.txt", "03_sva_v1.txt"))
        engine = MockEngine.from_files([DESIGN / "run1.txt"])
        result = design_loop(read(DESIGN / "spec.txt"), read(DESIGN / "interface.sv"), rules, gateway, engine,
                             booklog, tmp_path / "out", annotation_rules, rtl_rules, max_iters=1)
        assert result.state.status == ConvergenceStatus.Exhausted
        assert result.iterations == 1

    def test_fresh_log_has_no_plan(self, booklog, tmp_path):
        plan = resume_plan(booklog, tmp_path)
        assert plan.start_iteration == 1
        assert plan.sva_text is None
