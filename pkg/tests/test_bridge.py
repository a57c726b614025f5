from decimal import Decimal
import os

import pytest
from pydantic import ValidationError

from src.bridge import (
    CoverageReport, ExternalEngine, FpvReport, MockEngine, ProofStatus, coverage_ratio, coverage_series,
    ingest_coverage, load_report, parse_engine_log, parse_mock_script, report_path, run, save_report,
)
from src.errors import EngineNotFound, OutOfRange, SchemaError, ZeroBase
from src.forge import emit_ft
from src.sva import parse_batch

from conftest import COVERAGE, ENGINE, LOGS, SVA, read


@pytest.fixture
def ft(fifo):
    return emit_ft(fifo, parse_batch(read(SVA / "t23.sv")))


class TestLogParsing:

    def test_pass_proves_everything(self, ft):
        report = parse_engine_log(read(LOGS / "sby_pass.log"), ft.assertion_names)
        assert report.compiled
        assert report.full_proof
        assert report.n_proven == 8

    def test_failure_with_trace(self, ft):
        report = parse_engine_log(read(LOGS / "sby_fail.log"), ft.assertion_names)
        assert report.compiled and not report.full_proof
        assert report.per_assertion["as__head_holds"] == ProofStatus.Failing
        assert report.cex_summaries == {"as__head_holds": "trace engine_0/trace.vcd, first failing step 5"}
        assert report.n_unknown == 7

    def test_error_means_not_compiled(self, ft):
        report = parse_engine_log(read(LOGS / "sby_error.log"), ft.assertion_names)
        assert not report.compiled
        assert report.per_assertion == {}

    def test_plain_status_lines(self):
        report = parse_engine_log(read(LOGS / "status_lines.log"))
        assert report.per_assertion == {
            "as__in_rdy_when_not_full": ProofStatus.Proven,
            "as__head_holds": ProofStatus.Failing,
            "as__data_correctly_written": ProofStatus.Unknown,
        }
        assert report.cex_summaries["as__head_holds"] == "counterexample found"

    def test_names_outside_the_ft_are_dropped(self, ft):
        log = "FAIL: fifo.fifo_prop_i.as__not_in_this_ft\nPASS: as__head_holds\nDONE (FAIL, rc=2)\n"
        report = parse_engine_log(log, ft.assertion_names)
        assert set(report.per_assertion) == set(ft.assertion_names)
        assert report.n_proven + report.n_failing + report.n_unknown == len(ft.assertion_names)
        assert report.n_failing == 0
        assert report.cex_summaries == {}

    def test_unreadable_log(self, ft):
        assert not parse_engine_log("segmentation fault\n", ft.assertion_names).compiled

    def test_report_consistency(self):
        with pytest.raises(ValidationError):
            FpvReport(per_assertion={"as__x": ProofStatus.Proven}, compiled=False)
        with pytest.raises(ValidationError):
            FpvReport(per_assertion={"as__x": ProofStatus.Proven}, cex_summaries={"as__x": "t"}, compiled=True)


class TestMockEngine:

    def test_default_status(self, ft):
        report = run(ft, MockEngine.from_files([ENGINE / "t23_pass.txt"]))
        assert report.full_proof
        assert report.engine == "mock"

    def test_named_failure(self, ft):
        report = MockEngine.from_files([ENGINE / "head_holds_fails.txt"]).run(ft)
        assert report.n_failing == 1
        assert report.n_proven == 7
        assert report.cex_summaries == {"as__head_holds": "mock counterexample"}

    def test_compile_failure(self, ft):
        report = MockEngine.from_files([ENGINE / "compile_fail.txt"]).run(ft)
        assert not report.compiled

    def test_last_script_repeats(self, ft):
        engine = MockEngine.from_files([ENGINE / "head_holds_fails.txt", ENGINE / "t23_pass.txt"])
        assert [engine.run(ft).full_proof for _ in range(3)] == [False, True, True]
        assert engine.runs == 3

    def test_unlisted_names_are_unknown(self, ft):
        report = MockEngine([parse_mock_script("as__head_holds|pass\n")]).run(ft)
        assert report.n_proven == 1
        assert report.n_unknown == 7

    def test_bad_scripts(self):
        with pytest.raises(SchemaError, match="line 1"):
            parse_mock_script("as__x|maybe\n")
        with pytest.raises(SchemaError):
            parse_mock_script("as__x\n")
        with pytest.raises(SchemaError):
            MockEngine([])


class TestExternalEngine:

    def fake_engine(self, tmp_path, monkeypatch, body: str) -> str:
        bin_dir = tmp_path / "bin"
        bin_dir.mkdir()
        script = bin_dir / "fake_sby"
        script.write_text("#!/bin/sh\n" + body)
        script.chmod(0o755)
        monkeypatch.setenv("PATH", f"{bin_dir}:{os.environ.get('PATH', '')}")
        return "fake_sby"

    def test_runs_in_a_fresh_workspace(self, ft, tmp_path, monkeypatch):
        cmd = self.fake_engine(tmp_path, monkeypatch,
                               'test -f "$1" || exit 9\necho "FAIL: as__head_holds"\necho "DONE (FAIL, rc=2)"\n')
        engine = ExternalEngine(cmd=cmd, work_root=tmp_path / "work")
        report = engine.run(ft)
        assert report.per_assertion["as__head_holds"] == ProofStatus.Failing
        assert report.n_unknown == 7
        assert report.engine == "fake_sby"

        workspaces = list((tmp_path / "work" / "fifo").iterdir())
        assert len(workspaces) == 1
        assert (workspaces[0] / "fifo.sby").exists()
        assert (workspaces[0] / "rtl" / "fifo.sv").exists()
        assert "DONE (FAIL" in (workspaces[0] / "engine.log").read_text()

    def test_timeout_leaves_everything_unknown(self, ft, tmp_path, monkeypatch):
        cmd = self.fake_engine(tmp_path, monkeypatch, "exec sleep 5\n")
        report = ExternalEngine(cmd=cmd, work_root=tmp_path / "work", timeout=1).run(ft)
        assert report.compiled
        assert report.n_unknown == 8

    def test_missing_engine(self, ft, tmp_path):
        with pytest.raises(EngineNotFound, match="no-such-engine"):
            ExternalEngine(cmd="no-such-engine -f", work_root=tmp_path).run(ft)


class TestCoverage:

    def test_ratios(self):
        delta = coverage_ratio(ingest_coverage(COVERAGE / "base.json"), ingest_coverage(COVERAGE / "new.json"))
        assert delta.statement_ratio == Decimal("1.25")
        assert delta.toggle_ratio == Decimal("3.74")

    def test_series(self):
        base = ingest_coverage(COVERAGE / "base.json")
        series = coverage_series(base, [base, ingest_coverage(COVERAGE / "new.json")])
        assert [d.statement_ratio for d in series] == [Decimal("1.00"), Decimal("1.25")]

    def test_self_ratio_is_one(self, fake):
        edges = [1e-9, 0.0001, 0.999999, 1.0]
        drawn = [fake.random.uniform(1e-9, 1.0) for _ in range(96 * 2)]
        reports = [CoverageReport(statement=edges[i % 4], toggle=edges[-1 - i % 4]) for i in range(4)]
        reports += [CoverageReport(statement=s, toggle=t) for s, t in zip(drawn[::2], drawn[1::2])]
        assert len(reports) == 100
        for report in reports:
            delta = coverage_ratio(report, report)
            assert delta.statement_ratio == Decimal("1.00")
            assert delta.toggle_ratio == Decimal("1.00")

    def test_source_is_the_file_name(self):
        assert ingest_coverage(COVERAGE / "base.json").source == "base.json"

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            ingest_coverage(COVERAGE / "out_of_range.json")

    def test_missing_field(self):
        with pytest.raises(SchemaError):
            ingest_coverage(COVERAGE / "missing_field.json")

    def test_not_json(self, tmp_path):
        path = tmp_path / "cov.json"
        path.write_text("statement=0.4")
        with pytest.raises(SchemaError):
            ingest_coverage(path)

    def test_zero_base(self):
        zero = ingest_coverage(COVERAGE / "zero.json")
        with pytest.raises(ZeroBase):
            coverage_ratio(zero, ingest_coverage(COVERAGE / "new.json"))
        assert coverage_ratio(ingest_coverage(COVERAGE / "base.json"), zero).statement_ratio == 0

    def test_complete(self):
        assert CoverageReport(statement=1, toggle=1).complete
        assert not ingest_coverage(COVERAGE / "new.json").complete


class TestReports:

    def test_save_and_load(self, ft, tmp_path):
        report = MockEngine.from_files([ENGINE / "head_holds_fails.txt"]).run(ft)
        path = save_report(report, tmp_path, "fifo")
        assert path == report_path(tmp_path, "fifo")
        assert load_report(path) == report
