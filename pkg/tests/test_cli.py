import json

import pytest
from typer.testing import CliRunner

from src.cli import ExitCode, app, main

from conftest import CONFIG, COVERAGE, DESIGN, ENGINE, ISSUES, MOCK_GEN, RTL, SVA

runner = CliRunner()
FIFO = str(RTL / "fifo.sv")


@pytest.fixture
def cli(tmp_path):
    """Invoke the app with --out pointing into tmp_path."""
    def invoke(*args, config=None):
        options = ["--out", str(tmp_path / "out")]
        if config is not None:
            options += ["--config", str(config)]
        return runner.invoke(app, options + [str(a) for a in args])
    return invoke


class TestLintCommand:

    def test_clean_file(self, cli):
        result = cli("lint", SVA / "t23.sv", "--rtl", FIFO)
        assert result.exit_code == ExitCode.Ok
        assert "8 assertions, 0 error(s), 0 warning(s)" in result.output

    def test_errors_exit_one(self, cli):
        result = cli("lint", ISSUES / "t01_unprefixed_internal.sv", "--rtl", FIFO)
        assert result.exit_code == ExitCode.LintErrors
        assert "IN/unprefixed_internal" in result.output

    def test_timing_warning_fails(self, cli):
        result = cli("lint", SVA / "t16.sv", "--rtl", FIFO)
        assert result.exit_code == ExitCode.LintErrors
        assert "warning WT/stale_read_in_next_cycle [as__in_hsk_data_update]" in result.output
        assert "0 error(s), 2 warning(s)" in result.output

    def test_strict_fails_on_advisories(self, cli):
        advisory = ("lint", SVA / "t23.sv", "--rtl", FIFO, "--enable", "reduction_advisory")
        assert cli(*advisory).exit_code == ExitCode.Ok
        assert cli(*advisory, "--strict").exit_code == ExitCode.LintErrors

    def test_json_lines(self, cli):
        result = cli("lint", SVA / "t16.sv", "--rtl", FIFO, "--json")
        keys = [json.loads(line)["lint_key"] for line in result.output.splitlines() if line.startswith("{")]
        assert keys == ["stale_read_in_next_cycle", "zero_width_constant"]

    def test_enable_and_disable(self, cli):
        enabled = cli("lint", SVA / "t23.sv", "--rtl", FIFO, "--enable", "reduction_advisory")
        assert "0 error(s), 2 warning(s)" in enabled.output
        disabled = cli("lint", ISSUES / "t01_unprefixed_internal.sv", "--rtl", FIFO,
                       "--disable", "unprefixed_internal")
        assert disabled.exit_code == ExitCode.Ok

    def test_missing_file_is_usage(self, cli, tmp_path):
        result = cli("lint", tmp_path / "absent.sv")
        assert result.exit_code == ExitCode.Usage
        assert "cannot read" in result.output

    def test_bad_config_is_usage(self, cli):
        result = cli("lint", SVA / "t23.sv", config=CONFIG / "bad_key.cfg")
        assert result.exit_code == ExitCode.Usage
        assert "unknown key" in result.output


class TestGenerateAndProve:

    def test_gen_writes_ft(self, cli, tmp_path):
        result = cli("gen", FIFO, "--batches", "3", "--script", MOCK_GEN)
        assert result.exit_code == ExitCode.Ok, result.output
        assert "8 merged assertions" in result.output
        assert (tmp_path / "out" / "ft" / "fifo" / "manifest.json").exists()
        assert (tmp_path / "out" / "fifo.sva").exists()

    def test_mock_provider_needs_a_script(self, cli):
        result = cli("gen", FIFO)
        assert result.exit_code == ExitCode.Usage
        assert "--script" in result.output

    def test_lint_errors_refuse_ft(self, cli, tmp_path):
        result = cli("gen", FIFO, "--script", MOCK_GEN / "01_annotations.txt",
                     "--script", ISSUES / "t01_unprefixed_internal.sv")
        assert result.exit_code == ExitCode.LintErrors
        assert (tmp_path / "out" / "fifo.sva").exists()
        assert not (tmp_path / "out" / "ft").exists()

    def test_prove_with_mock_engine(self, cli, tmp_path):
        cli("gen", FIFO, "--batches", "3", "--script", MOCK_GEN)
        failing = cli("prove", "--engine", "mock", "--script", ENGINE / "head_holds_fails.txt")
        assert failing.exit_code == ExitCode.FpvFailures
        assert "proven=7 failing=1" in failing.output
        assert "as__head_holds: mock counterexample" in failing.output

        passing = cli("prove", "--engine", "mock", "--script", ENGINE / "t23_pass.txt", "--json")
        assert passing.exit_code == ExitCode.Ok
        assert json.loads(passing.output)["proven"] == 8
        assert (tmp_path / "out" / "reports" / "fifo.fpv.json").exists()

    def test_missing_engine_is_external(self, cli, tmp_path):
        cli("gen", FIFO, "--batches", "3", "--script", MOCK_GEN)
        config = tmp_path / "run.cfg"
        config.write_text("engine.cmd|no-such-engine -f\n")
        result = cli("prove", config=config)
        assert result.exit_code == ExitCode.External

    def test_prove_needs_an_ft(self, cli):
        assert cli("prove", "--engine", "mock", "--script", ENGINE / "t23_pass.txt").exit_code == ExitCode.Usage

    def test_ft_init(self, cli, tmp_path):
        result = cli("ft", "init", FIFO)
        assert result.exit_code == ExitCode.Ok
        assert "module fifo_prop" in (tmp_path / "out" / "ft" / "fifo" / "fifo_prop.sv").read_text()

    def test_annotate(self, cli, tmp_path):
        result = cli("annotate", FIFO, "--script", MOCK_GEN / "01_annotations.txt")
        assert result.exit_code == ExitCode.Ok
        assert "1 transaction(s)" in result.output
        assert "ignored line 1" in result.output
        assert (tmp_path / "out" / "annotations" / "fifo.txt").read_text().startswith("transaction push:")


class TestReporting:

    def test_report_table_and_coverage(self, cli):
        cli("gen", FIFO, "--batches", "3", "--script", MOCK_GEN)
        result = cli("report", "--coverage", COVERAGE / "base.json", "--coverage", COVERAGE / "new.json")
        assert result.exit_code == ExitCode.Ok
        assert "T4" in result.output
        assert "new.json: statement x1.25, toggle x3.74" in result.output

    def test_report_needs_two_coverage_files(self, cli):
        assert cli("report", "--coverage", COVERAGE / "base.json").exit_code == ExitCode.Usage

    def test_out_of_range_coverage(self, cli):
        result = cli("report", "--coverage", COVERAGE / "base.json", "--coverage", COVERAGE / "out_of_range.json")
        assert result.exit_code == ExitCode.Usage

    def test_diff(self, cli):
        result = cli("diff", SVA / "t23.sv", SVA / "t24.sv", "--json")
        assert result.exit_code == ExitCode.Ok
        assert json.loads(result.output)["identical"] == 2

    def test_cost(self, cli):
        cli("gen", FIFO, "--batches", "3", "--script", MOCK_GEN, config=CONFIG / "priced.cfg")
        result = cli("cost", "--json", config=CONFIG / "priced.cfg")
        payload = json.loads(result.output)
        assert payload["calls"] == 4
        assert float(payload["usd"]) > 0


class TestLoops:

    def test_refine_twice(self, cli):
        t23 = SVA / "t23.sv"
        result = cli("loop", "refine", FIFO, "--iterations", "2", "--script", t23, "--script", t23,
                     "--engine", "mock", "--engine-script", ENGINE / "t23_pass.txt")
        assert result.exit_code == ExitCode.Ok, result.output
        assert "T2" in result.output
        assert "Full Proof" in result.output

    def test_refine_missing_engine_is_external(self, cli, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("engine.cmd|no-such-engine -f\n")
        result = cli("loop", "refine", FIFO, "--script", SVA / "t23.sv", "--engine", "external", config=config)
        assert result.exit_code == ExitCode.External

    def test_refine_without_clock_is_usage(self, cli, tmp_path):
        rtl = tmp_path / "comb.sv"
        rtl.write_text("module comb(input logic a, output logic b);\n  assign b = a;\nendmodule\n")
        sva = tmp_path / "comb_sva.sv"
        sva.write_text("as__b_follows_a: assert property (a |-> b);\n")
        result = cli("loop", "refine", rtl, "--script", sva, "--engine", "mock",
                     "--engine-script", ENGINE / "t23_pass.txt")
        assert result.exit_code == ExitCode.Usage
        assert "no clock port" in result.output

    def test_design_scripted(self, cli):
        result = cli("loop", "design", DESIGN / "spec.txt", DESIGN / "interface.sv", "--scripted",
                     "--edited", DESIGN / "edited_v1.sv", "--script", DESIGN / "responses",
                     "--engine", "mock", "--engine-script", DESIGN / "run1.txt",
                     "--engine-script", DESIGN / "run2.txt")
        assert result.exit_code == ExitCode.Ok, result.output
        assert "converged_full_proof" in result.output

    def test_design_interactive_resume(self, cli, tmp_path):
        responses = DESIGN / "responses"
        first = cli("loop", "design", DESIGN / "spec.txt", DESIGN / "interface.sv",
                    "--script", responses / "01_rtl_v1.txt", "--script", responses / "02_annotations.txt",
                    "--script", responses / "03_sva_v1.txt",
                    "--engine", "mock", "--engine-script", DESIGN / "run1.txt")
        assert first.exit_code == ExitCode.Ok, first.output
        assert "--resume" in first.output

        pending = tmp_path / "out" / "design" / "sva_v1.sv"
        pending.write_text((DESIGN / "edited_v1.sv").read_text())
        second = cli("loop", "design", DESIGN / "spec.txt", DESIGN / "interface.sv", "--resume",
                     "--script", responses / "04_rtl_v2.txt", "--script", responses / "05_sva_v2.txt",
                     "--engine", "mock", "--engine-script", DESIGN / "run2.txt")
        assert second.exit_code == ExitCode.Ok, second.output
        assert "converged_full_proof" in second.output


class TestMain:

    def test_usage_error_exits_three(self):
        with pytest.raises(SystemExit) as info:
            main(["lint"])
        assert info.value.code == ExitCode.Usage

    def test_exit_code_passes_through(self, tmp_path):
        with pytest.raises(SystemExit) as info:
            main(["--out", str(tmp_path), "lint", str(ISSUES / "t01_unprefixed_internal.sv"), "--rtl", FIFO])
        assert info.value.code == ExitCode.LintErrors

    def test_success(self, tmp_path):
        with pytest.raises(SystemExit) as info:
            main(["--out", str(tmp_path), "lint", str(SVA / "t23.sv")])
        assert info.value.code == ExitCode.Ok
