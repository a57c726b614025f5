"""Command-line entry point: `sva-forge <command>`."""
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum, IntEnum
from pathlib import Path
from typing import Iterator, List, Optional
import json
import logging
import os
import sys

import click
import typer

from .bridge import (
    ExternalEngine, FpvReport, MockEngine, coverage_series, ingest_coverage, report_path, save_report,
)
from .errors import (
    BridgeError, ConfigError, EngineNotFound, GatewayError, LintErrorsPresent, SvaForgeError,
)
from .forge import emit_scaffold, load_ft, parse_annotation_set, write_ft
from .frontend import RtlModule, parse_module
from .gateway import CostLedger, LlmGateway, MockProvider, total_cost
from .loop import (
    FPV_PROMPT_KIND, BatchStats, Booklog, ConvergenceStatus, Flow, FpvStats, design_loop,
    export_json, export_table, generate_annotations, refine_iteration, resume_plan, sva_flow,
)
from .rulebook import RuleSet, load_rules
from .settings import Settings, load_settings
from .sva import blocking_of, diff_batches, errors_of, findings_to_jsonl, format_findings, lint, parse_batch

# Configure logging
logger = logging.getLogger(__name__)

DEFAULT_OUT = Path("ft-out")


class ExitCode(IntEnum):
    Ok = 0
    LintErrors = 1
    FpvFailures = 2
    Usage = 3
    External = 4


class EngineKind(str, Enum):
    external = "external"
    mock = "mock"


@dataclass
class RunContext:
    settings: Settings
    out: Path
    booklog: Booklog
    ledger: CostLedger

    def gateway(self, script: List[Path]) -> LlmGateway:
        if script:
            return LlmGateway(self.settings.provider, MockProvider.from_files(_expand(script)), self.ledger)
        if self.settings.provider.name == "mock":
            raise ConfigError("the mock provider needs --script response files")
        return LlmGateway(self.settings.provider, ledger=self.ledger)

    def engine(self, kind: EngineKind, script: List[Path]):
        if kind == EngineKind.mock:
            if not script:
                raise ConfigError("the mock engine needs --engine-script files")
            return MockEngine.from_files(_expand(script))
        return ExternalEngine(self.settings.engine_cmd, work_root=self.out / "work",
                              timeout=self.settings.engine.timeout)

    def module(self, path: Path) -> RtlModule:
        s = self.settings
        return parse_module(_read(path), s.register_suffixes, s.clock, s.reset)

    def rules(self, path: Path) -> RuleSet:
        return load_rules(path)


app = typer.Typer(help="LLM-driven SVA generation, linting and formal-testbench toolchain.",
                  no_args_is_help=True, add_completion=False)
ft_app = typer.Typer(help="Formal testbench scaffolding.", no_args_is_help=True)
loop_app = typer.Typer(help="Rule-refinement and design loops.", no_args_is_help=True)
app.add_typer(ft_app, name="ft")
app.add_typer(loop_app, name="loop")


def _expand(paths: List[Path]) -> List[Path]:
    """A directory stands for its files in name order."""
    files: List[Path] = []
    for p in paths:
        files.extend(sorted(f for f in p.iterdir() if f.is_file()) if p.is_dir() else [p])
    return files


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}") from e


def _exit_code(error: SvaForgeError) -> ExitCode:
    if isinstance(error, LintErrorsPresent):
        return ExitCode.LintErrors
    if isinstance(error, (GatewayError, EngineNotFound)):
        return ExitCode.External
    if isinstance(error, (ValueError, ConfigError)):
        return ExitCode.Usage
    if isinstance(error, BridgeError):
        return ExitCode.FpvFailures
    return ExitCode.Usage


@contextmanager
def _handled() -> Iterator[None]:
    try:
        yield
    except SvaForgeError as e:
        code = _exit_code(e)
        typer.echo(f"error: {e}", err=True)
        if isinstance(e, LintErrorsPresent):
            typer.echo(format_findings(e.findings), err=True)
        logger.debug(f"{type(e).__name__} mapped to exit code {int(code)}")
        raise typer.Exit(int(code))


def _ctx(ctx: typer.Context) -> RunContext:
    return ctx.obj


def _emit_json(payload) -> None:
    typer.echo(json.dumps(payload, indent=2, default=str))


@app.callback()
def configure(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(None, "--config", help="key|value configuration file"),
    booklog: Optional[Path] = typer.Option(None, "--booklog", help="booklog path (default <out>/booklog.jsonl)"),
    out: Path = typer.Option(DEFAULT_OUT, "--out", help="output directory"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="debug logging"),
):
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING)
    with _handled():
        settings = load_settings(config)
    ctx.obj = RunContext(
        settings=settings,
        out=out,
        booklog=Booklog(booklog or out / "booklog.jsonl"),
        ledger=CostLedger(out / "ledger.jsonl"),
    )


# -=-=-=-=-=- FT AND SVA GENERATION -=-=-=-=-=- #

@ft_app.command("init")
def ft_init(ctx: typer.Context, rtl: Path = typer.Argument(..., help="design source")):
    """Emit an FT with property module, bind and engine config but no assertions."""
    run = _ctx(ctx)
    with _handled():
        module = run.module(rtl)
        root = write_ft(emit_scaffold(module, run.settings.ft_options()), run.out)
    typer.echo(f"FT scaffold for {module.name} written to {root}")


def annotations_file(out: Path, design: str) -> Path:
    return out / "annotations" / f"{design}.txt"


@app.command()
def annotate(
    ctx: typer.Context,
    rtl: Path = typer.Argument(...),
    script: List[Path] = typer.Option([], "--script", help="mock response files, in call order"),
):
    """Run the annotation prompt once and write the annotations for audit."""
    run = _ctx(ctx)
    with _handled():
        module = run.module(rtl)
        annotations, _ = generate_annotations(
            module, run.rules(run.settings.rules_annotation), run.gateway(script), run.booklog,
            run.settings.budget)
        path = annotations_file(run.out, module.name)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(annotations.to_text(), encoding="utf-8")
    for lineno, line in annotations.unknown_lines:
        typer.echo(f"ignored line {lineno}: {line}", err=True)
    typer.echo(f"{len(annotations.annotations)} transaction(s) written to {path}")


@app.command()
def gen(
    ctx: typer.Context,
    rtl: Path = typer.Argument(...),
    batches: Optional[int] = typer.Option(None, "--batches", min=1),
    strip: bool = typer.Option(False, "--strip", help="strip comments from the RTL payload"),
    fsm_strategy: bool = typer.Option(False, "--fsm-strategy"),
    annotations: Optional[Path] = typer.Option(None, "--annotations", help="audited annotation file"),
    force: bool = typer.Option(False, "--force", help="emit the FT despite lint errors"),
    script: List[Path] = typer.Option([], "--script", help="mock response files, in call order"),
):
    """Generate N SVA batches, merge them and emit the FT."""
    run = _ctx(ctx)
    s = run.settings
    with _handled():
        module = run.module(rtl)
        audited = parse_annotation_set(_read(annotations), module) if annotations else None
        result = sva_flow(
            module, run.rules(s.rules_sva), run.rules(s.rules_annotation), run.gateway(script),
            batches or s.loop.batches, run.booklog, s.budget, s.ft_options(force), annotations=audited,
            fsm_strategy=fsm_strategy, strip=strip)
        sva_file = run.out / f"{module.name}.sva"
        sva_file.parent.mkdir(parents=True, exist_ok=True)
        sva_file.write_text(result.merged.render(), encoding="utf-8")
        typer.echo(f"{len(result.merged)} merged assertions written to {sva_file}")
        if result.ft is None:
            raise result.refused
        root = write_ft(result.ft, run.out)
    typer.echo(f"FT written to {root}")


@app.command("lint")
def lint_command(
    ctx: typer.Context,
    sva: Path = typer.Argument(...),
    rtl: Optional[Path] = typer.Option(None, "--rtl"),
    enable: List[str] = typer.Option([], "--enable", help="enable an off-by-default check"),
    disable: List[str] = typer.Option([], "--disable"),
    strict: bool = typer.Option(False, "--strict", help="fail on any finding, advisories included"),
    as_json: bool = typer.Option(False, "--json"),
):
    """Lint an assertion file; exits 1 on errors or timing warnings, and with --strict on any finding."""
    run = _ctx(ctx)
    with _handled():
        module = run.module(rtl) if rtl else None
        batch = parse_batch(_read(sva), module)
        findings = lint(batch, module, run.rules(run.settings.rules_sva), enable=enable, disable=disable)
    if as_json:
        typer.echo(findings_to_jsonl(findings), nl=False)
    elif findings:
        typer.echo(format_findings(findings))
    if batch.unparsed_residue:
        logger.warning(f"{len(batch.residue)} fragment(s) of {sva} were not recognised as assertions")
    errors = errors_of(findings)
    if not as_json:
        typer.echo(f"{len(batch)} assertions, {len(errors)} error(s), {len(findings) - len(errors)} warning(s)")
    if blocking_of(findings) or (strict and findings):
        raise typer.Exit(int(ExitCode.LintErrors))


# -=-=-=-=-=- FPV -=-=-=-=-=- #

def _single_ft(out: Path) -> Path:
    candidates = sorted(p for p in (out / "ft").glob("*") if p.is_dir()) if (out / "ft").exists() else []
    if len(candidates) != 1:
        raise ConfigError(f"expected one FT under {out / 'ft'}, found {len(candidates)}; pass the FT directory")
    return candidates[0]


def _report_payload(report: FpvReport) -> dict:
    return {
        "compiled": report.compiled,
        "proven": report.n_proven,
        "failing": report.n_failing,
        "unknown": report.n_unknown,
        "per_assertion": {k: v.value for k, v in report.per_assertion.items()},
        "cex": report.cex_summaries,
    }


@app.command()
def prove(
    ctx: typer.Context,
    ft: Optional[Path] = typer.Argument(None, help="FT directory (default: the only one under <out>/ft)"),
    engine: EngineKind = typer.Option(EngineKind.external, "--engine"),
    script: List[Path] = typer.Option([], "--script", help="mock engine script(s)"),
    as_json: bool = typer.Option(False, "--json"),
):
    """Run the engine on an FT; exits 2 on failures or a failed compile."""
    run = _ctx(ctx)
    with _handled():
        artifact = load_ft(ft or _single_ft(run.out))
        report = run.engine(engine, script).run(artifact)
        save_report(report, run.out, artifact.design)
        run.booklog.add(flow=Flow.Sva, prompt_kind=FPV_PROMPT_KIND, fpv_stats=FpvStats.of(report),
                        batch_stats=BatchStats(n_assertions=len(artifact.batch)),
                        artifacts=[str(report_path(run.out, artifact.design))],
                        notes=f"prove {artifact.design} ({report.engine})")
    if as_json:
        _emit_json(_report_payload(report))
    else:
        typer.echo(f"{artifact.design}: compiled={'yes' if report.compiled else 'no'} "
                   f"proven={report.n_proven} failing={report.n_failing} unknown={report.n_unknown}")
        for name, summary in report.cex_summaries.items():
            typer.echo(f"  {name}: {summary}")
    if not report.compiled or report.n_failing:
        raise typer.Exit(int(ExitCode.FpvFailures))


@app.command()
def report(
    ctx: typer.Context,
    coverage: List[Path] = typer.Option([], "--coverage", help="base report, then one or more new reports"),
    as_json: bool = typer.Option(False, "--json"),
):
    """Booklog table, plus coverage multipliers over a base report."""
    run = _ctx(ctx)
    with _handled():
        records = run.booklog.records()
        deltas = []
        if coverage:
            if len(coverage) < 2:
                raise ConfigError("--coverage needs a base report and at least one more")
            base = ingest_coverage(coverage[0])
            deltas = coverage_series(base, [ingest_coverage(p) for p in coverage[1:]])
    if as_json:
        _emit_json({
            "records": json.loads(export_json(records)),
            "coverage": [{"source": str(p), "statement_ratio": str(d.statement_ratio),
                          "toggle_ratio": str(d.toggle_ratio)} for p, d in zip(coverage[1:], deltas)],
        })
        return
    typer.echo(export_table(records))
    for path, delta in zip(coverage[1:], deltas):
        typer.echo(f"{path.name}: statement x{delta.statement_ratio}, toggle x{delta.toggle_ratio}")


# -=-=-=-=-=- LOOPS -=-=-=-=-=- #

@loop_app.command("refine")
def loop_refine(
    ctx: typer.Context,
    rtl: Path = typer.Argument(...),
    iterations: int = typer.Option(1, "--iterations", min=1),
    fsm_strategy: bool = typer.Option(False, "--fsm-strategy"),
    script: List[Path] = typer.Option([], "--script", help="mock response files"),
    engine: Optional[EngineKind] = typer.Option(None, "--engine", help="also run FPV each iteration"),
    engine_script: List[Path] = typer.Option([], "--engine-script"),
):
    """Clean-slate SVA generation against the current rule file, one booklog record per call.

    Edit the rule file between invocations; a changed rule set gets the next version.
    """
    run = _ctx(ctx)
    s = run.settings
    with _handled():
        module = run.module(rtl)
        gateway = run.gateway(script)
        fpv = run.engine(engine, engine_script) if engine else None
        for _ in range(iterations):
            refine_iteration(module, run.rules(s.rules_sva), gateway, run.booklog, fpv, s.budget,
                             s.ft_options(force=True), fsm_strategy)
        records = run.booklog.records()
    typer.echo(export_table(records))


@loop_app.command("design")
def loop_design(
    ctx: typer.Context,
    spec: Path = typer.Argument(..., help="natural-language specification"),
    interface: Path = typer.Argument(..., help="module header with the port list"),
    resume: bool = typer.Option(False, "--resume", help="continue after editing the emitted SVA"),
    interactive: bool = typer.Option(True, "--interactive/--scripted"),
    edited: List[Path] = typer.Option([], "--edited", help="scripted SVA edits, one per iteration"),
    script: List[Path] = typer.Option([], "--script", help="mock response files"),
    engine: EngineKind = typer.Option(EngineKind.external, "--engine"),
    engine_script: List[Path] = typer.Option([], "--engine-script"),
):
    """SVA-guided RTL generation: RTL, SVA, FPV, human SVA edit, repeat."""
    run = _ctx(ctx)
    s = run.settings
    with _handled():
        plan = resume_plan(run.booklog, run.out) if resume else None
        result = design_loop(
            _read(spec), _read(interface), run.rules(s.rules_sva), run.gateway(script),
            run.engine(engine, engine_script), run.booklog, run.out, run.rules(s.rules_annotation),
            rtl_rules=run.rules(s.rules_rtl), max_iters=s.loop.max_iters,
            plateau_window=s.loop.plateau_window, n_batches=s.loop.batches, budget=s.budget,
            opts=s.ft_options(force=True), interactive=interactive, edited_sva=edited, plan=plan)
    typer.echo(export_table(result.records))
    typer.echo(f"{result.state.status.value}: {result.state.reason}")
    if result.pending_sva is not None:
        typer.echo(f"edit {result.pending_sva}, then run `sva-forge loop design --resume`")
        return
    if result.state.status != ConvergenceStatus.ConvergedFullProof:
        raise typer.Exit(int(ExitCode.FpvFailures))


# -=-=-=-=-=- REPORTING -=-=-=-=-=- #

@app.command()
def diff(
    ctx: typer.Context,
    batch_a: Path = typer.Argument(...),
    batch_b: Path = typer.Argument(...),
    as_json: bool = typer.Option(False, "--json"),
):
    """Compare two batches for the determinism study."""
    with _handled():
        result = diff_batches(parse_batch(_read(batch_a)), parse_batch(_read(batch_b)))
    if as_json:
        _emit_json(result.model_dump())
        return
    for key, value in result.model_dump().items():
        typer.echo(f"{key}: {value}")


@app.command()
def cost(ctx: typer.Context, as_json: bool = typer.Option(False, "--json")):
    """Total LLM spend recorded in the ledger."""
    run = _ctx(ctx)
    total = total_cost(run.ledger)
    if as_json:
        _emit_json({"calls": len(run.ledger), "usd": str(total)})
    else:
        typer.echo(f"{len(run.ledger)} call(s), {total} USD")


@app.command()
def serve(
    ctx: typer.Context,
    host: str = typer.Option("127.0.0.1", "--host"),
    port: int = typer.Option(8000, "--port"),
):
    """Read-only HTTP API over the booklog and the cost ledger."""
    import uvicorn

    run = _ctx(ctx)
    os.environ["SVA_FORGE_BOOKLOG"] = str(run.booklog.path)
    os.environ["SVA_FORGE_LEDGER"] = str(run.ledger.path)
    os.environ["SVA_FORGE_RULES"] = str(run.settings.rules_sva)
    uvicorn.run("main:app", host=host, port=port)


def main(argv: Optional[List[str]] = None) -> None:
    try:
        rc = app(args=argv, standalone_mode=False)
    except click.UsageError as e:
        e.show()
        sys.exit(int(ExitCode.Usage))
    except click.Abort:
        sys.exit(int(ExitCode.Usage))
    sys.exit(rc if isinstance(rc, int) else int(ExitCode.Ok))


if __name__ == "__main__":
    main()
