"""The three loops: rule refinement, the SVA flow and the SVA-guided design loop."""
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Union
import logging
import re
import traceback

from ..bridge import Engine, FpvReport
from ..digest import sha256_hex
from ..errors import BridgeError, ForgeError, FrontendError, GatewayError, LintErrorsPresent, SvaForgeError
from ..forge import AnnotationSet, FtArtifact, FtOptions, emit_ft, parse_annotation_set, write_ft
from ..frontend import RtlModule, parse_module
from ..gateway import LlmGateway
from ..prompter import (
    Budget, PromptBundle, PromptKind, compose_annotation_prompt, compose_rtl_prompt, compose_sva_prompt,
)
from ..rulebook import RuleSet
from ..sva import AssertionBatch, dedup, errors_of, lint, parse_batch, warnings_of
from .booklog import Booklog
from .convergence import DEFAULT_PLATEAU_WINDOW, check_convergence, sync_ruleset_version
from .models import (
    FPV_PROMPT_KIND, BatchStats, ConvergenceState, ConvergenceStatus, Flow, FpvStats, IterationRecord,
)

# Configure logging
logger = logging.getLogger(__name__)

DEFAULT_MAX_ITERS = 10
_MODULE_RE = re.compile(r"\bmodule\b.*?\bendmodule\b", re.DOTALL)


def _batch_stats(batch: AssertionBatch, findings) -> BatchStats:
    return BatchStats(n_assertions=len(batch), n_lint_errors=len(errors_of(findings)),
                      n_lint_warnings=len(warnings_of(findings)))


def _categories(findings) -> List[str]:
    return sorted({f.category.value for f in errors_of(findings)})


def _call(gateway: LlmGateway, booklog: Booklog, bundle: PromptBundle, flow: Flow, rs: RuleSet,
          rtl_iteration: Optional[int] = None) -> str:
    """Complete one prompt; a failed call is still recorded before the error propagates."""
    try:
        return gateway.complete(bundle).text
    except GatewayError as e:
        booklog.add(flow=flow, ruleset_version=rs.version, prompt_digest=bundle.digest,
                    prompt_kind=bundle.kind.value, rules_digest=rs.digest, rtl_iteration=rtl_iteration,
                    error=f"{type(e).__name__}: {e}")
        raise


# -=-=-=-=-=- RULE REFINEMENT -=-=-=-=-=- #

def refine_iteration(module: RtlModule, rs: RuleSet, gateway: LlmGateway, booklog: Booklog,
                     engine: Optional[Engine] = None, budget: Budget = Budget(),
                     opts: FtOptions = FtOptions(force=True), fsm_strategy: bool = False,
                     notes: str = "") -> IterationRecord:
    """One clean-slate iteration: prompt, complete, parse, lint and optionally prove."""
    rs = sync_ruleset_version(rs, booklog.records(), PromptKind.SvaGen.value)
    bundle = compose_sva_prompt(module, rs, budget, fsm_strategy=fsm_strategy)
    text = _call(gateway, booklog, bundle, Flow.Refine, rs)

    batch = parse_batch(text, module)
    findings = lint(batch, module, rs)
    fpv_stats = None
    error = None
    failure: Optional[SvaForgeError] = None
    if engine is not None:
        try:
            report = engine.run(emit_ft(module, batch, (), opts, rs))
            fpv_stats = FpvStats.of(report)
        except (BridgeError, ForgeError) as e:
            logger.error(f"FPV failed during refinement: {str(e)}")
            error = f"{type(e).__name__}: {e}"
            failure = e

    record = booklog.add(
        flow=Flow.Refine,
        ruleset_version=rs.version,
        prompt_digest=bundle.digest,
        completion_text=text,
        batch_stats=_batch_stats(batch, findings),
        fpv_stats=fpv_stats,
        notes=notes,
        prompt_kind=bundle.kind.value,
        rules_digest=rs.digest,
        lint_categories=_categories(findings),
        error=error,
    )
    if failure is not None:
        raise failure
    return record


# -=-=-=-=-=- SVA FLOW -=-=-=-=-=- #

@dataclass
class SvaFlowResult:
    ft: Optional[FtArtifact]
    merged: AssertionBatch
    records: List[IterationRecord]
    annotations: AnnotationSet = field(default_factory=AnnotationSet)
    refused: Optional[LintErrorsPresent] = None


def generate_annotations(module: RtlModule, annotation_rules: RuleSet, gateway: LlmGateway,
                         booklog: Booklog, budget: Budget = Budget(), flow: Flow = Flow.Sva,
                         rtl_iteration: Optional[int] = None):
    bundle = compose_annotation_prompt(module, annotation_rules, budget)
    text = _call(gateway, booklog, bundle, flow, annotation_rules, rtl_iteration)
    error = None
    try:
        annotations = parse_annotation_set(text, module)
    except ForgeError as e:
        # Generated annotations go to the engineer for audit; a bad line is not fatal here.
        logger.warning(f"Generated annotations rejected: {e}")
        annotations, error = AnnotationSet(), f"{type(e).__name__}: {e}"
    record = booklog.add(flow=flow, ruleset_version=annotation_rules.version, prompt_digest=bundle.digest,
                         completion_text=text, prompt_kind=bundle.kind.value,
                         rules_digest=annotation_rules.digest, rtl_iteration=rtl_iteration,
                         notes=f"{len(annotations.annotations)} transaction(s)", error=error)
    return annotations, record


def sva_flow(module: RtlModule, rs: RuleSet, annotation_rules: RuleSet, gateway: LlmGateway,
             n_batches: int, booklog: Booklog, budget: Budget = Budget(), opts: FtOptions = FtOptions(),
             annotations: Optional[AnnotationSet] = None, fsm_strategy: bool = False,
             carried: Optional[AssertionBatch] = None, flow: Flow = Flow.Sva,
             rtl_iteration: Optional[int] = None, strip: bool = False) -> SvaFlowResult:
    """Annotation prompt once (unless audited annotations are given), then n SVA batches."""
    if n_batches < 1:
        raise ValueError("n_batches must be at least 1")
    rs = sync_ruleset_version(rs, booklog.records(), PromptKind.SvaGen.value)
    records: List[IterationRecord] = []

    if annotations is None:
        annotations, record = generate_annotations(module, annotation_rules, gateway, booklog, budget,
                                                   flow, rtl_iteration)
        records.append(record)

    bundle = compose_sva_prompt(module, rs, budget, strip=strip, fsm_strategy=fsm_strategy)
    batches = [carried] if carried is not None else []
    # Sequential calls keep mock playback order deterministic.
    for n in range(1, n_batches + 1):
        text = _call(gateway, booklog, bundle, flow, rs, rtl_iteration)
        batch = parse_batch(text, module, batch_id=n)
        findings = lint(batch, module, rs)
        records.append(booklog.add(
            flow=flow,
            ruleset_version=rs.version,
            prompt_digest=bundle.digest,
            completion_text=text,
            batch_stats=_batch_stats(batch, findings),
            prompt_kind=bundle.kind.value,
            rules_digest=rs.digest,
            rtl_iteration=rtl_iteration,
            lint_categories=_categories(findings),
            notes=f"batch {n} of {n_batches}",
        ))
        batches.append(batch)

    merged = dedup(batches)
    logger.debug(f"SVA flow for {module.name}: {sum(len(b) for b in batches)} assertions, "
                 f"{len(merged)} after dedup")
    try:
        ft = emit_ft(module, merged, annotations.annotations, opts, rs)
    except LintErrorsPresent as e:
        # The merged SVA is still returned so it can be fixed by hand.
        logger.warning(f"FT not emitted for {module.name}: {e}")
        return SvaFlowResult(ft=None, merged=merged, records=records, annotations=annotations, refused=e)
    return SvaFlowResult(ft=ft, merged=merged, records=records, annotations=annotations)


# -=-=-=-=-=- DESIGN LOOP -=-=-=-=-=- #

@dataclass
class DesignResult:
    rtl: str
    state: ConvergenceState
    records: List[IterationRecord]
    iterations: int = 0
    pending_sva: Optional[Path] = None


@dataclass
class DesignPlan:
    """Where a design loop starts: fresh, or resumed from its booklog."""
    start_iteration: int = 1
    sva_text: Optional[str] = None
    annotations: Optional[AnnotationSet] = None
    rtl: str = ""


def extract_rtl(text: str) -> str:
    m = _MODULE_RE.search(text)
    return m.group(0) + "\n" if m else text


def design_dir(out_dir: Union[str, Path]) -> Path:
    return Path(out_dir) / "design"


def sva_path(out_dir: Union[str, Path], iteration: int) -> Path:
    return design_dir(out_dir) / f"sva_v{iteration}.sv"


def rtl_path(out_dir: Union[str, Path], iteration: int) -> Path:
    return design_dir(out_dir) / f"rtl_v{iteration}.sv"


def annotations_path(out_dir: Union[str, Path]) -> Path:
    return design_dir(out_dir) / "annotations.txt"


def resume_plan(booklog: Booklog, out_dir: Union[str, Path]) -> DesignPlan:
    """Continue after the human SVA edit: re-read the (possibly edited) SVA of the last iteration."""
    records = [r for r in booklog.records() if r.flow == Flow.Design and r.rtl_iteration]
    if not records:
        return DesignPlan()
    last = max(r.rtl_iteration for r in records)
    edited = sva_path(out_dir, last)
    rtl_file = rtl_path(out_dir, last)
    ann_file = annotations_path(out_dir)
    header_module = parse_module(rtl_file.read_text(encoding="utf-8")) if rtl_file.exists() else None
    annotations = None
    if ann_file.exists() and header_module is not None:
        annotations = parse_annotation_set(ann_file.read_text(encoding="utf-8"), header_module)
    logger.debug(f"Resuming design loop after RTL iteration {last} with {edited}")
    return DesignPlan(
        start_iteration=last + 1,
        sva_text=edited.read_text(encoding="utf-8") if edited.exists() else None,
        annotations=annotations,
        rtl=rtl_file.read_text(encoding="utf-8") if rtl_file.exists() else "",
    )


def _run_records(records: Sequence[IterationRecord], plan: DesignPlan, start: int) -> List[IterationRecord]:
    """Design records of this run; a resumed run reaches back to its first RTL iteration."""
    if plan.start_iteration > 1:
        firsts = [i for i, r in enumerate(records[:start])
                  if r.flow == Flow.Design and r.rtl_iteration == 1 and r.prompt_kind == PromptKind.RtlGen.value]
        start = firsts[-1] if firsts else 0
    return [r for r in records[start:] if r.flow == Flow.Design]


def _design_state(run: Sequence[IterationRecord], plateau_window: int,
                  max_iters: Optional[int] = None) -> ConvergenceState:
    checkpoints = [r for r in run if r.prompt_kind == FPV_PROMPT_KIND]
    return check_convergence(checkpoints, plateau_window, max_iters)


def design_loop(spec: str, interface: str, rs: RuleSet, gateway: LlmGateway, engine: Engine,
                booklog: Booklog, out_dir: Union[str, Path], annotation_rules: RuleSet,
                rtl_rules: Optional[RuleSet] = None, max_iters: int = DEFAULT_MAX_ITERS,
                plateau_window: int = DEFAULT_PLATEAU_WINDOW, n_batches: int = 1,
                budget: Budget = Budget(), opts: FtOptions = FtOptions(force=True),
                interactive: bool = False, edited_sva: Sequence[Union[str, Path]] = (),
                plan: Optional[DesignPlan] = None) -> DesignResult:
    """Generate RTL, generate SVA, prove, let a human fix the SVA, regenerate the RTL with it.

    The previous RTL never enters a prompt; only the specification, the interface and the
    audited SVA do.
    """
    plan = plan or DesignPlan()
    rtl_rules = rtl_rules or RuleSet()
    design_dir(out_dir).mkdir(parents=True, exist_ok=True)
    sva_text = plan.sva_text
    annotations = plan.annotations
    rtl = plan.rtl
    start = len(booklog.records())
    run = _run_records(booklog.records(), plan, start)
    state = _design_state(run, plateau_window)
    iteration = plan.start_iteration - 1

    for iteration in range(plan.start_iteration, max_iters + 1):
        # RTL generation, with the audited SVA appended after the first iteration.
        bundle = compose_rtl_prompt(spec, interface, sva_text, budget, rtl_rules)
        text = _call(gateway, booklog, bundle, Flow.Design, rtl_rules, iteration)
        rtl = extract_rtl(text)
        rtl_file = rtl_path(out_dir, iteration)
        rtl_file.write_text(rtl, encoding="utf-8")
        booklog.add(flow=Flow.Design, ruleset_version=rtl_rules.version, prompt_digest=bundle.digest,
                    completion_text=text, prompt_kind=bundle.kind.value, rules_digest=rtl_rules.digest,
                    rtl_iteration=iteration, artifacts=[str(rtl_file)],
                    notes="with SVA" if sva_text else "from specification")

        report, ft, merged, error, annotations = _prove_iteration(
            rtl, rs, annotation_rules, gateway, engine, booklog, out_dir, iteration, n_batches,
            budget, opts, annotations, sva_text)
        sva_file = sva_path(out_dir, iteration)
        sva_file.write_text(merged.render(), encoding="utf-8")
        booklog.add(
            flow=Flow.Design,
            ruleset_version=rs.version,
            prompt_digest=sha256_hex(ft.property_module_text) if ft else "",
            batch_stats=BatchStats(n_assertions=len(merged)),
            fpv_stats=FpvStats.of(report),
            prompt_kind=FPV_PROMPT_KIND,
            rules_digest=rs.digest,
            rtl_iteration=iteration,
            artifacts=[str(sva_file)],
            notes=f"FPV of RTL iteration {iteration}",
            error=error,
        )

        run = _run_records(booklog.records(), plan, start)
        state = _design_state(run, plateau_window, max_iters)
        logger.debug(f"Design iteration {iteration}: {state.status.value} ({state.reason})")
        if state.status != ConvergenceStatus.Running:
            return DesignResult(rtl=rtl, state=state, records=run, iterations=iteration)

        # Human SVA edit point.
        if interactive:
            return DesignResult(
                rtl=rtl,
                state=ConvergenceState(status=ConvergenceStatus.Running,
                                       reason=f"edit {sva_file} and resume"),
                records=run, iterations=iteration, pending_sva=sva_file)
        if iteration - 1 < len(edited_sva):
            staged = Path(edited_sva[iteration - 1]).read_text(encoding="utf-8")
            sva_file.write_text(staged, encoding="utf-8")
        sva_text = sva_file.read_text(encoding="utf-8")

    if state.status == ConvergenceStatus.Running:
        state = ConvergenceState(status=ConvergenceStatus.Exhausted,
                                 reason=f"no convergence within {max_iters} iterations")
    return DesignResult(rtl=rtl, state=state, records=run, iterations=iteration)


def _prove_iteration(rtl: str, rs: RuleSet, annotation_rules: RuleSet, gateway: LlmGateway, engine: Engine,
                     booklog: Booklog, out_dir, iteration: int, n_batches: int, budget: Budget,
                     opts: FtOptions, annotations: Optional[AnnotationSet], sva_text: Optional[str]):
    try:
        module = parse_module(rtl)
    except FrontendError as e:
        logger.error(f"Generated RTL of iteration {iteration} does not parse: {str(e)}")
        carried = parse_batch(sva_text) if sva_text else AssertionBatch()
        return (FpvReport(compiled=False, engine="frontend"), None, carried,
                f"{type(e).__name__}: {e}", annotations)

    carried = parse_batch(sva_text, module) if sva_text else None
    try:
        result = sva_flow(module, rs, annotation_rules, gateway, n_batches, booklog, budget, opts,
                          annotations=annotations, carried=carried, flow=Flow.Design,
                          rtl_iteration=iteration)
    except Exception as e:
        logger.error(f"SVA flow failed in design iteration {iteration}: {str(e)}")
        logger.error(f"Traceback: {traceback.format_exc()}")
        raise

    if result.ft is None:
        raise result.refused
    if annotations is None:
        annotations_path(out_dir).write_text(result.annotations.to_text(), encoding="utf-8")
    write_ft(result.ft, design_dir(out_dir) / f"iter{iteration}")
    report = engine.run(result.ft)
    return report, result.ft, result.merged, None, result.annotations
