"""FT emission: property module, bind statement, liveness assertions and engine config."""
from pathlib import Path, PurePosixPath
from typing import List, Optional, Sequence
import logging

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from ..errors import LintErrorsPresent, NoClockPort
from ..frontend import RtlModule
from ..rulebook import RuleSet, builtin_rules
from ..sva import Assertion, AssertionBatch, errors_of, lint, parse_batch
from .models import (
    Attribute, EngineMode, EngineOptions, FtArtifact, FtOptions, TransactionAnnotation,
)

# Configure logging
logger = logging.getLogger(__name__)

_ENGINES = {
    EngineMode.Prove: "abc pdr",
    EngineMode.Bmc: "smtbmc",
    EngineMode.Cover: "smtbmc",
}

_env = Environment(
    loader=FileSystemLoader(Path(__file__).parent / "templates"),
    undefined=StrictUndefined,
    keep_trailing_newline=True,
)
_env.filters["basename"] = lambda p: PurePosixPath(p).name


def design_path(design: str) -> str:
    return f"rtl/{design}.sv"


def prop_path(design: str) -> str:
    return f"{design}_prop.sv"


BIND_PATH = "bind.sv"


def engine_path(design: str) -> str:
    return f"{design}.sby"


def emit_liveness(annotation: TransactionAnnotation, depth: int = 16) -> List[Assertion]:
    """Bounded liveness (`##[1:depth]`) and request-stability assertions for one transaction."""
    if Attribute.EventualResponse not in annotation.attributes:
        return []
    req, resp = annotation.request, annotation.response
    accepted = f"{req.valid} && {req.ready}" if req.ready else req.valid
    lines = [
        f"// {annotation.name}: an accepted request gets a response within {depth} cycles",
        f"as__{annotation.name}_eventual_response: assert property ({accepted} |-> ##[1:{depth}] {resp.valid});",
    ]
    if Attribute.StableData in annotation.attributes and req.ready and req.data:
        held = " && ".join(f"{d} == $past({d})" for d in req.data)
        lines += [
            f"// {annotation.name}: request data holds while the request waits",
            f"as__{annotation.name}_data_stable: assert property ({req.valid} && !{req.ready} |=> {held});",
        ]
    return parse_batch("\n".join(lines)).assertions


def emit_engine_config(module: RtlModule, artifact_paths: Sequence[str],
                       engine_opts: EngineOptions = EngineOptions()) -> str:
    return _env.get_template("engine.sby.j2").render(
        mode=engine_opts.mode.value,
        depth=engine_opts.depth,
        timeout=engine_opts.timeout,
        engine=_ENGINES[engine_opts.mode],
        sources=list(artifact_paths),
        top=module.name,
    )


def _reset_condition(module: RtlModule, opts: FtOptions) -> Optional[str]:
    name = opts.reset or (module.reset.name if module.reset else None)
    if name is None:
        return None
    if opts.reset_active_low is not None:
        active_low = opts.reset_active_low
    else:
        port = module.port(name)
        active_low = port.active_low if port and port.is_reset else name.endswith("_n")
    # The property is disabled while reset is asserted.
    return f"!{name}" if active_low else name


def emit_ft(module: RtlModule, batch: AssertionBatch,
            annotations: Sequence[TransactionAnnotation] = (),
            opts: FtOptions = FtOptions(), rs: Optional[RuleSet] = None) -> FtArtifact:
    """Build the formal testbench for `module` around `batch`."""
    clock = opts.clock or (module.clock.name if module.clock else None)
    if clock is None:
        raise NoClockPort(f"{module.name} has no clock port; pass a clock name")

    errors = errors_of(lint(batch, module, rs or builtin_rules()))
    if errors and not opts.force:
        raise LintErrorsPresent(errors)
    if errors:
        logger.warning(f"Emitting FT for {module.name} with {len(errors)} lint error(s) (forced)")

    liveness: List[Assertion] = []
    for annotation in annotations:
        liveness.extend(emit_liveness(annotation, opts.liveness_depth))

    design = module.name
    property_text = _env.get_template("property_module.sv.j2").render(
        design=design,
        parameters=module.parameters,
        ports=module.ports,
        clock=clock,
        reset=_reset_condition(module, opts),
        assertions=batch.render().strip(),
        liveness="\n\n".join(a.render() for a in liveness),
    )
    bind_text = _env.get_template("bind.sv.j2").render(design=design, parameters=module.parameters)
    sources = [design_path(design), prop_path(design), BIND_PATH]
    config = emit_engine_config(module, sources, opts.engine)

    logger.debug(f"FT for {design}: {len(batch)} assertions, {len(liveness)} liveness assertions")
    return FtArtifact(
        design=design,
        property_module_text=property_text,
        bind_text=bind_text,
        engine_config_text=config,
        files=[
            (design_path(design), module.source_text.rstrip() + "\n"),
            (prop_path(design), property_text),
            (BIND_PATH, bind_text),
            (engine_path(design), config),
        ],
        batch=AssertionBatch(id=batch.id, assertions=list(batch.assertions) + liveness),
    )


def emit_scaffold(module: RtlModule, opts: FtOptions = FtOptions()) -> FtArtifact:
    """FT with property and binding files but no assertions yet."""
    return emit_ft(module, AssertionBatch(), (), opts)
