from .booklog import Booklog, export_json, export_table
from .convergence import DEFAULT_PLATEAU_WINDOW, check_convergence, sync_ruleset_version
from .flows import (
    DEFAULT_MAX_ITERS, DesignPlan, DesignResult, SvaFlowResult, design_loop, extract_rtl,
    generate_annotations, refine_iteration, resume_plan, sva_flow, sva_path,
)
from .models import (
    FPV_PROMPT_KIND, BatchStats, ConvergenceState, ConvergenceStatus, Flow, FpvStats, IterationRecord,
)

__all__ = [
    "BatchStats",
    "Booklog",
    "ConvergenceState",
    "ConvergenceStatus",
    "DEFAULT_MAX_ITERS",
    "DEFAULT_PLATEAU_WINDOW",
    "DesignPlan",
    "DesignResult",
    "FPV_PROMPT_KIND",
    "Flow",
    "FpvStats",
    "IterationRecord",
    "SvaFlowResult",
    "check_convergence",
    "design_loop",
    "export_json",
    "export_table",
    "extract_rtl",
    "generate_annotations",
    "refine_iteration",
    "resume_plan",
    "sva_flow",
    "sva_path",
    "sync_ruleset_version",
]
