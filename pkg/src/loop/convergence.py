from typing import List, Optional, Sequence

from ..rulebook import RuleSet
from .models import ConvergenceState, ConvergenceStatus, IterationRecord

DEFAULT_PLATEAU_WINDOW = 2


def _checkpoints(records: Sequence[IterationRecord]) -> List[IterationRecord]:
    return [r for r in records if r.fpv_stats is not None]


def check_convergence(records: Sequence[IterationRecord], plateau_window: int = DEFAULT_PLATEAU_WINDOW,
                      max_iters: Optional[int] = None) -> ConvergenceState:
    """Pure over the record sequence: replaying a booklog gives the same state."""
    points = _checkpoints(records)
    if not points:
        return ConvergenceState(status=ConvergenceStatus.Running, reason="no FPV result yet")

    latest = points[-1]
    stats = latest.fpv_stats
    coverage_ok = latest.coverage is None or latest.coverage.complete
    if stats.compiled and stats.n_failing == 0 and stats.n_proven > 0 and coverage_ok:
        reason = f"all {stats.n_proven} assertions proven"
        if latest.coverage is not None:
            reason += " with full coverage"
        return ConvergenceState(status=ConvergenceStatus.ConvergedFullProof, reason=reason)

    if plateau_window >= 2 and len(points) >= plateau_window:
        window = points[-plateau_window:]
        keys = {(p.batch_stats.n_assertions if p.batch_stats else None, p.fpv_stats.n_failing)
                for p in window}
        if len(keys) == 1 and all(p.fpv_stats.compiled for p in window):
            n_assertions, n_failing = keys.pop()
            return ConvergenceState(
                status=ConvergenceStatus.ConvergedPlateau,
                reason=f"{n_assertions} assertions, {n_failing} failing for {plateau_window} iterations")

    if max_iters is not None and len(points) >= max_iters:
        return ConvergenceState(status=ConvergenceStatus.Exhausted,
                                reason=f"no convergence within {max_iters} iterations")
    return ConvergenceState(status=ConvergenceStatus.Running,
                            reason=f"{stats.n_failing} failing after {len(points)} iteration(s)")


def sync_ruleset_version(rs: RuleSet, records: Sequence[IterationRecord],
                         prompt_kind: Optional[str] = None) -> RuleSet:
    """Bump the version when the rules changed since the last recorded iteration of this prompt kind."""
    recorded = [r for r in records if r.rules_digest and (prompt_kind is None or r.prompt_kind == prompt_kind)]
    if not recorded:
        return rs
    last = recorded[-1]
    if last.rules_digest != rs.digest and rs.version <= last.ruleset_version:
        return RuleSet(rules=rs.rules, version=last.ruleset_version + 1)
    return rs
