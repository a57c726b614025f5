from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional, Protocol, Sequence, Union
import logging
import shlex
import shutil
import subprocess
import threading
import time

from ..errors import EngineNotFound, SchemaError
from ..forge import FtArtifact, engine_path
from ..kvfile import iter_records
from .logparse import parse_engine_log
from .models import FpvReport, ProofStatus

# Configure logging
logger = logging.getLogger(__name__)

DEFAULT_COMMAND = "{cmd} {config_path}"


class Engine(Protocol):
    name: str

    def run(self, ft: FtArtifact) -> FpvReport:
        ...


class ExternalEngine:
    """Runs the open-source engine on the FT copied into `work/<design>/<timestamp>/`."""

    name = "external"

    def __init__(self, cmd: str = "sby -f", work_root: Union[str, Path] = "work",
                 template: str = DEFAULT_COMMAND, timeout: Optional[int] = None):
        self.cmd = cmd
        self.work_root = Path(work_root)
        self.template = template
        self.timeout = timeout

    def _workspace(self, design: str) -> Path:
        stamp = datetime.now().strftime("%Y%m%d-%H%M%S-%f")
        path = self.work_root / design / stamp
        path.mkdir(parents=True, exist_ok=False)
        return path

    def run(self, ft: FtArtifact) -> FpvReport:
        executable = shlex.split(self.cmd)[0] if self.cmd.strip() else ""
        if not executable or shutil.which(executable) is None:
            raise EngineNotFound(f"engine command {executable or self.cmd!r} is not on PATH")

        workspace = self._workspace(ft.design)
        for relative, content in ft.files:
            target = workspace / relative
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(content, encoding="utf-8")
        command = self.template.format(cmd=self.cmd, config_path=engine_path(ft.design))
        logger.debug(f"Running engine in {workspace}: {command}")

        started = time.monotonic()
        try:
            result = subprocess.run(shlex.split(command), cwd=workspace, capture_output=True,
                                    text=True, timeout=self.timeout)
        except subprocess.TimeoutExpired:
            runtime = time.monotonic() - started
            logger.warning(f"Engine timed out after {runtime:.1f}s on {ft.design}")
            return FpvReport(per_assertion={n: ProofStatus.Unknown for n in ft.assertion_names},
                             compiled=True, engine=self.cmd, runtime=runtime)
        runtime = time.monotonic() - started

        log = result.stdout + result.stderr
        (workspace / "engine.log").write_text(log, encoding="utf-8")
        report = parse_engine_log(log, ft.assertion_names, engine=self.cmd, runtime=runtime)
        if result.returncode != 0 and not report.compiled:
            logger.warning(f"Engine exited with {result.returncode} and an unreadable log; see {workspace}")
        return report


_STATUS_WORDS = {
    "proven": ProofStatus.Proven, "pass": ProofStatus.Proven,
    "failing": ProofStatus.Failing, "fail": ProofStatus.Failing,
    "unknown": ProofStatus.Unknown,
}
DEFAULT_KEYS = ("*", "all")


def parse_mock_script(text: str) -> Dict[str, str]:
    """`name|status` lines; `*` or `all` sets the default, `compiled|false` fails compilation."""
    script = {}
    for lineno, parts in iter_records(text, 2):
        if len(parts) != 2:
            raise SchemaError(f"mock script line {lineno}: expected 'name|status'")
        name, status = parts[0], parts[1].lower()
        if name != "compiled" and status not in _STATUS_WORDS:
            raise SchemaError(f"mock script line {lineno}: unknown status {parts[1]!r}")
        script[name] = status
    return script


class MockEngine:
    """Scripted statuses; run n uses script n and the last script repeats."""

    name = "mock"

    def __init__(self, scripts: Sequence[Dict[str, str]]):
        if not scripts:
            raise SchemaError("mock engine needs at least one script")
        self.scripts: List[Dict[str, str]] = list(scripts)
        self.runs = 0
        self._lock = threading.Lock()

    @classmethod
    def from_files(cls, paths: Sequence[Union[str, Path]]) -> "MockEngine":
        return cls([parse_mock_script(Path(p).read_text(encoding="utf-8")) for p in paths])

    def run(self, ft: FtArtifact) -> FpvReport:
        with self._lock:
            script = self.scripts[min(self.runs, len(self.scripts) - 1)]
            self.runs += 1
        if script.get("compiled", "true") == "false":
            return FpvReport(compiled=False, engine=self.name)

        default = next((script[k] for k in DEFAULT_KEYS if k in script), "unknown")
        statuses = {name: _STATUS_WORDS[script.get(name, default)] for name in ft.assertion_names}
        cex = {name: "mock counterexample" for name, s in statuses.items() if s == ProofStatus.Failing}
        logger.debug(f"Mock engine run {self.runs}: {len(statuses)} assertions")
        return FpvReport(per_assertion=statuses, cex_summaries=cex, compiled=True, engine=self.name)


def run(ft: FtArtifact, engine: Engine) -> FpvReport:
    return engine.run(ft)
