"""
Adapters of the Java compiler and of the test runners
"""
from dataclasses import dataclass
import logging
import os
from pathlib import Path
import shutil
import subprocess
import threading
from typing import List, Optional, Sequence

from llmTestGen.constants import DEFAULT_COMPILE_TIMEOUT, DEFAULT_EXECUTE_TIMEOUT, \
    DEFAULT_FRAMEWORK_VERSION, JUNIT5
from llmTestGen.errors import ToolchainError, ToolchainNotFoundError
from llmTestGen.validation.workspace import Workspace

logger = logging.getLogger(__name__)

JUNIT4_RUNNER = "org.junit.runner.JUnitCore"
JUNIT5_LAUNCHER = "org.junit.platform.console.ConsoleLauncher"


@dataclass(frozen=True)
class ToolchainResult():
    """
    :ivar ~.output: stdout and stderr of the tool
    :ivar ~.timed_out: True if the tool was killed after the timeout
    """
    exit_status: int
    output: str
    timed_out: bool = False

    @property
    def ok(self) -> bool:
        return self.exit_status == 0 and not self.timed_out


class ToolchainAdapter():
    """
    Base class of the compile/run backends

    compile the workspace and run the test class in it, the raw output
    of the tools is parsed by the validator
    """

    def compile(self, ws: Workspace) -> ToolchainResult:
        raise NotImplementedError()

    def run_test(self, ws: Workspace, test_class: str) -> ToolchainResult:
        raise NotImplementedError()

    def check_available(self):
        """
        :raise ToolchainNotFoundError: if the tools are not installed
        """
        pass


def which(tool: str) -> str:
    p = shutil.which(tool)
    if p is None:
        raise ToolchainNotFoundError(f"{tool:s} not found in PATH")
    return p


def run_tool(cmd: Sequence[str], cwd: Path, timeout: float) -> ToolchainResult:
    logger.debug("running %s in %s", " ".join(cmd), cwd)
    try:
        proc = subprocess.run(
            list(cmd),
            cwd=cwd,
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            text=True,
            errors="replace",
            timeout=timeout,
            check=False,
        )
    except subprocess.TimeoutExpired as e:
        out = e.output or ""
        if isinstance(out, bytes):
            out = out.decode("utf-8", errors="replace")
        logger.warning("%s timed out after %g s", cmd[0], timeout)
        return ToolchainResult(-1, out, timed_out=True)
    except FileNotFoundError as e:
        raise ToolchainNotFoundError(str(e))
    except OSError as e:
        raise ToolchainError(f"can not run {cmd[0]}: {e}")
    return ToolchainResult(proc.returncode, proc.stdout)


class JavacToolchain(ToolchainAdapter):
    """
    Plain compiler: javac over all production sources and the test,
    java with the JUnit runner on the class path

    :ivar ~.classpath: jars of JUnit and of the project dependencies
    """

    def __init__(self, classpath: Sequence[str]=(),
                 framework_version: str=DEFAULT_FRAMEWORK_VERSION,
                 compile_timeout: float=DEFAULT_COMPILE_TIMEOUT,
                 execute_timeout: float=DEFAULT_EXECUTE_TIMEOUT,
                 javac: str="javac", java: str="java"):
        self.classpath = list(classpath)
        self.framework_version = framework_version
        self.compile_timeout = compile_timeout
        self.execute_timeout = execute_timeout
        self.javac = javac
        self.java = java

    def check_available(self):
        which(self.javac)
        which(self.java)

    def dependency_classpath(self, ws: Workspace) -> List[str]:
        return list(self.classpath)

    def _sources(self, ws: Workspace) -> List[str]:
        files = set()
        for r in ws.source_roots:
            if r.is_dir():
                files.update(p for p in r.rglob("*.java") if p.is_file())
        files.add(ws.test_file)
        return sorted(p.relative_to(ws.project_root).as_posix() for p in files)

    def compile(self, ws: Workspace) -> ToolchainResult:
        out_dir = ws.classes_dir
        shutil.rmtree(out_dir, ignore_errors=True)
        out_dir.mkdir(parents=True)
        cmd = [which(self.javac), "-encoding", "UTF-8", "-nowarn", "-Xmaxerrs", "1000",
               "-d", str(out_dir)]
        cp = self.dependency_classpath(ws)
        if cp:
            cmd += ["-cp", os.pathsep.join(cp)]
        cmd += self._sources(ws)
        return run_tool(cmd, ws.project_root, self.compile_timeout)

    def run_test(self, ws: Workspace, test_class: str) -> ToolchainResult:
        cp = os.pathsep.join([str(ws.classes_dir)] + self.dependency_classpath(ws))
        if self.framework_version == JUNIT5:
            cmd = [which(self.java), "-cp", cp, JUNIT5_LAUNCHER,
                   "--disable-banner", "--details=tree",
                   "--class-path", str(ws.classes_dir),
                   "--select-class", test_class]
        else:
            cmd = [which(self.java), "-cp", cp, JUNIT4_RUNNER, test_class]
        return run_tool(cmd, ws.project_root, self.execute_timeout)


class MavenToolchain(JavacToolchain):
    """
    Dependencies of a maven project are resolved by maven,
    the test itself is compiled and executed the same way as with javac
    """

    def __init__(self, *args, mvn: str="mvn", **kwargs):
        super(MavenToolchain, self).__init__(*args, **kwargs)
        self.mvn = mvn
        self._resolved = None  # type: Optional[List[str]]
        self._lock = threading.Lock()

    def check_available(self):
        super(MavenToolchain, self).check_available()
        which(self.mvn)

    def dependency_classpath(self, ws: Workspace) -> List[str]:
        with self._lock:
            if self._resolved is None:
                cp_file = ws.scratch_root / "classpath.txt"
                r = run_tool([which(self.mvn), "-q", "dependency:build-classpath",
                              f"-Dmdep.outputFile={cp_file}"],
                             ws.project_root, self.compile_timeout)
                if not r.ok or not cp_file.is_file():
                    raise ToolchainError("dependency resolution failed:\n" + r.output)
                text = cp_file.read_text(encoding="utf-8").strip()
                self._resolved = [p for p in text.split(os.pathsep) if p]
            return self._resolved + self.classpath
