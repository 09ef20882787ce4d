"""
Scratch copies of the project where generated tests are compiled and executed
"""
from dataclasses import dataclass, field
import logging
from pathlib import Path, PurePath
import re
import shutil
import tempfile
from typing import List, Optional, Tuple

from llmTestGen.constants import GENERATED_TEST_SUFFIX, JUNIT5
from llmTestGen.corpus.dataPair import MethodRef, ProjectRef
from llmTestGen.errors import JavaSyntaxError, PreconditionError, ProjectError
from llmTestGen.java.javaSource import JavaSource, looks_like_type_declaration, \
    top_level_type_name

logger = logging.getLogger(__name__)

# build outputs and VCS data are not copied into the workspace
COPY_IGNORE = ("target", "build", ".git", ".svn", ".idea", ".gradle")

_IMPORT_LINE = re.compile(r"^\s*import\s+(static\s+)?[\w.]+(\.\*)?\s*;\s*$")
_PACKAGE_LINE = re.compile(r"^\s*package\s+[\w.]+\s*;", re.MULTILINE)

JUNIT4_IMPORTS = ("import org.junit.Test;", "import static org.junit.Assert.*;")
JUNIT5_IMPORTS = ("import org.junit.jupiter.api.Test;",
                  "import static org.junit.jupiter.api.Assertions.*;")


@dataclass
class Workspace():
    """
    Isolated copy of the project with the materialized test

    :ivar ~.scratch_root: temporary directory owned by the workspace
    :ivar ~.project_root: copy of the project inside of the scratch_root
    :ivar ~.focal_dir: directory of the focal class in the copy
    :ivar ~.package: package of the focal class
    :ivar ~.test_file: path of the materialized test (in focal_dir)
    :ivar ~.test_class: fully qualified name of the materialized test class
    """
    scratch_root: Path
    project_root: Path
    source_roots: Tuple[Path, ...]
    focal_dir: Path
    package: str
    test_file: Optional[Path] = None
    test_class: Optional[str] = None
    test_text: Optional[str] = None
    compile_output: str = ""
    _written: List[Path] = field(default_factory=list)

    @property
    def classes_dir(self) -> Path:
        return self.scratch_root / "classes"

    @property
    def test_file_rel(self) -> PurePath:
        """
        Path of the test file relative to the project copy
        (as the compiler reports it)
        """
        assert self.test_file is not None, self
        return PurePath(self.test_file.relative_to(self.project_root).as_posix())

    def remove(self):
        shutil.rmtree(self.scratch_root, ignore_errors=True)


def create_workspace(project: ProjectRef, focal: MethodRef) -> Workspace:
    """
    Copy the project into a new temporary directory
    """
    scratch = Path(tempfile.mkdtemp(prefix="llmtestgen-"))
    root = project.root_path.resolve()
    if scratch == root or root in scratch.parents:
        raise ProjectError("workspace can not be inside of the project", scratch)
    copy = scratch / "project"
    try:
        shutil.copytree(root, copy, ignore=shutil.ignore_patterns(*COPY_IGNORE))
    except OSError as e:
        shutil.rmtree(scratch, ignore_errors=True)
        raise ProjectError(f"can not copy {root} to the workspace: {e}")

    try:
        package = JavaSource.from_file(focal.file_path).package
    except JavaSyntaxError:
        package = ""
    focal_dir = copy / focal.file_path.parent.relative_to(root)
    source_roots = tuple(copy / r.relative_to(root) for r in project.source_roots)
    logger.debug("workspace %s created for %s", scratch, focal)
    return Workspace(scratch, copy, source_roots, focal_dir, package)


def _framework_imports(framework_version: str) -> Tuple[str, ...]:
    if framework_version == JUNIT5:
        return JUNIT5_IMPORTS
    return JUNIT4_IMPORTS


def _normalize_import(line: str) -> str:
    return " ".join(line.replace(";", " ;").split()).replace(" ;", ";")


def render_test_class(test_source: str, package: str, focal_class: str,
                      framework_version: str) -> Tuple[str, str]:
    """
    Turn the generated test into a compilation unit

    A full class is used as it is, only the package declaration is added
    if missing. Bare test methods are wrapped into the class
    <focal_class>GeneratedTest with imports of the test framework
    and the imports found in the response.

    :return: tuple (text of the file, simple name of the test class)
    """
    src = test_source.replace("\r\n", "\n").strip("\n")
    if not src.strip():
        raise PreconditionError("empty test source")

    header = f"package {package:s};\n\n" if package else ""
    if looks_like_type_declaration(src):
        name = top_level_type_name(src) or focal_class + GENERATED_TEST_SUFFIX
        if package and not _PACKAGE_LINE.search(src):
            src = header + src
        return src + "\n", name

    imports = []
    body = []
    for ln in src.split("\n"):
        if _IMPORT_LINE.match(ln):
            imp = _normalize_import(ln)
            if imp not in imports:
                imports.append(imp)
        else:
            body.append(ln)
    all_imports = list(_framework_imports(framework_version))
    all_imports.extend(i for i in imports if i not in all_imports)

    name = focal_class + GENERATED_TEST_SUFFIX
    body_text = "\n".join(("    " + ln) if ln.strip() else "" for ln in body).strip("\n")
    text = (f"{header:s}" + "\n".join(all_imports) + "\n\n"
            f"public class {name:s} {{\n\n{body_text:s}\n}}\n")
    return text, name


def materialize_test(project: ProjectRef, focal: MethodRef, test_source: str,
                     framework_version: str, ws: Optional[Workspace]=None) -> Workspace:
    """
    Write the test into the directory of the focal class in the workspace

    :param ws: workspace of the previous attempt of the same pipeline,
        a new one is created if None
    """
    if not test_source.strip():
        raise PreconditionError("empty test source")
    if ws is None:
        ws = create_workspace(project, focal)

    text, name = render_test_class(test_source, ws.package, focal.file_path.stem,
                                   framework_version)
    for p in ws._written:
        if p.exists():
            p.unlink()
    ws._written.clear()

    f = ws.focal_dir / f"{name:s}.java"
    if f.exists():
        # never overwrite a project class, the compiler reports the misnamed class
        logger.warning("test class %s collides with a project file", name)
        f = ws.focal_dir / f"{focal.file_path.stem:s}{GENERATED_TEST_SUFFIX:s}.java"
    try:
        f.parent.mkdir(parents=True, exist_ok=True)
        f.write_text(text, encoding="utf-8")
    except OSError as e:
        raise ProjectError(f"can not write {f}: {e}")
    ws._written.append(f)
    ws.test_file = f
    ws.test_class = name if not ws.package else f"{ws.package:s}.{name:s}"
    ws.test_text = text
    ws.compile_output = ""
    return ws
