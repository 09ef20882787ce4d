from dataclasses import dataclass
from enum import Enum
import json
import os
from pathlib import Path
from typing import List, Sequence, Tuple

from llmTestGen.errors import PreconditionError, ProjectError


class BuildSystem(Enum):
    MAVEN = "maven-like"
    PLAIN = "plain-compiler"


MAVEN_MANIFEST = "pom.xml"
MAVEN_SOURCE_ROOTS = ("src/main/java",)
MAVEN_TEST_ROOTS = ("src/test/java",)
PLAIN_SOURCE_ROOTS = ("src",)
PLAIN_TEST_ROOTS = ("test",)


@dataclass(frozen=True)
class ProjectRef():
    """
    Project level input of the data pair collection

    :ivar ~.root_path: absolute path of the project directory
    :ivar ~.source_roots: absolute paths of the production source roots
    :ivar ~.test_roots: absolute paths of the test source roots
    """
    root_path: Path
    build_system: BuildSystem
    source_roots: Tuple[Path, ...]
    test_roots: Tuple[Path, ...]

    @classmethod
    def discover(cls, root: Path) -> "ProjectRef":
        """
        Detect the layout of the project from its build manifest
        """
        root = Path(root).expanduser().resolve()
        if (root / MAVEN_MANIFEST).is_file():
            bs = BuildSystem.MAVEN
            src, test = MAVEN_SOURCE_ROOTS, MAVEN_TEST_ROOTS
        else:
            bs = BuildSystem.PLAIN
            src, test = PLAIN_SOURCE_ROOTS, PLAIN_TEST_ROOTS
        p = cls(root, bs,
                tuple(root / r for r in src),
                tuple(root / r for r in test))
        p.validate()
        return p

    def validate(self):
        root = self.root_path
        if not root.is_dir():
            raise ProjectError(f"{root} is not a directory")
        if not os.access(root, os.R_OK | os.X_OK):
            raise ProjectError(f"{root} is not readable")
        if not self.source_roots or not self.test_roots:
            raise ProjectError("source and test roots must not be empty", self)
        for s in self.source_roots:
            for t in self.test_roots:
                if s == t or s in t.parents or t in s.parents:
                    raise ProjectError("source and test roots are not disjoint", s, t)

    @property
    def manifest_path(self) -> Path:
        return self.root_path / MAVEN_MANIFEST

    def relative(self, path: Path) -> str:
        return Path(path).relative_to(self.root_path).as_posix()

    def test_root_of(self, path: Path) -> Path:
        for r in self.test_roots:
            if r in Path(path).parents:
                return r
        raise PreconditionError(f"{path} is not under a test root")

    def source_root_of(self, path: Path) -> Path:
        for r in self.source_roots:
            if r in Path(path).parents:
                return r
        raise PreconditionError(f"{path} is not under a source root")

    def to_record(self) -> dict:
        return {
            "root": ".",
            "build_system": self.build_system.value,
            "source_roots": [self.relative(r) for r in self.source_roots],
            "test_roots": [self.relative(r) for r in self.test_roots],
        }

    @classmethod
    def from_record(cls, rec: dict, root: Path) -> "ProjectRef":
        root = Path(root) / rec.get("root", ".")
        return cls(root,
                   BuildSystem(rec["build_system"]),
                   tuple(root / r for r in rec["source_roots"]),
                   tuple(root / r for r in rec["test_roots"]))


@dataclass(frozen=True)
class MethodRef():
    """
    Location and shape of a method declaration

    :ivar ~.file_path: absolute path of the declaring file
    :ivar ~.class_name: name of the declaring class, nested classes are
        dotted relative to the package (Outer.Inner)
    :ivar ~.param_types: declared parameter types in the text of the source
    :ivar ~.start_line: 1-based line of the first modifier
    :ivar ~.end_line: 1-based line of the closing brace
    """
    file_path: Path
    class_name: str
    method_name: str
    param_count: int
    param_types: Tuple[str, ...]
    start_line: int
    end_line: int

    def __post_init__(self):
        if self.start_line > self.end_line:
            raise PreconditionError("start_line > end_line", self)
        if self.param_count != len(self.param_types):
            raise PreconditionError("param_count does not match param_types", self)

    @property
    def sort_key(self):
        return (self.file_path.as_posix(), self.start_line)

    def __str__(self):
        params = ", ".join(self.param_types)
        return f"{self.class_name:s}.{self.method_name:s}({params:s})"

    def to_record(self, root: Path) -> dict:
        return {
            "file_path": self.file_path.relative_to(root).as_posix(),
            "class_name": self.class_name,
            "method_name": self.method_name,
            "param_count": self.param_count,
            "param_types": list(self.param_types),
            "start_line": self.start_line,
            "end_line": self.end_line,
        }

    @classmethod
    def from_record(cls, rec: dict, root: Path) -> "MethodRef":
        return cls(Path(root) / rec["file_path"],
                   rec["class_name"],
                   rec["method_name"],
                   rec["param_count"],
                   tuple(rec["param_types"]),
                   rec["start_line"],
                   rec["end_line"])


@dataclass(frozen=True)
class DataPair():
    """
    Focal method and its ground-truth test method
    """
    focal: MethodRef
    test: MethodRef
    project: ProjectRef

    @property
    def pair_id(self) -> str:
        return f"{self.focal.class_name:s}.{self.focal.method_name:s}@{self.focal.start_line:d}"

    def to_record(self) -> dict:
        root = self.project.root_path
        return {
            "focal": self.focal.to_record(root),
            "test": self.test.to_record(root),
            "project": self.project.to_record(),
        }

    @classmethod
    def from_record(cls, rec: dict, project: ProjectRef) -> "DataPair":
        root = project.root_path
        return cls(MethodRef.from_record(rec["focal"], root),
                   MethodRef.from_record(rec["test"], root),
                   project)


@dataclass(frozen=True)
class FocalContext():
    """
    Code context of the focal method which is put into prompts

    :ivar ~.focal_method_source: signature and body of the focal method
    :ivar ~.class_declaration: header of the focal class (modifiers preserved)
    :ivar ~.fields_decls: declarations of the fields declared in the focal class
    :ivar ~.method_signatures: signatures of constructors and instance methods
    :ivar ~.framework_version: unit test framework, e.g. "JUnit 4"
    """
    focal_method_name: str
    focal_method_source: str
    focal_class_name: str
    class_declaration: str
    fields_decls: Tuple[str, ...]
    method_signatures: Tuple[str, ...]
    framework_version: str


def write_pairs(pairs: Sequence[DataPair], path: Path) -> Path:
    """
    Store pairs as JSON lines, one pair per line
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for p in pairs:
            f.write(json.dumps(p.to_record(), sort_keys=True))
            f.write("\n")
    return path


def read_pairs(path: Path, project: ProjectRef) -> List[DataPair]:
    res = []
    with Path(path).open(encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                res.append(DataPair.from_record(json.loads(line), project))
    return res
