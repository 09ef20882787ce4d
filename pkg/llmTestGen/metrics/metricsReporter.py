"""
Correctness metrics of generated tests

Every pipeline contributes its final outcome. The percentages are computed
for each repeat of the experiment separately, averaged and rounded half-up
to one decimal. Counts are accumulated in :class:`TallyCounts` which can be
added, so a batch tallied in shards gives the same report as the whole batch.
"""
from collections import Counter
import csv
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
import json
import logging
from pathlib import Path
from typing import Dict, Iterable, Sequence

from javalang import tree as jtree
from sortedcontainers import SortedDict

from llmTestGen.constants import SCHEMA_VERSION
from llmTestGen.diagnostics.taxonomy import ErrorCategory, ErrorKind, categorize_compile, \
    categorize_runtime
from llmTestGen.errors import EmptyInputError, JavaSyntaxError, PreconditionError, \
    ReportError, SchemaMismatchError
from llmTestGen.java.javaSource import looks_like_type_declaration, parse_compilation_unit, \
    parse_member
from llmTestGen.refiner.pipeline import PipelineResult
from llmTestGen.utils import canonical_json, round_half_up

logger = logging.getLogger(__name__)

INVALID_BUCKET = "invalid"
# (upper bound inclusive, label)
_BUCKET_BOUNDS = [(0, "0"), (1, "1"), (2, "2"), (3, "3"), (4, "4"), (5, "5"),
                  (10, "6-10"), (15, "11-15")]
ASSERTION_BUCKETS = tuple(label for _, label in _BUCKET_BOUNDS) + (">15", INVALID_BUCKET)
CSV_COLUMNS = ("section", "key", "detail", "value")

METRIC_LABELS = (
    ("syntactic_pct", "Syntactically correct"),
    ("compile_pct", "Compilation success"),
    ("pass_pct", "Execution passed"),
)


class BreakdownStage(Enum):
    COMPILE = "compile"
    RUNTIME = "runtime"


class ReportFormat(Enum):
    # structured record
    JSON = "json"
    # delimited table
    CSV = "csv"


def assertion_bucket(n: int) -> str:
    assert n >= 0, n
    for bound, label in _BUCKET_BOUNDS:
        if n <= bound:
            return label
    return ">15"


def count_assertions(test_source: str) -> int:
    """
    Static number of assertion calls in the test
    (assert* methods and fail, a call inside of a loop counts once)

    :param test_source: test class or bare test methods
    :raise JavaSyntaxError: if the source does not parse
    """
    if not test_source.strip():
        raise JavaSyntaxError("empty test source")
    if looks_like_type_declaration(test_source):
        src = parse_compilation_unit(test_source)
    else:
        src = parse_member(test_source)
    n = 0
    for _, inv in src.tree.filter(jtree.MethodInvocation):
        m = inv.member
        if m.startswith("assert") or m == "fail":
            n += 1
    return n


def final_assertion_bucket(r: PipelineResult) -> str:
    a = r.final_attempt
    if a is None or not a.has_code or not a.outcome.syntactic_ok:
        return INVALID_BUCKET
    try:
        return assertion_bucket(count_assertions(a.test_text or a.test_source))
    except JavaSyntaxError:
        return INVALID_BUCKET


def error_breakdown(results: Iterable[PipelineResult], stage: BreakdownStage) -> Dict[ErrorCategory, int]:
    """
    Frequency of the error categories in the final tests,
    every diagnostic counts (one test may have multiple compilation errors)
    """
    c = Counter()
    for r in results:
        o = r.final
        if stage == BreakdownStage.COMPILE:
            if not o.compiled:
                c.update(categorize_compile(d) for d in o.diagnostics)
        elif o.runtime_failure is not None:
            c[categorize_runtime(o.runtime_failure)] += 1
    return dict(c)


@dataclass
class RepeatCounts():
    total: int = 0
    syntactic: int = 0
    compiled: int = 0
    passed: int = 0

    def __add__(self, other: "RepeatCounts") -> "RepeatCounts":
        return RepeatCounts(self.total + other.total,
                            self.syntactic + other.syntactic,
                            self.compiled + other.compiled,
                            self.passed + other.passed)

    def pct(self, name: str) -> Fraction:
        return Fraction(100 * getattr(self, name), self.total)


@dataclass
class TallyCounts():
    """
    Additive counts of final outcomes

    :ivar ~.per_repeat: repeat index -> RepeatCounts
    """
    per_repeat: SortedDict = field(default_factory=SortedDict)
    compile_breakdown: Counter = field(default_factory=Counter)
    runtime_breakdown: Counter = field(default_factory=Counter)
    assertion_histogram: Counter = field(default_factory=Counter)

    def add_result(self, r: PipelineResult, repeat: int=0):
        o = r.final
        rc = self.per_repeat.get(repeat, RepeatCounts())
        self.per_repeat[repeat] = rc + RepeatCounts(1, int(o.syntactic_ok),
                                                    int(o.compiled), int(o.passed))
        self.compile_breakdown.update(error_breakdown((r,), BreakdownStage.COMPILE))
        self.runtime_breakdown.update(error_breakdown((r,), BreakdownStage.RUNTIME))
        self.assertion_histogram[final_assertion_bucket(r)] += 1

    def __add__(self, other: "TallyCounts") -> "TallyCounts":
        per_repeat = SortedDict(self.per_repeat)
        for k, v in other.per_repeat.items():
            per_repeat[k] = per_repeat.get(k, RepeatCounts()) + v
        return TallyCounts(per_repeat,
                           self.compile_breakdown + other.compile_breakdown,
                           self.runtime_breakdown + other.runtime_breakdown,
                           self.assertion_histogram + other.assertion_histogram)


def count_results(results: Iterable[PipelineResult], repeat: int=0) -> TallyCounts:
    c = TallyCounts()
    for r in results:
        c.add_result(r, repeat)
    return c


@dataclass(frozen=True)
class MetricsReport():
    """
    :ivar ~.total: number of final tests over all repeats
    :ivar ~.repeats_averaged: number of repeats the percentages are averaged over
    :note: pass_pct <= compile_pct <= syntactic_pct <= 100
    """
    total: int
    syntactic_pct: float
    compile_pct: float
    pass_pct: float
    compile_breakdown: Dict[ErrorCategory, int]
    runtime_breakdown: Dict[ErrorCategory, int]
    assertion_histogram: Dict[str, int]
    repeats_averaged: int = 1

    def __post_init__(self):
        if not (0.0 <= self.pass_pct <= self.compile_pct <= self.syntactic_pct <= 100.0):
            raise PreconditionError("inconsistent percentages", self)
        if sum(self.assertion_histogram.values()) != self.total:
            raise PreconditionError("assertion histogram does not sum to the total", self)
        if self.repeats_averaged < 1:
            raise PreconditionError("repeats_averaged has to be >= 1", self)


def report_from_counts(counts: TallyCounts) -> MetricsReport:
    """
    :raise EmptyInputError: if there is nothing counted
    :raise PreconditionError: if the repeats have a different number of results
    """
    repeats = list(counts.per_repeat.values())
    if not repeats or any(rc.total == 0 for rc in repeats):
        raise EmptyInputError("no results to report")
    totals = {rc.total for rc in repeats}
    if len(totals) != 1:
        raise PreconditionError("repeats differ in the number of results",
                                dict(counts.per_repeat))

    def avg(name):
        return round_half_up(sum(rc.pct(name) for rc in repeats) / len(repeats))

    return MetricsReport(
        total=sum(rc.total for rc in repeats),
        syntactic_pct=avg("syntactic"),
        compile_pct=avg("compiled"),
        pass_pct=avg("passed"),
        compile_breakdown=dict(counts.compile_breakdown),
        runtime_breakdown=dict(counts.runtime_breakdown),
        assertion_histogram=dict(counts.assertion_histogram),
        repeats_averaged=len(repeats),
    )


def tally(results: Sequence[PipelineResult]) -> MetricsReport:
    """
    Metrics of a single run
    """
    if not results:
        raise EmptyInputError("no results to report")
    return report_from_counts(count_results(results))


def tally_repeats(repeats: Sequence[Sequence[PipelineResult]]) -> MetricsReport:
    """
    Metrics averaged over repeats of the same experiment
    """
    if not repeats:
        raise EmptyInputError("no results to report")
    counts = TallyCounts()
    for i, results in enumerate(repeats):
        if not results:
            raise EmptyInputError(f"repeat {i:d} has no results")
        counts = counts + count_results(results, i)
    return report_from_counts(counts)


def _breakdown_record(b: Dict[ErrorCategory, int]) -> Dict[str, int]:
    return {c.key: n for c, n in sorted(b.items())}


def report_to_record(report: MetricsReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "total": report.total,
        "repeats_averaged": report.repeats_averaged,
        "syntactic_pct": report.syntactic_pct,
        "compile_pct": report.compile_pct,
        "pass_pct": report.pass_pct,
        "compile_breakdown": _breakdown_record(report.compile_breakdown),
        "runtime_breakdown": _breakdown_record(report.runtime_breakdown),
        "assertion_histogram": {b: report.assertion_histogram[b]
                                for b in ASSERTION_BUCKETS if b in report.assertion_histogram},
    }


def _check_version(version, path: Path):
    if version != SCHEMA_VERSION:
        raise SchemaMismatchError(
            f"{path} has schema version {version}, expected {SCHEMA_VERSION:d}")


def report_from_record(rec: dict) -> MetricsReport:
    return MetricsReport(
        total=int(rec["total"]),
        syntactic_pct=float(rec["syntactic_pct"]),
        compile_pct=float(rec["compile_pct"]),
        pass_pct=float(rec["pass_pct"]),
        compile_breakdown={ErrorCategory.from_key(k): int(v)
                           for k, v in rec["compile_breakdown"].items()},
        runtime_breakdown={ErrorCategory.from_key(k): int(v)
                           for k, v in rec["runtime_breakdown"].items()},
        assertion_histogram={k: int(v) for k, v in rec["assertion_histogram"].items()},
        repeats_averaged=int(rec["repeats_averaged"]),
    )


def _csv_rows(report: MetricsReport):
    yield ("summary", "schema_version", "", SCHEMA_VERSION)
    yield ("summary", "total", "", report.total)
    yield ("summary", "repeats_averaged", "", report.repeats_averaged)
    for name, _ in METRIC_LABELS:
        yield ("metric", name, "", repr(getattr(report, name)))
    for section, b in (("compile", report.compile_breakdown),
                       ("runtime", report.runtime_breakdown)):
        for c, n in sorted(b.items()):
            yield (section, c.kind.value, c.detail, n)
    for b in ASSERTION_BUCKETS:
        if b in report.assertion_histogram:
            yield ("assertions", b, "", report.assertion_histogram[b])


def emit(report: MetricsReport, fmt: ReportFormat, path: Path) -> Path:
    """
    Store the report as JSON record or as CSV table (section,key,detail,value)
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        if fmt == ReportFormat.JSON:
            f.write(canonical_json(report_to_record(report)))
            f.write("\n")
        elif fmt == ReportFormat.CSV:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            w.writerows(_csv_rows(report))
        else:
            raise ValueError(fmt)
    logger.info("report written to %s", path)
    return path


def _load_csv(path: Path) -> MetricsReport:
    with path.open(encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise SchemaMismatchError(f"{path} is not a report table")
    rec = {"compile_breakdown": {}, "runtime_breakdown": {}, "assertion_histogram": {}}
    version = None
    for row in rows[1:]:
        if not row:
            continue
        section, key, detail, value = row
        if section == "summary" and key == "schema_version":
            version = int(value)
        elif section in ("summary", "metric"):
            rec[key] = value
        elif section in ("compile", "runtime"):
            rec[f"{section:s}_breakdown"][ErrorCategory(ErrorKind(key), detail).key] = value
        elif section == "assertions":
            rec["assertion_histogram"][key] = value
        else:
            raise ReportError(f"unknown section {section!r} in {path}")
    _check_version(version, path)
    return report_from_record(rec)


def load_report(path: Path) -> MetricsReport:
    """
    Parse a report written by :func:`emit` (format chosen by the file suffix)
    """
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return _load_csv(path)
    try:
        rec = json.loads(path.read_text(encoding="utf-8"))
    except ValueError as e:
        raise SchemaMismatchError(f"{path} is not a report record: {e}")
    _check_version(rec.get("schema_version"), path)
    try:
        return report_from_record(rec)
    except (KeyError, ValueError) as e:
        raise SchemaMismatchError(f"{path} is not a report record: {e}")


def render_table(report: MetricsReport) -> str:
    """
    Human readable table of the metric rows
    """
    lines = [f"{'metric':<24s}{'%':>7s}"]
    for name, label in METRIC_LABELS:
        lines.append(f"{label:<24s}{getattr(report, name):>7.1f}")
    lines.append(f"({report.total:d} tests, {report.repeats_averaged:d} repeat(s) averaged)")
    return "\n".join(lines)
