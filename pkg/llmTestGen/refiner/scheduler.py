"""
Batch execution of pipelines and the results file

The results file is JSON lines, the first line is the header::

    {"mode": "full", "model": "gpt-3.5-turbo", "project_root": "/path/to/project",
     "repeat": 0, "schema_version": 1}

followed by one PipelineResult record per data pair in the order of the pairs.
"""
from concurrent.futures import ThreadPoolExecutor
import json
import logging
from pathlib import Path
import threading
from typing import List, Optional, Sequence, Tuple

from sortedcontainers import SortedDict

from llmTestGen.config import PipelineMode, RunConfig
from llmTestGen.constants import GENERATED_TEST_SUFFIX, SCHEMA_VERSION
from llmTestGen.corpus.corpusExtractor import CorpusExtractor
from llmTestGen.corpus.dataPair import DataPair, ProjectRef
from llmTestGen.diagnostics.codeAnalyzer import ProjectClassIndex
from llmTestGen.errors import ExtractionError, SchemaMismatchError, ToolchainError, \
    ToolchainNotFoundError
from llmTestGen.java.javaSource import top_level_type_name
from llmTestGen.llm.llmClient import LlmClient
from llmTestGen.refiner.pipeline import PipelineResult, StopReason, run_pipeline
from llmTestGen.utils import canonical_json
from llmTestGen.validation.toolchain import ToolchainAdapter
from llmTestGen.validation.validator import PostRunHook, Validator

logger = logging.getLogger(__name__)

RESULTS_FILE = "results.jsonl"
GENERATED_DIR = "generated"


class ResultCalendar(SortedDict):
    """
    Results of the pipelines keyed by the index of the data pair,
    the order of completion does not matter
    """

    def push(self, index: int, result: PipelineResult):
        assert isinstance(index, int), index.__class__
        assert index not in self, ("result already present", index)
        super(ResultCalendar, self).__setitem__(index, result)

    def in_order(self) -> List[PipelineResult]:
        return list(self.values())


class BatchRunner():
    """
    Runs pipelines of data pairs on a thread pool

    :ivar ~.toolchain: compiler/runner shared by all pipelines,
        every pipeline has its own workspace
    :ivar ~.index: class index of the project, shared read only
    :ivar ~.post_run_hook: optional hook called by the validators after
        every executed test
    """

    def __init__(self, config: RunConfig, project: ProjectRef, client: LlmClient,
                 toolchain: ToolchainAdapter, post_run_hook: Optional[PostRunHook]=None):
        self.config = config
        self.project = project
        self.client = client
        self.toolchain = toolchain
        self.extractor = CorpusExtractor(project)
        self.index = ProjectClassIndex(project) if config.mode == PipelineMode.FULL else None
        self.results = ResultCalendar()
        self.post_run_hook = post_run_hook
        self._lock = threading.Lock()

    def run_one(self, pair: DataPair) -> PipelineResult:
        cfg = self.config
        try:
            ctx = self.extractor.extract_focal_context(pair.focal)
        except ExtractionError as e:
            logger.error("pipeline of %s aborted: %s", pair.pair_id, e)
            return PipelineResult(pair, cfg.mode, (), None, StopReason.ABORTED,
                                  aborted=True, abort_reason=f"ExtractionError: {e}")

        with Validator(self.project, pair.focal, self.toolchain, ctx.framework_version,
                       cfg.rerun_on_failure, cfg.keep_workspaces, self.post_run_hook) as v:
            try:
                return run_pipeline(pair, ctx, cfg, self.client, v, self.index)
            except ToolchainNotFoundError:
                raise
            except ToolchainError as e:
                logger.error("pipeline of %s aborted: %s", pair.pair_id, e)
                return PipelineResult(pair, cfg.mode, (), None, StopReason.ABORTED,
                                      aborted=True, abort_reason=f"ToolchainError: {e}")

    def _task(self, i: int, pair: DataPair):
        r = self.run_one(pair)
        with self._lock:
            self.results.push(i, r)

    def run(self, pairs: Sequence[DataPair]) -> List[PipelineResult]:
        """
        :return: results in the order of pairs
        """
        self.toolchain.check_available()
        logger.info("running %d pipelines (%s mode, parallelism %d)",
                    len(pairs), self.config.mode.value, self.config.parallelism)
        if self.config.parallelism == 1:
            for i, p in enumerate(pairs):
                self._task(i, p)
        else:
            with ThreadPoolExecutor(max_workers=self.config.parallelism) as pool:
                futures = [pool.submit(self._task, i, p) for i, p in enumerate(pairs)]
                for f in futures:
                    # re-raise the environment errors
                    f.result()
        res = self.results.in_order()
        aborted = sum(r.aborted for r in res)
        logger.info("%d pipelines finished, %d aborted", len(res), aborted)
        return res


def results_header(config: RunConfig, project: ProjectRef) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "mode": config.mode.value,
        "model": config.model_name,
        "repeat": config.repeat,
        "project_root": project.root_path.as_posix(),
    }


def write_results(results: Sequence[PipelineResult], header: dict, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        f.write(canonical_json(header))
        f.write("\n")
        for r in results:
            f.write(canonical_json(r.to_record()))
            f.write("\n")
    return path


def read_results(path: Path, project: Optional[ProjectRef]=None
                 ) -> Tuple[dict, List[PipelineResult]]:
    """
    :param project: project of the pairs, taken from the header if None
    :raise SchemaMismatchError: if the file has other schema version
    """
    path = Path(path)
    with path.open(encoding="utf-8") as f:
        lines = [ln for ln in f if ln.strip()]
    if not lines:
        raise SchemaMismatchError(f"{path} is empty")
    try:
        header = json.loads(lines[0])
        version = header["schema_version"]
    except (ValueError, KeyError, TypeError):
        raise SchemaMismatchError(f"{path} does not start with a results header")
    if version != SCHEMA_VERSION:
        raise SchemaMismatchError(
            f"{path} has schema version {version}, expected {SCHEMA_VERSION:d}")
    res = []
    root = Path(header.get("project_root", "."))
    for ln in lines[1:]:
        rec = json.loads(ln)
        p = project
        if p is None:
            p = ProjectRef.from_record(rec["pair"]["project"], root)
        res.append(PipelineResult.from_record(rec, p))
    return header, res


def write_generated_tests(results: Sequence[PipelineResult], out_dir: Path) -> List[Path]:
    """
    Store the final test of every pipeline as
    <out_dir>/<index>-<focal method>/<package path>/<TestClass>.java
    """
    written = []
    for i, r in enumerate(results):
        a = r.final_attempt
        if a is None or not a.test_text:
            continue
        focal = r.data_pair.focal
        name = top_level_type_name(a.test_text) or (focal.file_path.stem + GENERATED_TEST_SUFFIX)
        pkg_dir = focal.file_path.parent.relative_to(r.data_pair.project.source_root_of(focal.file_path))
        d = Path(out_dir) / f"{i:03d}-{focal.method_name:s}" / pkg_dir
        d.mkdir(parents=True, exist_ok=True)
        f = d / f"{name:s}.java"
        f.write_text(a.test_text, encoding="utf-8")
        written.append(f)
    return written


def run_batch(config: RunConfig, project: ProjectRef, pairs: Sequence[DataPair],
              client: LlmClient, toolchain: ToolchainAdapter,
              post_run_hook: Optional[PostRunHook]=None) -> Tuple[List[PipelineResult], Path]:
    """
    Run all pipelines and store results and the generated tests into config.output_dir

    :return: tuple (results, path of the results file)
    """
    results = BatchRunner(config, project, client, toolchain, post_run_hook).run(pairs)
    out = Path(config.output_dir)
    path = write_results(results, results_header(config, project), out / RESULTS_FILE)
    write_generated_tests(results, out / GENERATED_DIR)
    return results, path
