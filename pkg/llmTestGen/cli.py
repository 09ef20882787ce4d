"""
Command line interface

    llmtestgen extract --project PATH --out pairs.jsonl
    llmtestgen generate --project PATH [--pairs pairs.jsonl] --mode full \\
        --cassette run.jsonl --cassette-mode replay --out out/
    llmtestgen report out/rep0/results.jsonl out/rep1/results.jsonl --out report/

Exit status: 0 success, 2 usage error, 3 environment error
(missing toolchain, invalid configuration or project), 4 some pipeline aborted.
"""
from functools import wraps
import logging
import os
from pathlib import Path
import sys

import click
from click.core import ParameterSource

from llmTestGen.config import PipelineMode, RunConfig, load_config
from llmTestGen.constants import EXIT_ENVIRONMENT, EXIT_PIPELINE_ABORT
from llmTestGen.corpus.corpusExtractor import CorpusExtractor
from llmTestGen.corpus.dataPair import BuildSystem, ProjectRef, read_pairs, write_pairs
from llmTestGen.errors import ConfigError, PreconditionError, ProjectError, ReportError, \
    ToolchainNotFoundError
from llmTestGen.llm.cassette import Cassette, CassetteMode
from llmTestGen.llm.llmClient import LlmClient, OpenAiChatBackend
from llmTestGen.metrics.metricsReporter import ReportFormat, emit, render_table, \
    tally_repeats
from llmTestGen.refiner.scheduler import read_results, run_batch
from llmTestGen.validation.toolchain import JavacToolchain, MavenToolchain, ToolchainAdapter

logger = logging.getLogger(__name__)

REPORT_JSON = "report.json"
REPORT_CSV = "report.csv"

# command line option -> RunConfig field
_GENERATE_OPTIONS = {
    "project": "project_path",
    "mode": "mode",
    "cassette": "cassette_path",
    "cassette_mode": "cassette_mode",
    "model": "model_name",
    "max_invalid": "max_invalid",
    "iteration_cap": "hard_iteration_cap",
    "parallelism": "parallelism",
    "out": "output_dir",
    "token_budget": "token_budget",
    "temperature": "temperature",
    "classpath": "classpath",
    "repeat": "repeat",
    "keep_workspaces": "keep_workspaces",
}

_PATH = click.Path(path_type=Path)


def environment_errors(fn):
    """
    Report the errors of the environment and exit with EXIT_ENVIRONMENT
    """
    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ToolchainNotFoundError, ConfigError, ProjectError, ReportError) as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_ENVIRONMENT)

    return wrapper


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="log debug messages")
def main(verbose: bool):
    """
    Generation of unit tests for Java focal methods by a chat model
    """
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--project", type=_PATH, required=True, help="root of the Java project")
@click.option("--out", type=_PATH, default=Path("pairs.jsonl"), show_default=True,
              help="data pair file")
@environment_errors
def extract(project: Path, out: Path):
    """
    Collect the pairs of focal methods and their test methods
    """
    p = ProjectRef.discover(project)
    ex = CorpusExtractor(p)
    pairs = ex.extract_pairs()
    write_pairs(pairs, out)
    if not pairs:
        logger.warning("no data pairs found in %s", p.root_path)
        click.echo(f"warning: no data pairs found in {p.root_path}", err=True)
    click.echo(f"{len(pairs):d} data pairs written to {out}"
               f" ({len(ex.dropped):d} tests dropped, {len(ex.skipped):d} files skipped)")


def make_toolchain(config: RunConfig, project: ProjectRef, framework_version: str) -> ToolchainAdapter:
    kwargs = dict(classpath=config.classpath,
                  framework_version=framework_version,
                  compile_timeout=config.compile_timeout,
                  execute_timeout=config.execute_timeout)
    if project.build_system == BuildSystem.MAVEN:
        return MavenToolchain(**kwargs)
    return JavacToolchain(**kwargs)


def _explicit_flags(ctx: click.Context, params: dict) -> dict:
    flags = {}
    for opt, name in _GENERATE_OPTIONS.items():
        if ctx.get_parameter_source(opt) != ParameterSource.COMMANDLINE:
            continue
        v = params[opt]
        if opt == "mode":
            v = PipelineMode(v)
        elif opt == "cassette_mode":
            v = CassetteMode(v)
        elif opt == "classpath":
            v = tuple(p for p in v.split(os.pathsep) if p)
        flags[name] = v
    return flags


@main.command()
@click.option("--project", type=_PATH, help="root of the Java project")
@click.option("--pairs", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="data pair file, the pairs are extracted from the project if not specified")
@click.option("--mode", type=click.Choice([m.value for m in PipelineMode]))
@click.option("--cassette", type=_PATH, help="file with recorded chat traffic")
@click.option("--cassette-mode", type=click.Choice([m.value for m in CassetteMode]))
@click.option("--model")
@click.option("--max-invalid", type=click.IntRange(min=1))
@click.option("--iteration-cap", type=click.IntRange(min=1))
@click.option("--parallelism", type=click.IntRange(min=1))
@click.option("--out", type=_PATH, help="output directory")
@click.option("--token-budget", type=click.IntRange(min=1))
@click.option("--temperature", type=click.FloatRange(0.0, 2.0))
@click.option("--classpath", help="jars for compilation, separated by the path separator")
@click.option("--repeat", type=click.IntRange(min=0), help="index of the repetition of the experiment")
@click.option("--keep-workspaces", is_flag=True, help="do not delete the scratch copies of the project")
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="JSON config file")
@click.pass_context
@environment_errors
def generate(ctx: click.Context, pairs, config_file, **params):
    """
    Generate (and refine) a test for every data pair
    """
    config = load_config(_explicit_flags(ctx, params), config_file)
    if config.project_path is None:
        raise click.UsageError("the project is not specified (--project or config)")
    project = ProjectRef.discover(config.project_path)
    extractor = CorpusExtractor(project)
    if pairs is None:
        data_pairs = extractor.extract_pairs()
    else:
        data_pairs = read_pairs(pairs, project)

    cassette = Cassette.open(config.cassette_mode, config.cassette_path)
    backend = None
    if config.cassette_mode != CassetteMode.REPLAY:
        backend = OpenAiChatBackend(max_in_flight=config.max_in_flight)
    client = LlmClient(cassette, backend)
    toolchain = make_toolchain(config, project, extractor.framework_version())

    results, path = run_batch(config, project, data_pairs, client, toolchain)
    aborted = [r for r in results if r.aborted]
    compiled = sum(r.final.compiled for r in results)
    passed = sum(r.final.passed for r in results)
    click.echo(f"{len(results):d} pipelines: {compiled:d} compiled, {passed:d} passed,"
               f" {len(aborted):d} aborted; results in {path}")
    for r in aborted:
        click.echo(f"aborted {r.data_pair.pair_id}: {r.abort_reason}", err=True)
    if aborted:
        ctx.exit(EXIT_PIPELINE_ABORT)


@main.command()
@click.argument("results", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", type=_PATH, default=Path("report"), show_default=True,
              help="output directory")
@environment_errors
def report(results, out: Path):
    """
    Metrics of results files, every file is one repeat of the experiment
    """
    repeats = [read_results(p)[1] for p in results]
    try:
        rep = tally_repeats(repeats)
    except PreconditionError as e:
        raise click.UsageError(str(e))
    emit(rep, ReportFormat.JSON, out / REPORT_JSON)
    emit(rep, ReportFormat.CSV, out / REPORT_CSV)
    click.echo(render_table(rep))


if __name__ == "__main__":
    main()
