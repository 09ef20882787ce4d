"""
Generation pipeline of a single data pair

basic:      basic prompt -> test
intention:  intention prompt -> generation prompt -> test
full:       as intention, then while the test does not compile
            refinement prompt (buggy lines tagged, context of the classes
            of buggy elements) -> test
"""
from dataclasses import dataclass
from inspect import isgenerator
import logging
from typing import Generator, List, Optional, Tuple

from llmTestGen.config import PipelineMode, RunConfig
from llmTestGen.corpus.dataPair import DataPair, FocalContext, ProjectRef
from llmTestGen.diagnostics.codeAnalyzer import ProjectClassIndex
from llmTestGen.errors import LlmError, NoCodeError
from llmTestGen.llm.llmClient import LlmClient, extract_code_block
from llmTestGen.prompts.promptBuilder import Intention, IntentionSource, PromptKind, \
    build_basic_prompt, build_generation_prompt, build_intention_prompt, \
    build_refinement_prompt
from llmTestGen.refiner.actions import Action, QueryLlm, ValidateTest
from llmTestGen.refiner.refinementState import Decision, RefinementState
from llmTestGen.validation.validator import OutcomeClass, Validation, Validator, classify

logger = logging.getLogger(__name__)

# outcome of a response without any code
NO_CODE_OUTCOME = classify(False, (), None)


class StopReason():
    SINGLE_ATTEMPT = "single_attempt"
    SUCCESS = "success"
    GIVE_UP = "give_up"
    ABORTED = "aborted"


@dataclass(frozen=True)
class Attempt():
    """
    :ivar ~.test_source: code extracted from the response ("" if there was none)
    :ivar ~.test_text: materialized test file ("" if there was no code)
    :ivar ~.prompt_kind: kind of the prompt which produced this attempt
    :ivar ~.post_run: output of the post-run hook of the validator (if any)
    """
    test_source: str
    test_text: str
    outcome: OutcomeClass
    prompt_kind: PromptKind
    request_hash: str
    response_hash: str
    post_run: Optional[dict] = None

    @property
    def has_code(self) -> bool:
        return bool(self.test_source)

    def to_record(self) -> dict:
        rec = {
            "test_source": self.test_source,
            "test_text": self.test_text,
            "outcome": self.outcome.to_record(),
            "prompt_kind": self.prompt_kind.value,
            "request_hash": self.request_hash,
            "response_hash": self.response_hash,
        }
        if self.post_run is not None:
            rec["post_run"] = self.post_run
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "Attempt":
        return cls(rec["test_source"], rec["test_text"],
                   OutcomeClass.from_record(rec["outcome"]),
                   PromptKind(rec["prompt_kind"]),
                   rec["request_hash"], rec["response_hash"], rec.get("post_run"))


@dataclass(frozen=True)
class PipelineResult():
    """
    :ivar ~.final_index: index of the attempt reported as the final test,
        the last attempt or the one with the fewest errors after a give up
    :ivar ~.aborted: the pipeline was stopped by an error of the model
        endpoint (or of the extraction), attempts may be incomplete or empty
    """
    data_pair: DataPair
    mode: PipelineMode
    attempts: Tuple[Attempt, ...]
    final_index: Optional[int]
    stop_reason: str
    intention: Optional[Intention] = None
    aborted: bool = False
    abort_reason: Optional[str] = None

    def __post_init__(self):
        if self.attempts:
            assert self.final_index is not None and 0 <= self.final_index < len(self.attempts), self
        else:
            assert self.aborted and self.final_index is None, self

    @property
    def final_attempt(self) -> Optional[Attempt]:
        if self.final_index is None:
            return None
        return self.attempts[self.final_index]

    @property
    def final(self) -> OutcomeClass:
        a = self.final_attempt
        return NO_CODE_OUTCOME if a is None else a.outcome

    def to_record(self) -> dict:
        it = self.intention
        return {
            "pair_id": self.data_pair.pair_id,
            "pair": self.data_pair.to_record(),
            "mode": self.mode.value,
            "attempts": [a.to_record() for a in self.attempts],
            "final_index": self.final_index,
            "stop_reason": self.stop_reason,
            "intention": None if it is None else {"text": it.text, "source": it.source.value},
            "aborted": self.aborted,
            "abort_reason": self.abort_reason,
        }

    @classmethod
    def from_record(cls, rec: dict, project: ProjectRef) -> "PipelineResult":
        it = rec.get("intention")
        return cls(DataPair.from_record(rec["pair"], project),
                   PipelineMode(rec["mode"]),
                   tuple(Attempt.from_record(a) for a in rec["attempts"]),
                   rec["final_index"],
                   rec["stop_reason"],
                   None if it is None else Intention(it["text"], IntentionSource(it["source"])),
                   rec.get("aborted", False),
                   rec.get("abort_reason"))


def best_attempt_index(attempts: List[Attempt]) -> int:
    """
    Index of the attempt with the fewest errors (last one among equal),
    attempts without code are used only if there is nothing else
    """
    best = None
    for i, a in enumerate(attempts):
        key = (not a.has_code, a.outcome.error_count)
        if best is None or key <= best[0]:
            best = (key, i)
    return best[1]


def _aborted(pair, mode, attempts, intention, reason) -> PipelineResult:
    logger.error("pipeline of %s aborted: %s", pair.pair_id, reason)
    return PipelineResult(pair, mode, tuple(attempts),
                          len(attempts) - 1 if attempts else None,
                          StopReason.ABORTED, intention, True, reason)


def pipeline_process(pair: DataPair, ctx: FocalContext, config: RunConfig,
                     index: Optional[ProjectClassIndex]=None,
                     intention: Optional[Intention]=None
                     ) -> Generator[Action, object, PipelineResult]:
    """
    Generator which yields QueryLlm/ValidateTest actions and returns PipelineResult

    :param index: class index of the project, required in the full mode
    :param intention: a manual intention, the intention prompt is skipped if specified
    """
    mode = config.mode
    budget = config.token_budget
    attempts = []  # type: List[Attempt]
    assert mode != PipelineMode.FULL or index is not None, "full mode requires the class index"
    try:
        if mode == PipelineMode.BASIC:
            intention = None
            prompt = build_basic_prompt(ctx, budget)
        else:
            if intention is None or intention.source != IntentionSource.MANUAL:
                _, resp = yield QueryLlm(build_intention_prompt(ctx, budget))
                if not resp.raw_text.strip():
                    raise LlmError("empty intention in the response")
                intention = Intention(resp.raw_text.strip(), IntentionSource.LLM)
            prompt = build_generation_prompt(ctx, intention, budget)

        state = RefinementState(max_invalid=config.max_invalid,
                                iteration_cap=config.hard_iteration_cap)
        stop_reason = StopReason.SINGLE_ATTEMPT
        while True:
            req_hash, resp = yield QueryLlm(prompt)
            try:
                code = extract_code_block(resp.raw_text)
            except NoCodeError:
                code = None

            if code is None:
                logger.info("%s: no code in the response to the %s prompt",
                            pair.pair_id, prompt.kind.value)
                attempts.append(Attempt("", "", NO_CODE_OUTCOME, prompt.kind,
                                        req_hash, resp.response_hash))
                if mode != PipelineMode.FULL:
                    break
                decision, state = state.mark_invalid()
                if decision != Decision.CONTINUE:
                    stop_reason = StopReason.GIVE_UP
                    break
                # the same prompt again (the previous test could not be replaced)
                continue

            v = yield ValidateTest(code)
            assert isinstance(v, Validation), v
            attempts.append(Attempt(code, v.test_text, v.outcome, prompt.kind,
                                    req_hash, resp.response_hash, v.post_run))
            if mode != PipelineMode.FULL:
                break

            # execution failures are not refined
            decision, state = state.decide(v.outcome.error_count)
            if decision == Decision.STOP_SUCCESS:
                stop_reason = StopReason.SUCCESS
                break
            elif decision == Decision.STOP_GIVE_UP:
                stop_reason = StopReason.GIVE_UP
                break

            diags = v.outcome.diagnostics
            extra = index.collect(diags, v.test_text)
            prompt = build_refinement_prompt(v.test_text, diags, extra, budget)
            logger.debug("%s: refinement %d, %d errors, %d class contexts",
                         pair.pair_id, state.iteration, len(diags), len(extra))

    except LlmError as e:
        return _aborted(pair, mode, attempts, intention, f"{e.__class__.__name__:s}: {e}")

    if stop_reason == StopReason.GIVE_UP:
        final_index = best_attempt_index(attempts)
    else:
        final_index = len(attempts) - 1
    logger.info("%s: %s after %d attempts", pair.pair_id, stop_reason, len(attempts))
    return PipelineResult(pair, mode, tuple(attempts), final_index, stop_reason, intention)


class PipelineDriver():
    """
    Executes the actions of a pipeline process

    Errors of the model endpoint are thrown back into the process
    so it can finish with an aborted result.
    """

    def __init__(self, client: LlmClient, validator: Validator, model: str, temperature: float):
        self.client = client
        self.validator = validator
        self.model = model
        self.temperature = temperature

    def run(self, process: Generator) -> PipelineResult:
        assert isgenerator(process), process
        value = None
        exc = None
        while True:
            try:
                if exc is not None:
                    action = process.throw(exc)
                else:
                    action = process.send(value)
            except StopIteration as e:
                return e.value
            value = exc = None
            if not isinstance(action, Action):
                raise ValueError(action)
            try:
                value = action.applyProcess(self, process)
            except LlmError as e:
                exc = e


def run_pipeline(pair: DataPair, ctx: FocalContext, config: RunConfig, client: LlmClient,
                 validator: Validator, index: Optional[ProjectClassIndex]=None,
                 intention: Optional[Intention]=None) -> PipelineResult:
    driver = PipelineDriver(client, validator, config.model_name, config.temperature)
    return driver.run(pipeline_process(pair, ctx, config, index, intention))
