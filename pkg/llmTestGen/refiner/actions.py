"""
Requests of the pipeline processes

A pipeline is a generator which yields actions and receives their results,
the :class:`~llmTestGen.refiner.pipeline.PipelineDriver` executes them.
"""
from typing import Tuple

from llmTestGen.llm.cassette import ChatRequest, ChatResponse
from llmTestGen.prompts.promptBuilder import PromptDoc
from llmTestGen.validation.validator import Validation


class Action():

    def applyProcess(self, driver, process):
        """
        :return: the value which is sent back to the process
        """
        raise NotImplementedError()


class QueryLlm(Action):
    """
    Send the prompt to the model

    result: tuple (request hash, ChatResponse)
    """
    __slots__ = ["prompt"]

    def __init__(self, prompt: PromptDoc):
        self.prompt = prompt

    def applyProcess(self, driver, process) -> Tuple[str, ChatResponse]:
        req = ChatRequest.from_prompt(self.prompt, driver.model, driver.temperature)
        return req.request_hash, driver.client.send(req)

    def __repr__(self):
        return f"<{self.__class__.__name__:s} {self.prompt.kind.value:s}>"


class ValidateTest(Action):
    """
    Materialize, compile and run the test

    result: :class:`~llmTestGen.validation.validator.Validation`
    """
    __slots__ = ["test_source"]

    def __init__(self, test_source: str):
        self.test_source = test_source

    def applyProcess(self, driver, process) -> Validation:
        return driver.validator.validate(self.test_source)

    def __repr__(self):
        return f"<{self.__class__.__name__:s} {len(self.test_source):d} chars>"
