import logging
import re
import threading
import time
from typing import Iterator, List, Optional, Tuple

import openai
from openai import OpenAI

from llmTestGen.constants import DEFAULT_MAX_IN_FLIGHT
from llmTestGen.errors import ConfigError, LlmError, LlmTransportError, NoCodeError
from llmTestGen.java.javaSource import is_parseable
from llmTestGen.llm.cassette import Cassette, CassetteMode, ChatRequest, \
    ChatResponse, FinishReason

logger = logging.getLogger(__name__)

# retries of the openai client (exponential backoff, honors rate limits),
# 3 attempts in total
DEFAULT_MAX_RETRIES = 2

_FENCE = re.compile(r"```[^\n]*\n(?P<code>.*?)```", re.DOTALL)
_OPEN_FENCE = re.compile(r"```[^\n]*\n(?P<code>.*)$", re.DOTALL)
_DECLARATION_START = re.compile(
    r"^\s*(@\w|(package|import|public|protected|private|static|final|abstract"
    r"|synchronized|class|interface|enum|void)\b)")
_LITERAL = re.compile(r"\"(?:\\.|[^\"\\])*\"|'(?:\\.|[^'\\])*'")


class ChatBackend():
    """
    Something which answers chat requests
    """

    def complete(self, req: ChatRequest) -> ChatResponse:
        raise NotImplementedError()


class OpenAiChatBackend(ChatBackend):
    """
    Chat-completion endpoint accessed through the openai client

    :ivar ~.client: openai client, created from OPENAI_API_KEY/OPENAI_BASE_URL
        on the first request if not specified
    :ivar ~._in_flight: semaphore which limits the number of concurrent requests
    """

    def __init__(self, client: Optional[OpenAI]=None,
                 max_in_flight: int=DEFAULT_MAX_IN_FLIGHT,
                 max_retries: int=DEFAULT_MAX_RETRIES):
        assert max_in_flight >= 1, max_in_flight
        self.client = client
        self.max_retries = max_retries
        self._in_flight = threading.BoundedSemaphore(max_in_flight)
        self._client_lock = threading.Lock()

    def _get_client(self) -> OpenAI:
        with self._client_lock:
            if self.client is None:
                try:
                    self.client = OpenAI(max_retries=self.max_retries)
                except openai.OpenAIError as e:
                    raise ConfigError(f"can not create the chat client: {e}")
            return self.client

    def complete(self, req: ChatRequest) -> ChatResponse:
        client = self._get_client()
        with self._in_flight:
            t0 = time.monotonic()
            try:
                r = client.chat.completions.create(
                    model=req.model,
                    messages=req.message_records(),
                    temperature=req.temperature,
                    n=1,
                )
            except openai.OpenAIError as e:
                raise LlmTransportError(f"{e.__class__.__name__:s}: {e}") from e
            latency_ms = int(round((time.monotonic() - t0) * 1000))

        if not r.choices:
            raise LlmTransportError("response without choices")
        choice = r.choices[0]
        return ChatResponse(choice.message.content or "",
                            FinishReason.from_api(choice.finish_reason),
                            latency_ms)


class LlmClient():
    """
    Sends requests through the cassette

    * replay: the response comes from the cassette only
    * record: a recorded response is reused, new responses are recorded
    * passthrough: the backend is always asked, nothing is recorded
    """

    def __init__(self, cassette: Cassette, backend: Optional[ChatBackend]=None):
        self.cassette = cassette
        self.backend = backend

    def send(self, req: ChatRequest) -> ChatResponse:
        c = self.cassette
        h = req.request_hash
        if c.mode == CassetteMode.REPLAY:
            logger.debug("replay %s", h)
            return c.lookup(h)
        elif c.mode == CassetteMode.RECORD:
            prev = c.get(h)
            if prev is not None:
                logger.debug("reusing recorded %s", h)
                return prev

        if self.backend is None:
            raise LlmError(f"no chat backend for {c.mode.value:s} mode")
        logger.debug("sending %s to %s", h, req.model)
        resp = self.backend.complete(req)
        if c.mode == CassetteMode.RECORD:
            resp = c.store(req, resp)
        return resp


def send(req: ChatRequest, cassette: Cassette, backend: Optional[ChatBackend]=None) -> ChatResponse:
    return LlmClient(cassette, backend).send(req)


def _code_regions(lines: List[str]) -> Iterator[Tuple[int, int]]:
    """
    Candidate line ranges [start, end) of the code in a response without a fence,
    a range starts on a line which opens a declaration and ends on a line
    where its braces are balanced again
    """
    for start, ln in enumerate(lines):
        if not _DECLARATION_START.match(ln):
            continue
        depth = 0
        opened = False
        for end in range(start, len(lines)):
            code = _LITERAL.sub('""', lines[end]).split("//")[0]
            opened = opened or "{" in code
            depth += code.count("{") - code.count("}")
            if depth < 0:
                break
            elif opened and depth == 0:
                yield start, end + 1


def extract_code_block(raw_text: str) -> str:
    """
    Java code of the response

    :return: content of the first fenced block, if there is none the longest
        run of declarations which parses as a class or as methods
    :raise NoCodeError: if there is nothing which looks like code
    """
    text = raw_text.replace("\r\n", "\n").replace("\r", "\n")
    m = _FENCE.search(text)
    if m is None:
        # response cut by the length limit
        m = _OPEN_FENCE.search(text)
    if m is not None:
        code = m.group("code").strip("\n")
        if code.strip():
            return code

    lines = text.split("\n")
    regions = sorted(_code_regions(lines), key=lambda r: (r[0] - r[1], r[0]))
    for start, end in regions:
        code = "\n".join(lines[start:end])
        if is_parseable(code):
            return code
    raise NoCodeError("no java code in the response")
