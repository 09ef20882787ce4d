"""
Record/replay store of chat completions

The cassette file contains one JSON record per line::

    {"messages": [...], "model": "gpt-3.5-turbo", "request_hash": "ab12...",
     "response": {"finish_reason": "stop", "latency_ms": 812, "raw_text": "..."},
     "temperature": 1.0}
"""
from dataclasses import dataclass
from enum import Enum
import json
import logging
from pathlib import Path
import threading
from typing import Optional, Tuple

from sortedcontainers import SortedDict

from llmTestGen.errors import CassetteMissError, ConfigError, PreconditionError
from llmTestGen.prompts.promptBuilder import Message, PromptDoc
from llmTestGen.utils import canonical_json, sha256_text

logger = logging.getLogger(__name__)


class FinishReason(Enum):
    STOP = "stop"
    LENGTH = "length"
    OTHER = "other"

    @classmethod
    def from_api(cls, reason: Optional[str]) -> "FinishReason":
        try:
            return cls(reason)
        except ValueError:
            return cls.OTHER


@dataclass(frozen=True)
class ChatRequest():
    """
    :ivar ~.messages: role-tagged messages in the order of the conversation
    """
    model: str
    messages: Tuple[Message, ...]
    temperature: float

    def __post_init__(self):
        if not (0.0 <= self.temperature <= 2.0):
            raise PreconditionError("temperature out of [0, 2]", self.temperature)
        if not self.messages:
            raise PreconditionError("request without messages")

    @classmethod
    def from_prompt(cls, prompt: PromptDoc, model: str, temperature: float) -> "ChatRequest":
        return cls(model, prompt.messages, float(temperature))

    def message_records(self):
        return [m.to_record() for m in self.messages]

    @property
    def request_hash(self) -> str:
        """
        sha256 of the canonical JSON of (model, messages, temperature)
        """
        return sha256_text(canonical_json({
            "model": self.model,
            "messages": self.message_records(),
            "temperature": float(self.temperature),
        }))


@dataclass(frozen=True)
class ChatResponse():
    raw_text: str
    finish_reason: FinishReason
    latency_ms: int = 0

    def __post_init__(self):
        if self.finish_reason == FinishReason.STOP and self.raw_text is None:
            raise PreconditionError("finished response without text")
        assert self.latency_ms >= 0, self.latency_ms

    @property
    def response_hash(self) -> str:
        return sha256_text(self.raw_text)

    def to_record(self) -> dict:
        return {
            "raw_text": self.raw_text,
            "finish_reason": self.finish_reason.value,
            "latency_ms": self.latency_ms,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "ChatResponse":
        return cls(rec["raw_text"], FinishReason(rec["finish_reason"]),
                   int(rec.get("latency_ms", 0)))


class CassetteMode(Enum):
    RECORD = "record"
    REPLAY = "replay"
    PASSTHROUGH = "passthrough"


class Cassette():
    """
    Map request hash -> recorded response

    :ivar ~.path: file of the cassette, None for in-memory cassette
    :ivar ~.entries: SortedDict request_hash -> ChatResponse
    :note: replay never touches the network, record appends every new entry
        to the file under the writer lock
    """

    def __init__(self, mode: CassetteMode, path: Optional[Path]=None):
        self.mode = mode
        self.path = None if path is None else Path(path)
        self.entries = SortedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0
        if self.path is not None and self.path.is_file():
            self._load()
        elif mode == CassetteMode.REPLAY and self.path is not None:
            raise ConfigError(f"cassette {self.path} does not exist")

    @classmethod
    def open(cls, mode: CassetteMode, path: Optional[Path]) -> "Cassette":
        if mode != CassetteMode.PASSTHROUGH and path is None:
            raise ConfigError(f"cassette mode {mode.value:s} requires a cassette path")
        return cls(mode, path)

    def _load(self):
        with self.path.open(encoding="utf-8") as f:
            for line_no, line in enumerate(f, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    self.entries[rec["request_hash"]] = ChatResponse.from_record(rec["response"])
                except (ValueError, KeyError) as e:
                    raise ConfigError(f"{self.path}:{line_no:d}: malformed cassette entry: {e}")
        logger.debug("cassette %s loaded with %d entries", self.path, len(self.entries))

    def __len__(self):
        return len(self.entries)

    def __contains__(self, request_hash: str):
        return request_hash in self.entries

    def get(self, request_hash: str) -> Optional[ChatResponse]:
        with self._lock:
            return self.entries.get(request_hash)

    def lookup(self, request_hash: str) -> ChatResponse:
        """
        :raise CassetteMissError: if the request was not recorded
        """
        r = self.get(request_hash)
        if r is None:
            self.misses += 1
            raise CassetteMissError(request_hash)
        self.hits += 1
        return r

    def store(self, req: ChatRequest, resp: ChatResponse) -> ChatResponse:
        """
        Record the response, if an identical request was already recorded
        the previous response is kept and returned
        """
        assert self.mode == CassetteMode.RECORD, self.mode
        h = req.request_hash
        with self._lock:
            prev = self.entries.get(h)
            if prev is not None:
                logger.warning("request %s already recorded, keeping the first response", h)
                return prev
            self.entries[h] = resp
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a", encoding="utf-8") as f:
                    f.write(canonical_json({
                        "request_hash": h,
                        "model": req.model,
                        "temperature": req.temperature,
                        "messages": req.message_records(),
                        "response": resp.to_record(),
                    }))
                    f.write("\n")
        return resp

    def __repr__(self):
        return f"<{self.__class__.__name__:s} {self.mode.value:s} {self.path} {len(self):d} entries>"
