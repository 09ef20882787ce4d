from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Tuple

from llmTestGen.constants import DEFAULT_MAX_INVALID
from llmTestGen.errors import PreconditionError


class Decision(Enum):
    STOP_SUCCESS = "StopSuccess"
    CONTINUE = "Continue"
    STOP_GIVE_UP = "StopGiveUp"


@dataclass(frozen=True)
class RefinementState():
    """
    Counters of the validate-and-fix loop

    :ivar ~.iteration: number of refinement prompts issued so far
    :ivar ~.last_error_count: number of compile errors of the last attempt
    :ivar ~.invalid_count: accumulated number of invalid refinements
        (never reset by a valid one)
    :ivar ~.iteration_cap: absolute limit of the iteration, None for no limit
    """
    iteration: int = 0
    last_error_count: Optional[int] = None
    invalid_count: int = 0
    max_invalid: int = DEFAULT_MAX_INVALID
    iteration_cap: Optional[int] = None

    def __post_init__(self):
        if self.max_invalid < 1:
            raise PreconditionError("max_invalid has to be positive", self)
        if not (0 <= self.invalid_count <= self.max_invalid):
            raise PreconditionError("invalid_count out of range", self)
        if self.iteration < self.invalid_count:
            raise PreconditionError("iteration < invalid_count", self)
        if self.last_error_count is not None and self.last_error_count < 0:
            raise PreconditionError("negative error count", self)

    def _continue(self, new_state: "RefinementState") -> Tuple[Decision, "RefinementState"]:
        if self.iteration_cap is not None and new_state.iteration > self.iteration_cap:
            return Decision.STOP_GIVE_UP, self
        return Decision.CONTINUE, new_state

    def decide(self, new_error_count: int) -> Tuple[Decision, "RefinementState"]:
        """
        Decide whether to issue another refinement prompt

        * no errors: StopSuccess
        * fewer errors than in the last attempt (or first attempt): valid refinement, Continue
        * otherwise: invalid refinement, StopGiveUp once the accumulated invalid
          refinements exceed max_invalid, else Continue

        :return: tuple (decision, state for the next iteration),
            the state is unchanged for the stop decisions
        """
        if new_error_count < 0:
            raise PreconditionError("negative error count", new_error_count)
        if new_error_count == 0:
            return Decision.STOP_SUCCESS, self

        last = self.last_error_count
        if last is None or new_error_count < last:
            return self._continue(replace(self, iteration=self.iteration + 1,
                                          last_error_count=new_error_count))
        return self.mark_invalid(new_error_count)

    def mark_invalid(self, new_error_count: Optional[int]=None) -> Tuple[Decision, "RefinementState"]:
        """
        Count an invalid refinement

        :param new_error_count: None for an attempt without any code,
            the last error count is kept in that case
        """
        invalid = self.invalid_count + 1
        if invalid > self.max_invalid:
            return Decision.STOP_GIVE_UP, self
        last = self.last_error_count if new_error_count is None else new_error_count
        return self._continue(replace(self, iteration=self.iteration + 1,
                                      last_error_count=last,
                                      invalid_count=invalid))


def decide(state: RefinementState, new_error_count: int) -> Tuple[Decision, RefinementState]:
    return state.decide(new_error_count)
