class Time():
    """
    Time units, subprocess timeouts are specified in seconds
    """
    min = 60.0


# default model, the one the generation pipeline was evaluated with
DEFAULT_MODEL = "gpt-3.5-turbo"
# the endpoint default of the chat-completion API
DEFAULT_TEMPERATURE = 1.0

# maximum of accumulated invalid refinements before the refiner gives up
DEFAULT_MAX_INVALID = 3
# absolute cap on the number of refinement prompts of a single pipeline
DEFAULT_ITERATION_CAP = 8
# estimated tokens
DEFAULT_TOKEN_BUDGET = 3000
CHARS_PER_TOKEN = 4

DEFAULT_COMPILE_TIMEOUT = 2 * Time.min
DEFAULT_EXECUTE_TIMEOUT = 1 * Time.min
# number of live chat requests which may be in flight at once
DEFAULT_MAX_IN_FLIGHT = 4

DEFAULT_FRAMEWORK_VERSION = "JUnit 4"
JUNIT4 = "JUnit 4"
JUNIT5 = "JUnit 5"

# simple names of the annotations which mark a test method
TEST_ANNOTATIONS = ("Test",)
# suffix of the generated test class, <FocalClass>GeneratedTest
GENERATED_TEST_SUFFIX = "GeneratedTest"

# version of the prompt template set under prompts/templates
PROMPT_TEMPLATE_VERSION = "v1"
# version of the result and report files
SCHEMA_VERSION = 1

# process exit codes of the command line interface
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ENVIRONMENT = 3
EXIT_PIPELINE_ABORT = 4
