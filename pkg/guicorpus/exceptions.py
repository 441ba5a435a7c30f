"""
Exceptions Module

This module defines the exception hierarchy shared by every guicorpus package.
Each class carries the process exit code the command-line front end reports
when the error escapes a subcommand.

Classes:
- GuiCorpusError: Base class of all toolkit errors.
- ConfigError: Invalid or unresolvable configuration (exit 2).
- DataError: Malformed input data or an invalid record (exit 3).
- ClientError: Completion-service failure (exit 4).
"""
from typing import Any, Optional, Tuple


class GuiCorpusError(Exception):
    """
    Base class for every error raised by guicorpus.
    """

    exit_code = 1


class ConfigError(GuiCorpusError):
    """
    Raised when the pipeline configuration fails validation.
    """

    exit_code = 2


class DataError(GuiCorpusError):
    """
    Raised when input data cannot be turned into valid records.
    """

    exit_code = 3


class ClientError(GuiCorpusError):
    """
    Raised when the annotation completion service keeps failing.
    """

    exit_code = 4


class TransientClientError(ClientError):
    """
    A completion-service failure that is worth retrying.
    """


class ActionSyntaxError(DataError):
    """
    Raised when an action expression cannot be parsed.

    :param message: What went wrong.
    :param text: The full expression being parsed.
    :param position: Character offset where parsing failed.
    """

    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position
        self.message = message

    def __reduce__(self):
        return self.__class__, (self.message, self.text, self.position)


class CoordinateRangeError(DataError):
    """
    Raised when a coordinate falls outside its allowed range.
    """


class UnmappedActionError(DataError):
    """
    Raised when a raw action name has no entry in the alias registry.
    """

    def __init__(self, raw_name: str, dataset: Optional[str] = None):
        where = f" for dataset {dataset!r}" if dataset else ""
        super().__init__(f"Unmapped action name {raw_name!r}{where}")
        self.raw_name = raw_name
        self.dataset = dataset

    def __reduce__(self):
        return self.__class__, (self.raw_name, self.dataset)


class MissingArgumentError(DataError):
    """
    Raised when a source step lacks an argument its action requires.
    """


class SnapshotSchemaError(DataError):
    """
    Raised when a snapshot document violates the snapshot schema.

    :param message: What went wrong.
    :param path: Index path of the offending node from the root.
    """

    def __init__(self, message: str, path: Tuple[int, ...] = ()):
        location = "/" + "/".join(str(i) for i in path)
        super().__init__(f"{message} (node {location})")
        self.path = path
        self.message = message

    def __reduce__(self):
        return self.__class__, (self.message, self.path)


class ExplorationBudgetError(DataError):
    """
    Raised when depth-first exploration runs out of steps.

    :param frontier_size: Unexplored transitions left on the stack.
    :param partial: The exploration result gathered before the budget ran out.
    """

    def __init__(self, frontier_size: int, partial: Any = None):
        super().__init__(f"Step budget exhausted with {frontier_size} transitions left on the frontier")
        self.frontier_size = frontier_size
        self.partial = partial

    def __reduce__(self):
        return self.__class__, (self.frontier_size, self.partial)


class EmptyEvaluationError(DataError):
    """
    Raised when an aggregate is requested over zero evaluated steps.
    """


class AnnotationResponseError(DataError):
    """
    Raised when the annotator returns an empty or over-length sub-instruction.
    """
