"""
Error Page Module

This module provides the ErrorPagePatterns class designed for recognising
error pages (HTTP error statuses, "page not found" screens) among snapshots.
Patterns come from a text file with one pattern per line.

Classes:
- ErrorPagePatterns: Loads patterns and checks snapshot titles and bodies against them.

Functions:
- is_error_page: True if a snapshot looks like an error page.

Dependencies:
- re: Compiles the title regular-expression patterns.
- guicorpus.config_loader: Locates the bundled pattern file.
"""
import os
import re
from functools import lru_cache
from typing import List, Optional, Pattern, Tuple

from guicorpus.config_loader import ConfigLoader
from guicorpus.exceptions import ConfigError
from guicorpus.snapshot_ingest.snapshot import PageSnapshot

REGEX_PREFIX = "re:"


class ErrorPagePatterns:
    """
    A set of case-insensitive error-page patterns.

    Plain lines are phrases, matched anywhere in a title or at the start of
    a body. Lines starting with 're:' are regular expressions matched
    against the title only, from its first character; end them with '$' to
    require the whole title. Blank lines and lines starting with '#' are
    ignored.
    """

    def __init__(self, lines: List[str]):
        phrases: List[str] = []
        expressions: List[Pattern] = []
        for line in lines:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith(REGEX_PREFIX):
                try:
                    expressions.append(re.compile(line[len(REGEX_PREFIX):], re.IGNORECASE))
                except re.error as error:
                    raise ConfigError(f"Invalid error-page pattern {line!r}: {error}") from error
            else:
                phrases.append(line.lower())
        self.phrases: Tuple[str, ...] = tuple(phrases)
        self.expressions: Tuple[Pattern, ...] = tuple(expressions)

    @staticmethod
    def get_patterns_from_file(patterns_file_path: str) -> List[str]:
        """
        Fetches patterns from the specified file path.

        :param patterns_file_path: Path to the patterns file.
        :return: List of pattern lines.
        """
        if not os.path.exists(patterns_file_path):
            raise ConfigError(f"Error-page pattern file not found: {patterns_file_path}")
        with open(patterns_file_path, 'r', encoding='utf-8') as patterns_file:
            return [line.rstrip("\n") for line in patterns_file.readlines()]

    @classmethod
    def load(cls, path: Optional[str] = None) -> "ErrorPagePatterns":
        """
        Loads patterns from a file, or the bundled pattern file when no path is given.
        """
        if path is None:
            return _bundled_patterns()
        return cls(cls.get_patterns_from_file(path))

    def matches_title(self, title: str) -> bool:
        if not title:
            return False
        lowered = title.lower()
        if any(phrase in lowered for phrase in self.phrases):
            return True
        return any(expression.match(title) for expression in self.expressions)

    def matches_body(self, body: str) -> bool:
        lowered = body.lstrip().lower()
        return bool(lowered) and any(lowered.startswith(phrase) for phrase in self.phrases)


@lru_cache(maxsize=None)
def _bundled_patterns() -> ErrorPagePatterns:
    path = ConfigLoader.data_path("error_pages.txt")
    return ErrorPagePatterns(ErrorPagePatterns.get_patterns_from_file(path))


def is_error_page(snapshot: PageSnapshot, patterns: Optional[ErrorPagePatterns] = None) -> bool:
    """
    Checks whether a snapshot shows an error page.

    :param snapshot: A validated snapshot.
    :param patterns: Pattern set; defaults to the bundled HTTP-status and not-found patterns.
    :return: True if the title, or the opening of the body text, matches a pattern.
    """
    patterns = patterns or ErrorPagePatterns.load()
    return patterns.matches_title(snapshot.title) or patterns.matches_body(snapshot.body_text)
