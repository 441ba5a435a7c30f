"""
Page Filter Module

This module decides which pages enter the grounding corpus and caps the
number of elements kept per page.

A page is rejected for the first matching reason, checked in this order:
- error-page: its title or body text matches an error-page pattern.
- too-wide: a web page wider than the configured maximum.
- incomplete-render: fewer extracted elements than the render check needs.
- clustered: too large a share of element centres sits in the bottom band.

Classes:
- FilterConfig: Thresholds of the filter.
- PageVerdict: Acceptance decision for one page.
- FilterReport: Counts gathered over a run.

Functions:
- filter_page: Decides a single page.
- cap_elements: Keeps at most max_elements_per_page elements, stratified by role.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from guicorpus.exceptions import ConfigError
from guicorpus.rng import SeededRandom, derive_seed
from guicorpus.snapshot_ingest.error_pages import ErrorPagePatterns, is_error_page
from guicorpus.snapshot_ingest.extractor import Element
from guicorpus.snapshot_ingest.snapshot import PageSnapshot

logger = logging.getLogger(__name__)

ERROR_PAGE = "error-page"
TOO_WIDE = "too-wide"
INCOMPLETE_RENDER = "incomplete-render"
CLUSTERED = "clustered"
REJECT_REASONS = (ERROR_PAGE, TOO_WIDE, INCOMPLETE_RENDER, CLUSTERED)


def _ratio(value: float) -> Fraction:
    return Fraction(str(value))


@dataclass(frozen=True)
class FilterConfig:
    max_elements_per_page: int = 10
    bottom_band_fraction: float = 0.15
    clustered_reject_fraction: float = 0.8
    min_elements_for_render_check: int = 3
    max_page_width: int = 1920
    seed: int = 42

    def __post_init__(self):
        if self.max_elements_per_page < 1:
            raise ConfigError("filter.max_elements_per_page must be >= 1")
        if self.min_elements_for_render_check < 1:
            raise ConfigError("filter.min_elements_for_render_check must be >= 1")
        if not 0 < self.bottom_band_fraction < 1:
            raise ConfigError("filter.bottom_band_fraction must be within (0, 1)")
        if not 0 < self.clustered_reject_fraction <= 1:
            raise ConfigError("filter.clustered_reject_fraction must be within (0, 1]")

    @classmethod
    def from_dict(cls, section: Dict[str, Any], seed: int = 42) -> "FilterConfig":
        return cls(seed=seed, **section)


@dataclass(frozen=True)
class PageVerdict:
    accepted: bool
    reason: Optional[str] = None


ACCEPTED = PageVerdict(True)


def _is_clustered(snapshot: PageSnapshot, elements: Sequence[Element], config: FilterConfig) -> bool:
    if not elements:
        return False
    height = snapshot.page_size[1]
    band_top = (1 - _ratio(config.bottom_band_fraction)) * height
    in_band = sum(1 for element in elements if element.bbox.center()[1] >= band_top)
    return Fraction(in_band, len(elements)) >= _ratio(config.clustered_reject_fraction)


def filter_page(snapshot: PageSnapshot, elements: Sequence[Element], config: FilterConfig,
                patterns: Optional[ErrorPagePatterns] = None) -> PageVerdict:
    """
    Decides whether a page is kept.

    :param snapshot: The page.
    :param elements: The page's extracted elements, before capping.
    :param config: Filter thresholds.
    :param patterns: Error-page patterns; the bundled ones if omitted.
    :return: The verdict, with the rejection reason if rejected.
    """
    if is_error_page(snapshot, patterns):
        return PageVerdict(False, ERROR_PAGE)
    if snapshot.platform == "web" and snapshot.page_size[0] > config.max_page_width:
        return PageVerdict(False, TOO_WIDE)
    if len(elements) < config.min_elements_for_render_check:
        return PageVerdict(False, INCOMPLETE_RENDER)
    if _is_clustered(snapshot, elements, config):
        return PageVerdict(False, CLUSTERED)
    return ACCEPTED


def cap_elements(elements: Sequence[Element], config: FilterConfig, page_key: str = "") -> List[Element]:
    """
    Caps the elements of a page.

    One element of every distinct role is taken first, roles in order of
    first appearance; the remaining slots are filled by seeded uniform
    sampling without replacement. The result keeps document order.

    :param elements: Elements in document order.
    :param config: Filter config holding the cap and the seed.
    :param page_key: Stable page identifier mixed into the seed.
    :return: At most config.max_elements_per_page elements.
    """
    cap = config.max_elements_per_page
    if len(elements) <= cap:
        return list(elements)

    rng = SeededRandom(derive_seed(config.seed, "cap", page_key))
    by_role: Dict[str, List[int]] = {}
    for index, element in enumerate(elements):
        by_role.setdefault(element.role, []).append(index)

    chosen = set()
    for indices in list(by_role.values())[:cap]:
        chosen.add(rng.choice(indices))

    rest = [index for index in range(len(elements)) if index not in chosen]
    for position in rng.sample_indices(len(rest), cap - len(chosen)):
        chosen.add(rest[position])
    return [elements[index] for index in sorted(chosen)]


@dataclass
class FilterReport:
    """
    Counts of a filter run; reports from separate workers add up with merge().
    """

    pages_in: int = 0
    pages_out: int = 0
    elements_in: int = 0
    elements_out: int = 0
    rejected: Counter = field(default_factory=Counter)

    def add(self, verdict: PageVerdict, elements_in: int, elements_out: int = 0) -> None:
        self.pages_in += 1
        self.elements_in += elements_in
        if verdict.accepted:
            self.pages_out += 1
            self.elements_out += elements_out
        else:
            self.rejected[verdict.reason] += 1

    def merge(self, other: "FilterReport") -> "FilterReport":
        return FilterReport(
            pages_in=self.pages_in + other.pages_in,
            pages_out=self.pages_out + other.pages_out,
            elements_in=self.elements_in + other.elements_in,
            elements_out=self.elements_out + other.elements_out,
            rejected=self.rejected + other.rejected,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pages_in": self.pages_in,
            "pages_out": self.pages_out,
            "elements_in": self.elements_in,
            "elements_out": self.elements_out,
            "rejected": {reason: self.rejected[reason] for reason in sorted(self.rejected)},
        }

    def log_summary(self) -> None:
        logger.info("Filter kept %d of %d pages, %d of %d elements",
                    self.pages_out, self.pages_in, self.elements_out, self.elements_in)
        for reason in sorted(self.rejected):
            logger.info("  rejected %s: %d", reason, self.rejected[reason])
