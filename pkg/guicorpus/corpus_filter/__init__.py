"""
Corpus quality filtering.

Page-level rejection of error pages, incomplete renders and clustered
layouts, role-stratified element capping, and an advisory annotation linter.
"""
from .linter import (
    DEGENERATE_BOX, DUPLICATE_INSTRUCTION, NO_ELEMENT_OVERLAP, OUT_OF_RANGE, LintFinding, lint_annotations,
)
from .page_filter import (
    CLUSTERED, ERROR_PAGE, INCOMPLETE_RENDER, REJECT_REASONS, TOO_WIDE,
    FilterConfig, FilterReport, PageVerdict, cap_elements, filter_page,
)
