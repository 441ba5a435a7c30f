"""
Snapshot ingestion.

This package loads serialized interface snapshots (web DOM dumps, desktop and
mobile A11y-tree dumps), extracts their visible interactable elements with
referring expressions, and recognises error pages.
"""
from .error_pages import ErrorPagePatterns, is_error_page
from .extractor import DEFAULT_INTERACTABLE_ROLES, Element, extract_elements, referring_expression
from .snapshot import NodeTree, PageSnapshot, iter_snapshot_documents, load_snapshot
