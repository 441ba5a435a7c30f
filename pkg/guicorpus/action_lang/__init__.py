"""
Unified action space.

This package defines the typed action algebra (basic CLICK / TYPE / SCROLL and
declared custom actions), the per-mille coordinate frame, the two text
dialects actions are written in, and the alias registry that resolves
cross-dataset action-name conflicts.
"""
from .actions import (
    BASIC_ACTIONS, CANONICAL_CUSTOM_ACTIONS, CLICK, SCROLL, TYPE, Dialect, Direction, UnifiedAction,
)
from .coordinates import (
    Box, PixelBox, Point, denormalize_box, denormalize_point, normalize_box, normalize_point,
)
from .grammar import parse_action, serialize_action, serialize_box, serialize_point
from .registry import AliasEntry, AliasRegistry, CustomActionManifest


def canonicalize(raw_name: str, source: str, registry: AliasRegistry) -> str:
    """
    Resolves a raw action name of a dataset to its canonical name.

    :param raw_name: Action name as recorded by the dataset.
    :param source: Dataset tag.
    :param registry: Loaded alias registry.
    :return: The canonical name; canonical names map to themselves.
    """
    return registry.canonicalize(raw_name, source)
