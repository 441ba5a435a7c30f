"""
Element Extraction Module

This module extracts the visible, interactable elements of a snapshot
together with a referring expression for each one.

Referring expressions follow a fixed precedence: accessible name, then the
'title' attribute, then the trimmed inner text, then an aria-label-style
attribute. SVG images count only when they carry a title (their name or
'title' attribute). Expressions have runs of whitespace collapsed, so they
are never whitespace-only.

Classes:
- Element: One extracted element.

Functions:
- extract_elements: Visible interactable elements in document order.
- referring_expression: The expression derived for a node, if any.
"""
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Tuple

from guicorpus.action_lang.coordinates import PixelBox
from guicorpus.snapshot_ingest.snapshot import NodePath, NodeTree, PageSnapshot

DEFAULT_INTERACTABLE_ROLES: FrozenSet[str] = frozenset({
    "button", "link", "scrollbar", "searchbox", "textbox", "checkbox",
    "combobox", "menuitem", "tab", "svg",
})

SVG_ROLE = "svg"
LABEL_ATTRIBUTES = ("aria-label", "content-desc", "label", "alt")


@dataclass(frozen=True)
class Element:
    """
    A visible, interactable element with its referring expression.
    """

    node_path: NodePath
    role: str
    referring_expression: str
    bbox: PixelBox

    def to_dict(self) -> Dict[str, Any]:
        return {
            "node_path": list(self.node_path),
            "role": self.role,
            "referring_expression": self.referring_expression,
            "bbox": self.bbox.as_list(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Element":
        return cls(tuple(data["node_path"]), data["role"], data["referring_expression"], PixelBox(*data["bbox"]))


def _clean(value: Optional[str]) -> str:
    return " ".join(value.split()) if value else ""


def referring_expression(node: NodeTree) -> str:
    """
    Derives the referring expression of a node.

    :param node: The node.
    :return: The expression, or an empty string if the node yields none.
    """
    candidates: Tuple[Optional[str], ...]
    if node.role == SVG_ROLE:
        candidates = (node.name, node.attributes.get("title"))
    else:
        candidates = (node.name, node.attributes.get("title"), node.text) + tuple(
            node.attributes.get(attribute) for attribute in LABEL_ATTRIBUTES)
    for candidate in candidates:
        cleaned = _clean(candidate)
        if cleaned:
            return cleaned
    return ""


def is_visible(node: NodeTree) -> bool:
    return node.visible and node.bbox.area() > 0


def extract_elements(snapshot: PageSnapshot, roles: Optional[Iterable[str]] = None) -> List[Element]:
    """
    Extracts visible interactable elements.

    :param snapshot: A validated snapshot.
    :param roles: Interactable roles; defaults to DEFAULT_INTERACTABLE_ROLES.
    :return: Elements in depth-first document order.
    """
    roles = frozenset(roles) if roles is not None else DEFAULT_INTERACTABLE_ROLES
    elements = []
    for path, node in snapshot.root.walk():
        if node.role not in roles or not is_visible(node):
            continue
        expression = referring_expression(node)
        if expression:
            elements.append(Element(path, node.role, expression, node.bbox))
    return elements
