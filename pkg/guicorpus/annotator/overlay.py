"""
Set-of-Mark Overlay Module

Classes:
- Mark: One numbered mark placed on an element.
- SomOverlay: The marks of one screenshot.

Functions:
- build_overlay: Numbers elements in document order.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from guicorpus.action_lang.coordinates import PixelBox
from guicorpus.snapshot_ingest.extractor import Element
from guicorpus.snapshot_ingest.snapshot import NodePath

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Mark:
    index: int
    anchor: Tuple[int, int]
    box: PixelBox
    label: str
    node_path: NodePath = ()

    def to_dict(self) -> Dict[str, Any]:
        return {"index": self.index, "anchor": list(self.anchor), "box": self.box.as_list(), "label": self.label}


@dataclass(frozen=True)
class SomOverlay:
    marks: Tuple[Mark, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.marks

    @property
    def indices(self) -> List[int]:
        return [mark.index for mark in self.marks]

    def mark(self, index: int) -> Optional[Mark]:
        if 1 <= index <= len(self.marks):
            return self.marks[index - 1]
        return None

    def mark_for(self, node_path: NodePath) -> Optional[Mark]:
        for mark in self.marks:
            if mark.node_path == tuple(node_path):
                return mark
        return None

    def table(self) -> str:
        """
        Renders the marks as one 'index: label [x1, y1, x2, y2]' line each.
        """
        return "\n".join(f"{mark.index}: {mark.label} {mark.box.as_list()}" for mark in self.marks)

    def to_dict(self) -> Dict[str, Any]:
        return {"marks": [mark.to_dict() for mark in self.marks]}


def build_overlay(elements: Sequence[Element]) -> SomOverlay:
    """
    Builds a Set-of-Mark overlay.

    :param elements: Elements in document order.
    :return: Marks numbered from 1 in document order, anchored at each box's top-left corner.
             An empty element list gives an empty overlay, which is logged.
    """
    marks = tuple(
        Mark(index, (element.bbox.x1, element.bbox.y1), element.bbox, element.referring_expression,
             element.node_path)
        for index, element in enumerate(elements, start=1)
    )
    if not marks:
        logger.warning("Empty Set-of-Mark overlay: the screen has no marked elements")
    return SomOverlay(marks)
