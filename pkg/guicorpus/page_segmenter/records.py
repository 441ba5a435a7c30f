"""
Grounding Records Module

Classes:
- GroundingKind: REG (referring expression) or IG (instruction) record.
- GroundingRecord: One (screenshot window, text, target) grounding triplet.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple

from guicorpus.action_lang.coordinates import Box, Point
from guicorpus.exceptions import DataError


class GroundingKind(str, Enum):
    REG = "REG"
    IG = "IG"


@dataclass(frozen=True)
class GroundingRecord:
    """
    A grounding triplet: a screenshot window, an expression or instruction,
    and a target point or box in per-mille coordinates of that window.
    """

    snapshot_id: str
    window_index: int
    kind: GroundingKind
    text: str
    target_point: Optional[Point] = None
    target_box: Optional[Box] = None
    node_path: Tuple[int, ...] = ()

    def __post_init__(self):
        if not isinstance(self.kind, GroundingKind):
            object.__setattr__(self, "kind", GroundingKind(self.kind))
        if (self.target_point is None) == (self.target_box is None):
            raise DataError("A grounding record carries exactly one of target_point and target_box")
        if self.window_index < 0:
            raise DataError(f"window_index must be >= 0, got {self.window_index}")

    @property
    def screenshot_ref(self) -> str:
        return f"{self.snapshot_id}#{self.window_index}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "snapshot_id": self.snapshot_id,
            "window_index": self.window_index,
            "node_path": list(self.node_path),
            "kind": self.kind.value,
            "text": self.text,
            "target_point": self.target_point.as_list() if self.target_point else None,
            "target_box": self.target_box.as_list() if self.target_box else None,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GroundingRecord":
        point = data.get("target_point")
        box = data.get("target_box")
        return cls(
            snapshot_id=data["snapshot_id"],
            window_index=data["window_index"],
            kind=GroundingKind(data["kind"]),
            text=data["text"],
            target_point=Point(*point) if point is not None else None,
            target_box=Box(*box) if box is not None else None,
            node_path=tuple(data.get("node_path", ())),
        )
