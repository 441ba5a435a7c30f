"""
Actions Module

This module defines the unified action space: three basic actions available
on every platform (CLICK, TYPE, SCROLL) and custom actions declared per
dataset. Actions are immutable values and validate their invariants on
construction.

Classes:
- Direction: Scroll direction.
- Dialect: Coordinate dialect used when an action is written as text.
- UnifiedAction: One action of the unified action space.
"""
import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple

from guicorpus.action_lang.coordinates import Box, Point
from guicorpus.exceptions import DataError

CLICK = "CLICK"
TYPE = "TYPE"
SCROLL = "SCROLL"
BASIC_ACTIONS = (CLICK, TYPE, SCROLL)

CANONICAL_CUSTOM_ACTIONS = (
    "LONG_PRESS", "OPEN_APP", "DRAG", "PRESS_BACK", "PRESS_HOME", "PRESS_ENTER", "WAIT", "COMPLETE",
)

# Slot order is also the order arguments are written in.
SLOTS = ("point", "box", "text", "direction")
BASIC_SLOTS = {
    CLICK: ("point",),
    TYPE: ("text",),
    SCROLL: ("direction",),
}

IDENTIFIER = re.compile(r"[A-Z][A-Z0-9_]*\Z")


class Direction(str, Enum):
    UP = "UP"
    DOWN = "DOWN"
    LEFT = "LEFT"
    RIGHT = "RIGHT"

    @property
    def inverse(self) -> "Direction":
        return _INVERSE[self]


_INVERSE = {
    Direction.UP: Direction.DOWN,
    Direction.DOWN: Direction.UP,
    Direction.LEFT: Direction.RIGHT,
    Direction.RIGHT: Direction.LEFT,
}


class Dialect(str, Enum):
    """
    TAGGED writes ``<point>[[x, y]]</point>`` and ``<box>[[x1, y1, x2, y2]]</box>``;
    PAIR writes ``<|box_start|>(x,y)<|box_end|>`` and ``<|box_start|>(x1,y1),(x2,y2)<|box_end|>``.
    """

    TAGGED = "TAGGED"
    PAIR = "PAIR"


@dataclass(frozen=True)
class UnifiedAction:
    """
    One action of the unified action space.

    Basic actions carry exactly their own argument: CLICK a point, TYPE
    non-empty text, SCROLL a direction. Any other name is a custom action
    whose name must be a canonical identifier; which slots it may carry is
    declared by a custom-action manifest and checked there.
    """

    name: str
    point: Optional[Point] = None
    box: Optional[Box] = None
    text: Optional[str] = None
    direction: Optional[Direction] = None

    def __post_init__(self):
        if not IDENTIFIER.match(self.name or ""):
            raise DataError(f"Action name {self.name!r} is not a canonical identifier")
        if self.direction is not None and not isinstance(self.direction, Direction):
            object.__setattr__(self, "direction", Direction(self.direction))
        expected = BASIC_SLOTS.get(self.name)
        if expected is not None and self.slots() != expected:
            raise DataError(f"{self.name} takes exactly {expected}, got {self.slots()}")
        if self.name == TYPE and not self.text:
            raise DataError("TYPE requires non-empty text")
        if self.text is not None and self.name != TYPE and self.text == "":
            raise DataError(f"{self.name} text slot must not be empty")

    @classmethod
    def click(cls, point: Point) -> "UnifiedAction":
        return cls(CLICK, point=point)

    @classmethod
    def type_text(cls, text: str) -> "UnifiedAction":
        return cls(TYPE, text=text)

    @classmethod
    def scroll(cls, direction: Direction) -> "UnifiedAction":
        return cls(SCROLL, direction=Direction(direction))

    @property
    def is_custom(self) -> bool:
        return self.name not in BASIC_ACTIONS

    def slots(self) -> Tuple[str, ...]:
        """
        Returns the names of the populated argument slots, in slot order.
        """
        return tuple(slot for slot in SLOTS if getattr(self, slot) is not None)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "point": self.point.as_list() if self.point else None,
            "box": self.box.as_list() if self.box else None,
            "text": self.text,
            "direction": self.direction.value if self.direction else None,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "UnifiedAction":
        point = data.get("point")
        box = data.get("box")
        return cls(
            name=data["name"],
            point=Point(*point) if point is not None else None,
            box=Box(*box) if box is not None else None,
            text=data.get("text"),
            direction=Direction(data["direction"]) if data.get("direction") else None,
        )

