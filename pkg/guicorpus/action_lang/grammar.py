"""
Action Grammar Module

This module writes unified actions as text and parses them back, in either
coordinate dialect. The text form is the action name followed by its
arguments in slot order (point, box, text, direction):

    CLICK <point>[[101, 872]]</point>
    TYPE [Shanghai shopping mall]
    SCROLL [UP]
    DRAG <box>[[10, 20, 30, 40]]</box>
    PRESS_BACK

Bracketed text escapes ``\\`` and ``]`` with a backslash. Whitespace inside
coordinate lists is insignificant.

Functions:
- serialize_action: Writes an action in a dialect.
- parse_action: Parses one action expression in a dialect.
- serialize_point, serialize_box: Writes a bare coordinate group.
"""
import re
from functools import lru_cache
from typing import List, Optional, Tuple

from guicorpus.action_lang.actions import (
    BASIC_ACTIONS, BASIC_SLOTS, Dialect, Direction, UnifiedAction,
)
from guicorpus.action_lang.coordinates import Box, Point
from guicorpus.action_lang.registry import AliasRegistry, CustomActionManifest
from guicorpus.exceptions import ActionSyntaxError, CoordinateRangeError, DataError, UnmappedActionError

PAIR_OPEN = "<|box_start|>"
PAIR_CLOSE = "<|box_end|>"

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"-?\d+")
_WS = re.compile(r"\s*")


def escape_text(text: str) -> str:
    return text.replace("\\", "\\\\").replace("]", "\\]")


def serialize_point(point: Point, dialect: Dialect) -> str:
    if dialect == Dialect.TAGGED:
        return f"<point>[[{point.x}, {point.y}]]</point>"
    return f"{PAIR_OPEN}({point.x},{point.y}){PAIR_CLOSE}"


def serialize_box(box: Box, dialect: Dialect) -> str:
    if dialect == Dialect.TAGGED:
        return f"<box>[[{box.x1}, {box.y1}, {box.x2}, {box.y2}]]</box>"
    return f"{PAIR_OPEN}({box.x1},{box.y1}),({box.x2},{box.y2}){PAIR_CLOSE}"


def serialize_action(action: UnifiedAction, dialect: Dialect) -> str:
    """
    Writes an action in its canonical text form.

    :param action: A valid unified action.
    :param dialect: Coordinate dialect.
    :return: The action expression.
    """
    parts = [action.name]
    if action.point is not None:
        parts.append(serialize_point(action.point, dialect))
    if action.box is not None:
        parts.append(serialize_box(action.box, dialect))
    if action.text is not None:
        parts.append(f"[{escape_text(action.text)}]")
    if action.direction is not None:
        parts.append(f"[{action.direction.value}]")
    return " ".join(parts)


class _Scanner:
    """
    Cursor over an action expression that reports the failing position.
    """

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> ActionSyntaxError:
        return ActionSyntaxError(message, self.text, self.pos)

    def skip_ws(self) -> None:
        self.pos = _WS.match(self.text, self.pos).end()

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self, literal: str) -> bool:
        return self.text.startswith(literal, self.pos)

    def expect(self, literal: str) -> None:
        self.skip_ws()
        if not self.peek(literal):
            raise self.error(f"expected {literal!r}")
        self.pos += len(literal)

    def name(self) -> str:
        self.skip_ws()
        match = _NAME.match(self.text, self.pos)
        if not match:
            raise self.error("expected an action name")
        self.pos = match.end()
        return match.group()

    def integer(self) -> int:
        self.skip_ws()
        match = _INT.match(self.text, self.pos)
        if not match:
            raise self.error("expected an integer coordinate")
        self.pos = match.end()
        return int(match.group())

    def integers(self, count: int, separator: str = ",") -> List[int]:
        values = [self.integer()]
        for _ in range(count - 1):
            self.expect(separator)
            values.append(self.integer())
        return values

    def bracket_text(self) -> str:
        """
        Reads a bracketed text group, undoing backslash escapes.
        """
        self.expect("[")
        chars = []
        while self.pos < len(self.text):
            char = self.text[self.pos]
            if char == "\\":
                if self.pos + 1 >= len(self.text):
                    raise self.error("dangling escape")
                chars.append(self.text[self.pos + 1])
                self.pos += 2
                continue
            if char == "]":
                self.pos += 1
                return "".join(chars)
            chars.append(char)
            self.pos += 1
        raise self.error("unterminated '['")


def _tagged_group(scanner: _Scanner) -> Tuple[str, object]:
    if scanner.peek("<point>"):
        scanner.expect("<point>")
        scanner.expect("[")
        scanner.expect("[")
        values = scanner.integers(2)
        scanner.expect("]")
        scanner.expect("]")
        scanner.expect("</point>")
        return "point", Point(*values)
    scanner.expect("<box>")
    scanner.expect("[")
    scanner.expect("[")
    values = scanner.integers(4)
    scanner.expect("]")
    scanner.expect("]")
    scanner.expect("</box>")
    return "box", Box(*values)


def _pair_group(scanner: _Scanner) -> Tuple[str, object]:
    scanner.expect(PAIR_OPEN)
    scanner.expect("(")
    first = scanner.integers(2)
    scanner.expect(")")
    scanner.skip_ws()
    if scanner.peek(","):
        scanner.expect(",")
        scanner.expect("(")
        second = scanner.integers(2)
        scanner.expect(")")
        scanner.expect(PAIR_CLOSE)
        return "box", Box(*(first + second))
    scanner.expect(PAIR_CLOSE)
    return "point", Point(*first)


def _resolve_name(raw_name: str, manifest: CustomActionManifest,
                  registry: Optional[AliasRegistry], source: Optional[str]) -> str:
    if raw_name in BASIC_ACTIONS or raw_name in manifest:
        return raw_name
    if registry is not None and source is not None:
        return registry.canonicalize(raw_name, source)
    raise UnmappedActionError(raw_name, source)


def parse_action(text: str, dialect: Dialect, manifest: Optional[CustomActionManifest] = None,
                 registry: Optional[AliasRegistry] = None, source: Optional[str] = None) -> UnifiedAction:
    """
    Parses a single action expression.

    :param text: The expression.
    :param dialect: Coordinate dialect the expression is written in.
    :param manifest: Declared custom actions; defaults to the bundled manifest.
    :param registry: Alias registry used to resolve non-canonical names.
    :param source: Dataset tag for alias resolution.
    :return: The structured action.
    :raises ActionSyntaxError: On malformed text, with the failing position.
    :raises CoordinateRangeError: If a coordinate is outside [0, 1000].
    :raises UnmappedActionError: If the name is neither canonical nor resolvable.
    """
    manifest = manifest if manifest is not None else _default_manifest()
    scanner = _Scanner(text)
    name = _resolve_name(scanner.name(), manifest, registry, source)

    groups: List[Tuple[str, object, int]] = []
    texts: List[Tuple[str, int]] = []
    while not scanner.at_end():
        start = scanner.pos
        if scanner.peek("["):
            texts.append((scanner.bracket_text(), start))
        elif dialect == Dialect.TAGGED and (scanner.peek("<point>") or scanner.peek("<box>")):
            kind, value = _tagged_group(scanner)
            groups.append((kind, value, start))
        elif dialect == Dialect.PAIR and scanner.peek(PAIR_OPEN):
            kind, value = _pair_group(scanner)
            groups.append((kind, value, start))
        else:
            raise scanner.error(f"unexpected argument for the {dialect.value} dialect")

    slots = _expected_slots(name, manifest)
    values = {}
    for kind, value, start in groups:
        if kind not in slots or kind in values:
            raise ActionSyntaxError(f"{name} does not take a {kind} here", text, start)
        values[kind] = value
    bracket_slots = [slot for slot in slots if slot in ("text", "direction")]
    if len(texts) != len(bracket_slots):
        raise ActionSyntaxError(f"{name} takes {len(bracket_slots)} bracketed argument(s), got {len(texts)}",
                                text, scanner.pos)
    for slot, (content, start) in zip(bracket_slots, texts):
        if slot == "direction":
            try:
                values[slot] = Direction(content.strip().upper())
            except ValueError:
                raise ActionSyntaxError(f"unknown direction {content!r}", text, start) from None
        else:
            values[slot] = content
    missing = [slot for slot in slots if slot not in values]
    if missing:
        raise ActionSyntaxError(f"{name} is missing {missing}", text, scanner.pos)
    try:
        action = UnifiedAction(name, **values)
    except CoordinateRangeError:
        raise
    except DataError as error:
        raise ActionSyntaxError(str(error), text, scanner.pos) from error
    return action


def _expected_slots(name: str, manifest: CustomActionManifest) -> Tuple[str, ...]:
    if name in BASIC_SLOTS:
        return BASIC_SLOTS[name]
    return manifest.slots_for(name)


@lru_cache(maxsize=None)
def _default_manifest() -> CustomActionManifest:
    return CustomActionManifest.default()
