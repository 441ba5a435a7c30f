"""
Coordinates Module

This module holds the geometry shared across guicorpus: per-mille points and
boxes (integers in [0, 1000] relative to an image's width and height), pixel
boxes, and the conversions between the two frames.

Per-mille conversion rounds half up to the nearest integer and then clamps to
[0, 1000]; the inverse rounds half up to the nearest pixel. Arithmetic is done
on exact fractions so float pixel input never picks up binary rounding error.

Classes:
- Point: A per-mille point.
- Box: A per-mille box.
- PixelBox: An integer pixel box in some page or window frame.

Functions:
- normalize_point, normalize_box: Pixel frame to per-mille.
- denormalize_point, denormalize_box: Per-mille to pixel frame.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

from guicorpus.exceptions import CoordinateRangeError

PER_MILLE = 1000

Number = Union[int, float, Fraction]
PixelSize = Tuple[int, int]


def _check_per_mille(name: str, value: int) -> None:
    if isinstance(value, bool) or not isinstance(value, int):
        raise CoordinateRangeError(f"{name} must be an integer, got {value!r}")
    if not 0 <= value <= PER_MILLE:
        raise CoordinateRangeError(f"{name}={value} outside [0, {PER_MILLE}]")


def round_half_up(value: Number) -> int:
    return math.floor(Fraction(value) + Fraction(1, 2))


@dataclass(frozen=True)
class Point:
    """
    A point in per-mille coordinates of an image.
    """

    x: int
    y: int

    def __post_init__(self):
        _check_per_mille("x", self.x)
        _check_per_mille("y", self.y)

    def as_list(self):
        return [self.x, self.y]


@dataclass(frozen=True)
class Box:
    """
    An axis-aligned box in per-mille coordinates, corners inclusive.
    """

    x1: int
    y1: int
    x2: int
    y2: int

    def __post_init__(self):
        for name in ("x1", "y1", "x2", "y2"):
            _check_per_mille(name, getattr(self, name))
        if self.x1 > self.x2 or self.y1 > self.y2:
            raise CoordinateRangeError(f"Box corners out of order: {self.as_list()}")

    @classmethod
    def from_point(cls, point: Point) -> "Box":
        return cls(point.x, point.y, point.x, point.y)

    def area(self) -> int:
        return (self.x2 - self.x1) * (self.y2 - self.y1)

    def center(self) -> Point:
        """
        Returns the box centre, rounding half up.
        """
        return Point(round_half_up(Fraction(self.x1 + self.x2, 2)), round_half_up(Fraction(self.y1 + self.y2, 2)))

    def as_list(self):
        return [self.x1, self.y1, self.x2, self.y2]


@dataclass(frozen=True)
class PixelBox:
    """
    An integer pixel box; x2/y2 are the right and bottom edges.
    """

    x1: int
    y1: int
    x2: int
    y2: int

    @property
    def width(self) -> int:
        return max(0, self.x2 - self.x1)

    @property
    def height(self) -> int:
        return max(0, self.y2 - self.y1)

    def area(self) -> int:
        return self.width * self.height

    def center(self) -> Tuple[Fraction, Fraction]:
        return Fraction(self.x1 + self.x2, 2), Fraction(self.y1 + self.y2, 2)

    def clamp(self, width: int, height: int) -> "PixelBox":
        """
        Clamps the box into the frame [0, width] x [0, height].
        """
        x1 = min(max(self.x1, 0), width)
        y1 = min(max(self.y1, 0), height)
        x2 = min(max(self.x2, x1), width)
        y2 = min(max(self.y2, y1), height)
        return PixelBox(x1, y1, x2, y2)

    def intersect(self, other: "PixelBox") -> Optional["PixelBox"]:
        x1, y1 = max(self.x1, other.x1), max(self.y1, other.y1)
        x2, y2 = min(self.x2, other.x2), min(self.y2, other.y2)
        if x2 <= x1 or y2 <= y1:
            return None
        return PixelBox(x1, y1, x2, y2)

    def shift(self, dx: int, dy: int) -> "PixelBox":
        return PixelBox(self.x1 + dx, self.y1 + dy, self.x2 + dx, self.y2 + dy)

    def contains(self, other: "PixelBox") -> bool:
        return self.x1 <= other.x1 and self.y1 <= other.y1 and other.x2 <= self.x2 and other.y2 <= self.y2

    def as_list(self):
        return [self.x1, self.y1, self.x2, self.y2]


def _check_size(size: PixelSize) -> None:
    width, height = size
    if width <= 0 or height <= 0:
        raise CoordinateRangeError(f"Page dimensions must be positive, got {width}x{height}")


def _to_per_mille(value: Number, extent: int) -> int:
    scaled = round_half_up(Fraction(value) * PER_MILLE / extent)
    return min(max(scaled, 0), PER_MILLE)


def _to_pixels(value: int, extent: int) -> int:
    return round_half_up(Fraction(value * extent, PER_MILLE))


def normalize_point(px: Tuple[Number, Number], size: PixelSize) -> Point:
    """
    Converts a pixel point into per-mille coordinates of a page.

    :param px: Pixel coordinates (x, y).
    :param size: Page width and height in pixels.
    :return: The per-mille point, rounded half up and clamped to [0, 1000].
    :raises CoordinateRangeError: If a page dimension is not positive.
    """
    _check_size(size)
    return Point(_to_per_mille(px[0], size[0]), _to_per_mille(px[1], size[1]))


def normalize_box(box: PixelBox, size: PixelSize) -> Box:
    _check_size(size)
    width, height = size
    return Box(_to_per_mille(box.x1, width), _to_per_mille(box.y1, height),
               _to_per_mille(box.x2, width), _to_per_mille(box.y2, height))


def denormalize_point(point: Point, size: PixelSize) -> Tuple[int, int]:
    """
    Converts a per-mille point back into integer pixels of a page.

    :param point: The per-mille point.
    :param size: Page width and height in pixels.
    :return: Pixel coordinates (x, y), rounded half up.
    """
    _check_size(size)
    return _to_pixels(point.x, size[0]), _to_pixels(point.y, size[1])


def denormalize_box(box: Box, size: PixelSize) -> PixelBox:
    _check_size(size)
    width, height = size
    return PixelBox(_to_pixels(box.x1, width), _to_pixels(box.y1, height),
                    _to_pixels(box.x2, width), _to_pixels(box.y2, height))
