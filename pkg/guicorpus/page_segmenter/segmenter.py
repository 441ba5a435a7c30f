"""
Page Segmenter Module

This module cuts full-page renders into fixed-resolution screenshot windows
and remaps element boxes into window-local per-mille coordinates.

Windows are coordinate frames only; cropping the pixels is left to an
external renderer. Windows stack vertically with a stride of one window
height, and the last one is anchored to the page bottom so every window keeps
the full window size. A page shorter than one window gets a single window
of the page's own height.

Classes:
- Window: One screenshot window of a page.

Functions:
- plan_windows: Windows covering a page.
- window_size_for: Window size used for a snapshot's platform.
- remap_element: Window-local target box of an element, if visible enough.
- emit_reg_records: REG grounding records of a page.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from guicorpus.action_lang.coordinates import Box, PixelBox, normalize_box
from guicorpus.page_segmenter.records import GroundingKind, GroundingRecord
from guicorpus.snapshot_ingest.extractor import Element
from guicorpus.snapshot_ingest.snapshot import PageSnapshot

DEFAULT_WINDOW_SIZE = (1920, 1080)
DEFAULT_MIN_VISIBLE_FRACTION = 0.5


@dataclass(frozen=True)
class Window:
    index: int
    origin_y: int
    size: Tuple[int, int] = DEFAULT_WINDOW_SIZE

    @property
    def rect(self) -> PixelBox:
        """
        The window's rectangle in page pixels.
        """
        return PixelBox(0, self.origin_y, self.size[0], self.origin_y + self.size[1])


def plan_windows(page_size: Tuple[int, int], window_size: Tuple[int, int] = DEFAULT_WINDOW_SIZE) -> List[Window]:
    """
    Plans the screenshot windows of a page.

    :param page_size: Page width and height in pixels.
    :param window_size: Window width and height in pixels.
    :return: Windows in top-to-bottom order.
    """
    width, height = window_size
    page_height = page_size[1]
    if page_height <= height:
        return [Window(0, 0, (width, page_height))]
    origins = list(range(0, page_height - height + 1, height))
    if origins[-1] + height < page_height:
        origins.append(page_height - height)
    return [Window(index, origin, (width, height)) for index, origin in enumerate(origins)]


def window_size_for(snapshot: PageSnapshot, web_window: Tuple[int, int] = DEFAULT_WINDOW_SIZE) -> Tuple[int, int]:
    """
    Web pages use the configured window; desktop and mobile screens use their viewport.
    """
    if snapshot.platform == "web":
        return web_window
    return snapshot.viewport


def remap_element(element: Element, window: Window,
                  min_visible_fraction: float = DEFAULT_MIN_VISIBLE_FRACTION) -> Optional[Box]:
    """
    Maps an element into a window.

    :param element: Element with a page-pixel bbox.
    :param window: The window.
    :param min_visible_fraction: Smallest visible share of the element's area; the boundary is inclusive.
    :return: The clipped box in per-mille of the window, or None if too little is visible.
    """
    area = element.bbox.area()
    if area == 0:
        return None
    visible = element.bbox.intersect(window.rect)
    if visible is None:
        return None
    if Fraction(visible.area(), area) < Fraction(str(min_visible_fraction)):
        return None
    local = visible.shift(0, -window.origin_y)
    return normalize_box(local, window.size)


def emit_reg_records(snapshot: PageSnapshot, elements: Sequence[Element], windows: Sequence[Window],
                     min_visible_fraction: float = DEFAULT_MIN_VISIBLE_FRACTION) -> List[GroundingRecord]:
    """
    Builds the REG records of a page: every element in every window it is visible enough in.

    :param snapshot: The page snapshot.
    :param elements: Filtered, capped elements in document order.
    :param windows: The page's windows.
    :param min_visible_fraction: Visibility threshold passed to remap_element.
    :return: Records ordered by window index, then document order.
    """
    records = []
    for window in windows:
        for element in elements:
            box = remap_element(element, window, min_visible_fraction)
            if box is not None:
                records.append(GroundingRecord(
                    snapshot_id=snapshot.id,
                    window_index=window.index,
                    kind=GroundingKind.REG,
                    text=element.referring_expression,
                    target_box=box,
                    node_path=element.node_path,
                ))
    return records
