"""
Page segmentation.

This package plans fixed-resolution screenshot windows over full-page
renders and turns extracted elements into window-local grounding records.
"""
from .records import GroundingKind, GroundingRecord
from .segmenter import (
    DEFAULT_WINDOW_SIZE, Window, emit_reg_records, plan_windows, remap_element, window_size_for,
)
