"""
Metrics Module

Step-level evaluation metrics for grounding and agent tasks. All functions
are pure and deterministic; comparisons that decide correctness use exact
integer or fraction arithmetic so boundary cases never depend on float
rounding.

Functions:
- point_in_box: Point inside box, boundaries inclusive.
- iou: Intersection over union of two boxes.
- click_correct: Pixel distance within a share of the screen width.
- token_f1, text_correct: Token-level F1 of two strings.
- step_success: Type, grounding and success verdict of one predicted step.
"""
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from guicorpus.action_lang.actions import UnifiedAction
from guicorpus.action_lang.coordinates import Box, Point, denormalize_point

DEFAULT_CLICK_THRESHOLD = 0.14
DEFAULT_F1_THRESHOLD = 0.5


def _ratio(value: float) -> Fraction:
    return Fraction(str(value))


def point_in_box(point: Point, box: Box) -> bool:
    return box.x1 <= point.x <= box.x2 and box.y1 <= point.y <= box.y2


def iou(a: Box, b: Box, inclusive: bool = False) -> float:
    """
    Computes the intersection over union of two boxes.

    By default boxes are continuous regions and a box's area is
    (x2 - x1) * (y2 - y1). With inclusive=True boxes are closed sets of
    integer grid cells, so a degenerate point box covers one cell.

    :param a: First box.
    :param b: Second box.
    :param inclusive: Count boxes as inclusive integer grids.
    :return: The ratio in [0, 1]. An empty union gives 0, except for two
             identical point boxes, which give 1; identical line boxes give 0.
    """
    pad = 1 if inclusive else 0
    width = min(a.x2, b.x2) - max(a.x1, b.x1) + pad
    height = min(a.y2, b.y2) - max(a.y1, b.y1) + pad
    intersection = max(0, width) * max(0, height)
    area_a = (a.x2 - a.x1 + pad) * (a.y2 - a.y1 + pad)
    area_b = (b.x2 - b.x1 + pad) * (b.y2 - b.y1 + pad)
    union = area_a + area_b - intersection
    if union == 0:
        return 1.0 if a == b and a.x1 == a.x2 and a.y1 == a.y2 else 0.0
    return intersection / union


def click_correct(pred: Tuple[int, int], gt: Tuple[int, int], screen_width: int,
                  threshold: float = DEFAULT_CLICK_THRESHOLD) -> bool:
    """
    Checks whether a predicted pixel lies within threshold * screen_width of the target.

    :param pred: Predicted pixel (x, y).
    :param gt: Ground-truth pixel (x, y), in the same frame.
    :param screen_width: Screen width in pixels; used even when the screen is taller than wide.
    :param threshold: Share of the screen width; the boundary counts as correct.
    :return: Whether the Euclidean distance is within the threshold.
    """
    dx, dy = pred[0] - gt[0], pred[1] - gt[1]
    limit = _ratio(threshold) * screen_width
    return dx * dx + dy * dy <= limit * limit


def tokens(text: str) -> Counter:
    return Counter(text.lower().split())


def token_f1(pred: str, gt: str) -> float:
    """
    Token-level F1: lowercase, whitespace tokens, multiset overlap.
    """
    pred_tokens, gt_tokens = tokens(pred), tokens(gt)
    common = sum((pred_tokens & gt_tokens).values())
    if common == 0:
        return 1.0 if not pred_tokens and not gt_tokens else 0.0
    precision = Fraction(common, sum(pred_tokens.values()))
    recall = Fraction(common, sum(gt_tokens.values()))
    return float(2 * precision * recall / (precision + recall))


def text_correct(pred: str, gt: str, threshold: float = DEFAULT_F1_THRESHOLD) -> bool:
    return token_f1(pred, gt) > threshold


@dataclass(frozen=True)
class StepVerdict:
    type_match: bool
    grounding_match: Optional[bool]
    success: bool


def _click(pred: Point, gt: Point, screen: Tuple[int, int], threshold: float) -> bool:
    return click_correct(denormalize_point(pred, screen), denormalize_point(gt, screen), screen[0], threshold)


def step_success(pred: Optional[UnifiedAction], gt: UnifiedAction, screen: Tuple[int, int],
                 click_threshold: float = DEFAULT_CLICK_THRESHOLD,
                 f1_threshold: float = DEFAULT_F1_THRESHOLD) -> StepVerdict:
    """
    Judges one predicted step against its ground truth.

    The action type must match exactly. Arguments are checked per populated
    ground-truth slot: points by click distance, boxes by click distance of
    both corners, text by token F1, directions exactly. Actions without
    arguments must be equal. Grounding is judged only when the ground truth
    carries coordinates.

    :param pred: Predicted action, or None when the model produced nothing usable.
    :param gt: Ground-truth action.
    :param screen: Screen size in pixels.
    :return: The verdict.
    """
    grounded = gt.point is not None or gt.box is not None
    if pred is None:
        return StepVerdict(False, False if grounded else None, False)

    type_match = pred.name == gt.name
    checks = []
    grounding_match = None
    if gt.point is not None:
        grounding_match = pred.point is not None and _click(pred.point, gt.point, screen, click_threshold)
        checks.append(grounding_match)
    if gt.box is not None:
        grounding_match = pred.box is not None and all(
            _click(Point(p[0], p[1]), Point(g[0], g[1]), screen, click_threshold)
            for p, g in (((pred.box.x1, pred.box.y1), (gt.box.x1, gt.box.y1)),
                         ((pred.box.x2, pred.box.y2), (gt.box.x2, gt.box.y2))))
        checks.append(grounding_match)
    if gt.text is not None:
        checks.append(pred.text is not None and text_correct(pred.text, gt.text, f1_threshold))
    if gt.direction is not None:
        checks.append(pred.direction == gt.direction)
    if not checks:
        checks.append(pred == gt)
    return StepVerdict(type_match, grounding_match, type_match and all(checks))
