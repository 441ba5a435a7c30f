"""
Annotation Linter Module

Finds suspicious grounding records: duplicate instructions on one
screenshot, degenerate or out-of-range target boxes, and instructions that
share no word with any element of their page.

Findings are advisory; nothing is removed.
"""
import re
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

from guicorpus.action_lang.coordinates import PER_MILLE
from guicorpus.page_segmenter.records import GroundingRecord
from guicorpus.snapshot_ingest.extractor import Element

DUPLICATE_INSTRUCTION = "duplicate-instruction"
DEGENERATE_BOX = "degenerate-box"
OUT_OF_RANGE = "out-of-range"
NO_ELEMENT_OVERLAP = "no-element-overlap"

_WORD = re.compile(r"\w+")
_TRAILING_PUNCTUATION = re.compile(r"[\s.!?,;:]+$")


@dataclass(frozen=True)
class LintFinding:
    kind: str
    snapshot_id: str
    window_index: int
    record_index: int
    message: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "snapshot_id": self.snapshot_id,
            "window_index": self.window_index,
            "record_index": self.record_index,
            "message": self.message,
        }


def normalize_instruction(text: str) -> str:
    return _TRAILING_PUNCTUATION.sub("", " ".join(text.lower().split()))


def words(text: str) -> Set[str]:
    return set(_WORD.findall(text.lower()))


def _target_box(record: Dict[str, Any]) -> Optional[Sequence[Any]]:
    box = record.get("target_box")
    if box is not None:
        return box
    point = record.get("target_point")
    if point is not None:
        return list(point) * 2
    return None


def _box_findings(record: Dict[str, Any]) -> List[Tuple[str, str]]:
    box = _target_box(record)
    if box is None or len(box) != 4:
        return [(OUT_OF_RANGE, f"malformed target {box!r}")]
    if any(not isinstance(value, (int, float)) or not 0 <= value <= PER_MILLE for value in box):
        return [(OUT_OF_RANGE, f"target {list(box)} outside [0, {PER_MILLE}]")]
    if record.get("target_box") is not None and (box[2] - box[0]) * (box[3] - box[1]) <= 0:
        return [(DEGENERATE_BOX, f"target box {list(box)} has no area")]
    return []


def lint_annotations(records: Iterable[Union[GroundingRecord, Dict[str, Any]]],
                     elements: Optional[Mapping[str, Sequence[Element]]] = None) -> List[LintFinding]:
    """
    Lints grounding records.

    :param records: Records, as objects or as their stored dicts.
    :param elements: Extracted elements per snapshot id; the word-overlap check
                     runs only for snapshots present here.
    :return: Findings in record order.
    """
    findings = []
    seen: Dict[Tuple[str, int, str], int] = {}
    vocabulary: Dict[str, Set[str]] = {}

    for index, record in enumerate(records):
        data = record.to_dict() if isinstance(record, GroundingRecord) else record
        snapshot_id = data.get("snapshot_id", "")
        window_index = data.get("window_index", 0)
        text = data.get("text", "")

        def finding(kind: str, message: str) -> LintFinding:
            return LintFinding(kind, snapshot_id, window_index, index, message)

        key = (snapshot_id, window_index, normalize_instruction(text))
        if key in seen:
            findings.append(finding(DUPLICATE_INSTRUCTION, f"same text as record {seen[key]}: {text!r}"))
        else:
            seen[key] = index

        findings.extend(finding(kind, message) for kind, message in _box_findings(data))

        if elements is not None and snapshot_id in elements:
            if snapshot_id not in vocabulary:
                vocabulary[snapshot_id] = set().union(
                    *(words(element.referring_expression) for element in elements[snapshot_id]))
            if not words(text) & vocabulary[snapshot_id]:
                findings.append(finding(NO_ELEMENT_OVERLAP, f"no word of {text!r} names an element"))
    return findings
