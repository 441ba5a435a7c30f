"""
Step Records Module

Classes:
- RawAction: An action as a source dataset records it.
- SourceStep: One step of a source agent dataset, before unification.
- AgentStep: One step in the unified action space.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

from guicorpus.action_lang.actions import UnifiedAction
from guicorpus.exceptions import DataError


@dataclass(frozen=True)
class RawAction:
    name: str
    args: Dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "args": dict(sorted(self.args.items()))}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RawAction":
        return cls(data["name"], {key: str(value) for key, value in data.get("args", {}).items()})


@dataclass(frozen=True)
class SourceStep:
    """
    A step of a source dataset: a raw action with raw string arguments,
    plus the raw actions that came before it in the episode.
    """

    dataset: str
    task: str
    raw_action_name: str
    raw_args: Dict[str, str]
    screenshot_ref: str
    history: Tuple[RawAction, ...] = ()
    split: str = "train"
    thought: Optional[str] = None

    def __post_init__(self):
        if not self.dataset or not self.split:
            raise DataError("Source steps need a dataset tag and a split name")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dataset": self.dataset,
            "split": self.split,
            "task": self.task,
            "raw_action_name": self.raw_action_name,
            "raw_args": dict(sorted(self.raw_args.items())),
            "screenshot_ref": self.screenshot_ref,
            "history": [action.to_dict() for action in self.history],
            "thought": self.thought,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SourceStep":
        try:
            return cls(
                dataset=data["dataset"],
                task=data["task"],
                raw_action_name=data["raw_action_name"],
                raw_args={key: str(value) for key, value in data.get("raw_args", {}).items()},
                screenshot_ref=data["screenshot_ref"],
                history=tuple(RawAction.from_dict(item) for item in data.get("history", ())),
                split=data.get("split", "train"),
                thought=data.get("thought"),
            )
        except KeyError as error:
            raise DataError(f"Source step is missing field {error}") from error


@dataclass(frozen=True)
class AgentStep:
    """
    A step in the unified action space.

    The history holds the serialized actions of all earlier steps. Coordinates
    are per-mille of the step's screen, whose pixel size is kept for metrics.
    """

    task: str
    history: Tuple[str, ...]
    screenshot_ref: str
    gt_action: UnifiedAction
    screen: Tuple[int, int]
    dataset: str = ""
    split: str = "train"
    thought: Optional[str] = None
    predicted_action: Optional[UnifiedAction] = None

    def with_prediction(self, action: Optional[UnifiedAction]) -> "AgentStep":
        return AgentStep(self.task, self.history, self.screenshot_ref, self.gt_action, self.screen,
                         self.dataset, self.split, self.thought, action)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dataset": self.dataset,
            "split": self.split,
            "task": self.task,
            "history": list(self.history),
            "screenshot_ref": self.screenshot_ref,
            "screen": list(self.screen),
            "thought": self.thought,
            "gt_action": self.gt_action.to_dict(),
            "predicted_action": self.predicted_action.to_dict() if self.predicted_action else None,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AgentStep":
        predicted = data.get("predicted_action")
        return cls(
            task=data["task"],
            history=tuple(data.get("history", ())),
            screenshot_ref=data["screenshot_ref"],
            gt_action=UnifiedAction.from_dict(data["gt_action"]),
            screen=tuple(data["screen"]),
            dataset=data.get("dataset", ""),
            split=data.get("split", "train"),
            thought=data.get("thought"),
            predicted_action=UnifiedAction.from_dict(predicted) if predicted else None,
        )
