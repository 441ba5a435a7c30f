"""
Evaluation Report Module

This module aggregates step verdicts into Type / Grounding / SR ratios per
split, macro-averages splits per dataset, and renders the summary table.

Grounding counts only steps whose ground truth carries coordinates; a split
without such steps has no Grounding value and is left out of the Grounding
macro mean.

Classes:
- GroundingEval: Grounding accuracy and mean IoU of point/box predictions.
- AgentEval: Type, Grounding and SR of one split.
- MacroReport: Split evaluations and their unweighted mean.
- MetricReport: Macro reports per dataset plus the optional grounding evaluation.

Functions:
- evaluate_grounding: Scores grounding predictions against target boxes.
- evaluate_steps: Step verdicts of predicted AgentSteps.
- aggregate, aggregate_macro: Reductions into AgentEval and MacroReport.
- evaluate_datasets: Full report over predicted AgentSteps.

Dependencies:
- pandas: The summary table.
"""
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import pandas as pd

from guicorpus.action_lang.coordinates import Box, Point
from guicorpus.evalkit.metrics import (
    DEFAULT_CLICK_THRESHOLD, DEFAULT_F1_THRESHOLD, StepVerdict, iou, point_in_box, step_success,
)
from guicorpus.exceptions import EmptyEvaluationError
from guicorpus.unifier.steps import AgentStep

SUMMARY_COLUMNS = ["dataset", "Type", "Grounding", "SR", "n"]
GROUNDING_DENOMINATOR = "steps whose ground truth carries coordinates"


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def _round(value: Optional[float]) -> Optional[float]:
    return None if value is None else round(value, 6)


@dataclass(frozen=True)
class GroundingEval:
    accuracy: float
    mean_iou: Optional[float]
    n: int
    n_box: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {"accuracy": _round(self.accuracy), "mean_iou": _round(self.mean_iou), "n": self.n,
                "n_box": self.n_box}


def evaluate_grounding(pairs: Iterable[Tuple[Union[Point, Box], Box]]) -> GroundingEval:
    """
    Scores grounding predictions.

    A box prediction counts as correct when its centre falls in the target;
    IoU is averaged over box predictions only.

    :param pairs: (prediction, target box) pairs.
    :return: Accuracy, mean IoU (None without box predictions) and counts.
    :raises EmptyEvaluationError: If there are no pairs.
    """
    hits = 0
    ious: List[float] = []
    n = 0
    for prediction, target in pairs:
        n += 1
        if isinstance(prediction, Box):
            ious.append(iou(prediction, target))
            prediction = prediction.center()
        hits += point_in_box(prediction, target)
    if n == 0:
        raise EmptyEvaluationError("No grounding predictions to evaluate")
    return GroundingEval(hits / n, _mean(ious) if ious else None, n, len(ious))


@dataclass(frozen=True)
class AgentEval:
    type_em: float
    grounding: Optional[float]
    sr: float
    n: int
    n_grounding: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "Type": _round(self.type_em),
            "Grounding": _round(self.grounding),
            "SR": _round(self.sr),
            "n": self.n,
            "n_grounding": self.n_grounding,
        }


def aggregate(verdicts: Sequence[StepVerdict]) -> AgentEval:
    """
    Reduces step verdicts into ratios.

    :raises EmptyEvaluationError: If there are no verdicts.
    """
    if not verdicts:
        raise EmptyEvaluationError("No evaluated steps to aggregate")
    grounded = [verdict.grounding_match for verdict in verdicts if verdict.grounding_match is not None]
    n = len(verdicts)
    return AgentEval(
        type_em=sum(verdict.type_match for verdict in verdicts) / n,
        grounding=sum(grounded) / len(grounded) if grounded else None,
        sr=sum(verdict.success for verdict in verdicts) / n,
        n=n,
        n_grounding=len(grounded),
    )


@dataclass(frozen=True)
class MacroReport:
    splits: Dict[str, AgentEval]
    macro: AgentEval

    def to_dict(self) -> Dict[str, Any]:
        return {"splits": {name: self.splits[name].to_dict() for name in sorted(self.splits)},
                "macro": self.macro.to_dict()}


def aggregate_macro(splits: Mapping[str, AgentEval]) -> MacroReport:
    """
    Averages split evaluations without weighting.

    :param splits: Evaluation per split name.
    :return: The splits and their mean; n fields are summed.
    :raises EmptyEvaluationError: If there are no splits.
    """
    if not splits:
        raise EmptyEvaluationError("No splits to macro-average")
    evals = [splits[name] for name in sorted(splits)]
    grounded = [item.grounding for item in evals if item.grounding is not None]
    macro = AgentEval(
        type_em=_mean([item.type_em for item in evals]),
        grounding=_mean(grounded) if grounded else None,
        sr=_mean([item.sr for item in evals]),
        n=sum(item.n for item in evals),
        n_grounding=sum(item.n_grounding for item in evals),
    )
    return MacroReport(dict(splits), macro)


def evaluate_steps(steps: Iterable[AgentStep], click_threshold: float = DEFAULT_CLICK_THRESHOLD,
                   f1_threshold: float = DEFAULT_F1_THRESHOLD) -> List[StepVerdict]:
    return [step_success(step.predicted_action, step.gt_action, step.screen, click_threshold, f1_threshold)
            for step in steps]


@dataclass(frozen=True)
class MetricReport:
    datasets: Dict[str, MacroReport]
    grounding: Optional[GroundingEval] = None

    def summary(self) -> pd.DataFrame:
        """
        One row per dataset with its macro Type, Grounding and SR.
        """
        rows = [
            {"dataset": name, "Type": report.macro.type_em, "Grounding": report.macro.grounding,
             "SR": report.macro.sr, "n": report.macro.n}
            for name, report in sorted(self.datasets.items())
        ]
        return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)

    def to_tsv(self) -> str:
        return self.summary().to_csv(sep="\t", index=False, float_format="%.4f", na_rep="n/a")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "grounding_denominator": GROUNDING_DENOMINATOR,
            "datasets": {name: self.datasets[name].to_dict() for name in sorted(self.datasets)},
            "grounding": self.grounding.to_dict() if self.grounding else None,
        }


def evaluate_datasets(steps: Iterable[AgentStep], click_threshold: float = DEFAULT_CLICK_THRESHOLD,
                      f1_threshold: float = DEFAULT_F1_THRESHOLD) -> MetricReport:
    """
    Evaluates predicted steps per dataset and split.

    :param steps: Steps with predicted_action filled in (None counts as wrong).
    :return: Macro reports per dataset.
    :raises EmptyEvaluationError: If there are no steps.
    """
    grouped: Dict[str, Dict[str, List[AgentStep]]] = defaultdict(lambda: defaultdict(list))
    for step in steps:
        grouped[step.dataset][step.split].append(step)
    if not grouped:
        raise EmptyEvaluationError("No steps to evaluate")
    datasets = {
        dataset: aggregate_macro({
            split: aggregate(evaluate_steps(split_steps, click_threshold, f1_threshold))
            for split, split_steps in splits.items()
        })
        for dataset, splits in grouped.items()
    }
    return MetricReport(datasets)
