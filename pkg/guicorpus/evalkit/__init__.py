"""
Evaluation.

Grounding and agent-step metrics, their per-split and macro aggregation,
the summary table, and trivial predictors.
"""
from .metrics import (
    StepVerdict, click_correct, iou, point_in_box, step_success, text_correct, token_f1,
)
from .predictors import (
    ConstantClickPredictor, GtEchoPredictor, Predictor, RandomPredictor, make_predictor,
)
from .report import (
    AgentEval, GroundingEval, MacroReport, MetricReport,
    aggregate, aggregate_macro, evaluate_datasets, evaluate_grounding, evaluate_steps,
)
