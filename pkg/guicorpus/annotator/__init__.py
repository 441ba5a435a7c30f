"""
Instruction-grounding annotation.

Set-of-Mark request building, the completion-client contract with a
scripted stub and an HTTP transport, and conversion of sub-instructions
into IG grounding records.
"""
from .annotator import (
    AnnotationRequest, AnnotationResponse, AnnotationTask, AnnotatorConfig,
    annotate, annotate_many, build_tasks, ig_record, parse_response,
)
from .clients import CompletionClient, HttpCompletionClient, ScriptedCompletionClient, make_client
from .overlay import Mark, SomOverlay, build_overlay
