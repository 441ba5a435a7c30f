"""
Command-line front end and stage orchestration.
"""
from .cli import main
from .pipeline import STAGES, Pipeline, StageResult
from .pipeline_config import PipelineConfig
