"""
guicorpus Package

This package builds GUI grounding and agent-step training corpora: it
ingests interface snapshots, filters and segments them into grounding
records, explores synthetic GUI environments, annotates instruction
grounding data, unifies heterogeneous agent datasets into one action space,
and evaluates predictions.

Modules:
- action_lang: Unified action space, coordinate frame, dialects and alias registry.
- snapshot_ingest: Snapshot loading, element extraction, error-page patterns.
- corpus_filter: Page filtering, element capping and annotation linting.
- page_segmenter: Screenshot windows and grounding records.
- explorer: Synthetic GUI environments and their DFS / random-walk explorers.
- annotator: Set-of-Mark annotation requests and completion clients.
- unifier: Dataset adapters, variants and conversation packing.
- evalkit: Metrics, reports and trivial predictors.
- cli: Command-line front end and the stage pipeline.
"""
from .action_lang import AliasRegistry, CustomActionManifest, Dialect, UnifiedAction, parse_action, serialize_action
from .config_loader import ConfigLoader
from .exceptions import ClientError, ConfigError, DataError, GuiCorpusError
from .snapshot_ingest import extract_elements, load_snapshot

__version__ = "0.1.0"
