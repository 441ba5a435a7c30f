"""
Pipeline Configuration Module

This module validates the merged configuration produced by ConfigLoader and
turns it into the typed settings each stage needs. Input paths resolve
relative to the configuration file's directory; a directory entry stands
for every snapshot, environment or record file inside it.

Classes:
- PipelineConfig: Validated settings of one pipeline run.
"""
import glob
import json
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from guicorpus.action_lang.actions import Dialect
from guicorpus.annotator.annotator import AnnotatorConfig
from guicorpus.corpus_filter.page_filter import FilterConfig
from guicorpus.exceptions import ConfigError
from guicorpus.explorer.explorer import ExplorationPolicy
from guicorpus.records import text_digest

SNAPSHOT_SUFFIXES = (".json", ".jsonl", ".jsonl.zst")
RECORD_SUFFIXES = (".jsonl",)
# Settings that do not change any output.
DIGEST_EXCLUDED = ("workers", "logging", "config_dir")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _section(config: Dict[str, Any], name: str) -> Dict[str, Any]:
    section = config.get(name)
    _require(isinstance(section, dict), f"Config section {name!r} must be an object")
    return section


def _number(section: Dict[str, Any], key: str, prefix: str, low: Optional[float] = None,
            high: Optional[float] = None, integer: bool = False) -> Any:
    value = section.get(key)
    kinds = (int,) if integer else (int, float)
    _require(isinstance(value, kinds) and not isinstance(value, bool), f"{prefix}.{key} must be a number")
    _require(low is None or value >= low, f"{prefix}.{key} must be >= {low}")
    _require(high is None or value <= high, f"{prefix}.{key} must be <= {high}")
    return value


def _expand(entries: Any, base_dir: str, suffixes: Tuple[str, ...], key: str) -> List[str]:
    if entries is None:
        return []
    if isinstance(entries, str):
        entries = [entries]
    _require(isinstance(entries, list), f"paths.{key} must be a list of paths")
    paths = []
    for entry in entries:
        path = os.path.normpath(os.path.join(base_dir, entry))
        if os.path.isdir(path):
            found = sorted(candidate for candidate in glob.glob(os.path.join(path, "*"))
                           if candidate.endswith(suffixes))
            _require(bool(found), f"paths.{key}: no input files in {path}")
            paths.extend(found)
        else:
            _require(os.path.exists(path), f"paths.{key}: {path} does not exist")
            paths.append(path)
    return paths


def _optional_file(value: Any, base_dir: str, key: str) -> Optional[str]:
    if value is None:
        return None
    path = os.path.normpath(os.path.join(base_dir, value))
    _require(os.path.isfile(path), f"{key}: {path} does not exist")
    return path


@dataclass
class PipelineConfig:
    """
    Validated run settings. The global seed reaches every seeded component
    through derive_seed labels.
    """

    seed: int
    workers: int
    log_level: str
    output_dir: str
    snapshots: List[str]
    environments: List[str]
    source_steps: List[str]
    predictions: Optional[str]
    interactable_roles: Tuple[str, ...]
    error_patterns: Optional[str]
    filter: FilterConfig
    window_size: Tuple[int, int]
    min_visible_fraction: float
    policy: ExplorationPolicy
    task_instruction: str
    annotator: AnnotatorConfig
    client: Dict[str, Any]
    alias_files: List[str]
    adapter_files: List[str]
    pack_size: int
    prompt_pool: int
    templates: Optional[str]
    dialect: Dialect
    predictor: str
    click_threshold: float
    text_f1_threshold: float
    raw: Dict[str, Any] = field(default_factory=dict, repr=False)

    @classmethod
    def from_dict(cls, config: Dict[str, Any]) -> "PipelineConfig":
        """
        Validates a merged configuration.

        :param config: Output of ConfigLoader.load.
        :return: The typed configuration.
        :raises ConfigError: On wrong types, out-of-range values or missing input paths.
        """
        base_dir = config.get("config_dir") or os.getcwd()
        seed = _number(config, "seed", "config", 0, integer=True)
        workers = _number(config, "workers", "config", 1, integer=True)
        paths = _section(config, "paths")
        ingest = _section(config, "ingest")
        filter_section = _section(config, "filter")
        segment = _section(config, "segment")
        explore = _section(config, "explore")
        annotator = _section(config, "annotator")
        unifier = _section(config, "unifier")
        evaluate = _section(config, "evaluate")

        try:
            filter_config = FilterConfig.from_dict(filter_section, seed=seed)
        except TypeError as error:
            raise ConfigError(f"Invalid filter section ({error})") from error
        for key in ("max_elements_per_page", "min_elements_for_render_check", "max_page_width"):
            _number(filter_section, key, "filter", 1, integer=True)

        dialect = str(unifier.get("dialect", "TAGGED")).upper()
        _require(dialect in Dialect.__members__, f"unifier.dialect must be one of {list(Dialect.__members__)}")
        roles = ingest.get("interactable_roles")
        _require(isinstance(roles, list) and all(isinstance(role, str) for role in roles),
                 "ingest.interactable_roles must be a list of strings")
        output_dir = paths.get("output_dir")
        _require(isinstance(output_dir, str) and bool(output_dir), "paths.output_dir must be a path")
        _require(annotator.get("client") in ("stub", "http"), "annotator.client must be 'stub' or 'http'")
        if annotator.get("client") == "http":
            _require(bool(annotator.get("url")), "annotator.url is required for the http client")

        return cls(
            seed=seed,
            workers=workers,
            log_level=str(config.get("logging", {}).get("level", "INFO")).upper(),
            output_dir=os.path.normpath(os.path.join(base_dir, output_dir)),
            snapshots=_expand(paths.get("snapshots"), base_dir, SNAPSHOT_SUFFIXES, "snapshots"),
            environments=_expand(paths.get("environments"), base_dir, (".json",), "environments"),
            source_steps=_expand(paths.get("source_steps"), base_dir, RECORD_SUFFIXES, "source_steps"),
            predictions=_optional_file(paths.get("predictions"), base_dir, "paths.predictions"),
            interactable_roles=tuple(roles),
            error_patterns=_optional_file(ingest.get("error_patterns"), base_dir, "ingest.error_patterns"),
            filter=filter_config,
            window_size=(_number(segment, "window_width", "segment", 1, integer=True),
                         _number(segment, "window_height", "segment", 1, integer=True)),
            min_visible_fraction=_number(segment, "min_visible_fraction", "segment", 0, 1),
            policy=ExplorationPolicy(explore.get("policy", "DFS"),
                                     _number(explore, "max_steps", "explore", 1, integer=True), seed),
            task_instruction=str(explore.get("task_instruction", "")),
            annotator=AnnotatorConfig.from_dict(annotator),
            client={key: annotator.get(key) for key in ("client", "script", "url", "timeout")},
            alias_files=_expand(unifier.get("alias_files"), base_dir, (".json",), "alias_files"),
            adapter_files=_expand(unifier.get("adapter_files"), base_dir, (".json",), "adapter_files"),
            pack_size=_number(unifier, "pack_size", "unifier", 1, integer=True),
            prompt_pool=_number(unifier, "prompt_pool", "unifier", 1, integer=True),
            templates=_optional_file(unifier.get("templates"), base_dir, "unifier.templates"),
            dialect=Dialect(dialect),
            predictor=str(evaluate.get("predictor", "gt-echo")),
            click_threshold=_number(evaluate, "click_threshold", "evaluate", 0),
            text_f1_threshold=_number(evaluate, "text_f1_threshold", "evaluate", 0, 1),
            raw=config,
        )

    @property
    def base_dir(self) -> str:
        return self.raw.get("config_dir") or os.getcwd()

    def output(self, name: str) -> str:
        return os.path.join(self.output_dir, name)

    def digest(self) -> str:
        """
        SHA-256 of the canonical JSON of the settings that affect outputs.
        """
        relevant = {key: value for key, value in self.raw.items() if key not in DIGEST_EXCLUDED}
        return text_digest(json.dumps(relevant, sort_keys=True, separators=(",", ":")))
