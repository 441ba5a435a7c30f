"""
Pipeline Module

This module runs the corpus stages over the files named in a PipelineConfig
and records each run in the output directory's run manifest.

Stages and the files they write:
- ingest: pages.jsonl
- filter: filtered_pages.jsonl, filter_report.json
- segment: grounding_reg.jsonl, lint_findings.jsonl
- explore: trajectories.jsonl, agent_steps.jsonl, explored_pages.jsonl, explored_reg.jsonl
- annotate: grounding_ig.jsonl
- unify: unified_steps.jsonl, variants.jsonl, conversations.jsonl
- evaluate: metric_report.json, metric_summary.tsv

A stage whose inputs, config digest and outputs still match its manifest
entry is skipped. Stage boundaries are barriers; inside a stage, snapshot
files and environments are processed by a joblib worker pool.

Classes:
- StageResult: Record counts of one stage run.
- Pipeline: Runs stages for one configuration.

Dependencies:
- joblib: Per-file worker pool.
- tqdm: Progress bars.
"""
import json
import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Tuple

from joblib import Parallel, delayed
from tqdm import tqdm

from guicorpus.action_lang.registry import AliasRegistry, CustomActionManifest
from guicorpus.annotator.annotator import annotate_many, build_tasks, ig_record
from guicorpus.annotator.clients import make_client
from guicorpus.cli.manifest import RunManifest, StageEntry, digest_files
from guicorpus.cli.pipeline_config import PipelineConfig
from guicorpus.config_loader import ConfigLoader
from guicorpus.corpus_filter.linter import lint_annotations
from guicorpus.corpus_filter.page_filter import FilterConfig, FilterReport, cap_elements, filter_page
from guicorpus.evalkit.predictors import make_predictor
from guicorpus.evalkit.report import evaluate_datasets
from guicorpus.exceptions import ConfigError, DataError, ExplorationBudgetError
from guicorpus.explorer.environment import GuiEnvironment, load_environment
from guicorpus.explorer.explorer import ExplorationPolicy, Trajectory, explore, trajectory_to_steps
from guicorpus.page_segmenter.records import GroundingRecord
from guicorpus.page_segmenter.segmenter import emit_reg_records, plan_windows, window_size_for
from guicorpus.records import RecordWriter, read_records, write_records
from guicorpus.rng import derive_seed
from guicorpus.snapshot_ingest.error_pages import ErrorPagePatterns, is_error_page
from guicorpus.snapshot_ingest.extractor import Element, extract_elements
from guicorpus.snapshot_ingest.snapshot import PageSnapshot, iter_snapshot_documents, load_snapshot
from guicorpus.unifier.adapters import Unifier, load_adapters
from guicorpus.unifier.packing import InstructionTemplates, pack_conversations, variantize_reg
from guicorpus.unifier.steps import AgentStep, SourceStep

logger = logging.getLogger(__name__)

STAGES = ("ingest", "filter", "segment", "explore", "annotate", "unify", "evaluate")

PAGES = "pages.jsonl"
FILTERED_PAGES = "filtered_pages.jsonl"
FILTER_REPORT = "filter_report.json"
GROUNDING_REG = "grounding_reg.jsonl"
LINT_FINDINGS = "lint_findings.jsonl"
TRAJECTORIES = "trajectories.jsonl"
AGENT_STEPS = "agent_steps.jsonl"
EXPLORED_PAGES = "explored_pages.jsonl"
EXPLORED_REG = "explored_reg.jsonl"
GROUNDING_IG = "grounding_ig.jsonl"
IG_LINT_FINDINGS = "ig_lint_findings.jsonl"
UNIFIED_STEPS = "unified_steps.jsonl"
VARIANTS = "variants.jsonl"
CONVERSATIONS = "conversations.jsonl"
METRIC_REPORT = "metric_report.json"
METRIC_SUMMARY = "metric_summary.tsv"


@dataclass(frozen=True)
class StageResult:
    stage: str
    counts: Dict[str, int]
    skipped: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {"stage": self.stage, "skipped": self.skipped, "counts": dict(sorted(self.counts.items()))}


def page_record(snapshot: PageSnapshot, elements: List[Element], error_page: bool) -> Dict[str, Any]:
    return {
        "snapshot": snapshot.to_dict(),
        "elements": [element.to_dict() for element in elements],
        "error_page": error_page,
        "warnings": list(snapshot.warnings),
    }


def read_pages(path: str) -> Iterator[Tuple[PageSnapshot, List[Element]]]:
    for record in read_records(path, "page"):
        yield load_snapshot(record["snapshot"]), [Element.from_dict(item) for item in record["elements"]]


def write_json(path: str, document: Any) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as json_file:
        json.dump(document, json_file, indent=2, sort_keys=True)
        json_file.write("\n")


def _ingest_file(path: str, roles: Tuple[str, ...], patterns_path: Optional[str]) -> List[Dict[str, Any]]:
    patterns = ErrorPagePatterns.load(patterns_path)
    pages = []
    for document in iter_snapshot_documents(path):
        snapshot = load_snapshot(document)
        elements = extract_elements(snapshot, roles)
        pages.append(page_record(snapshot, elements, is_error_page(snapshot, patterns)))
    logger.debug("Ingested %d snapshots from %s", len(pages), path)
    return pages


def _accept_page(snapshot: PageSnapshot, elements: List[Element], filter_config: FilterConfig,
                 patterns: ErrorPagePatterns, report: FilterReport) -> Optional[List[Element]]:
    verdict = filter_page(snapshot, elements, filter_config, patterns)
    kept = cap_elements(elements, filter_config, snapshot.id) if verdict.accepted else []
    report.add(verdict, len(elements), len(kept))
    return kept if verdict.accepted else None


def _explore_environment(path: str, policy: ExplorationPolicy, instruction: str, filter_config: FilterConfig,
                         window_size: Tuple[int, int], min_visible_fraction: float, roles: Tuple[str, ...],
                         patterns_path: Optional[str]) -> Dict[str, Any]:
    env = load_environment(path)
    try:
        result = explore(env, policy)
    except ExplorationBudgetError as error:
        logger.warning("%s: step budget of %d exhausted with %d transitions left on the frontier",
                       env.id, policy.max_steps, error.frontier_size)
        result = error.partial
    steps = [step for trajectory in result.trajectories
             for step in trajectory_to_steps(trajectory, instruction, env)]

    patterns = ErrorPagePatterns.load(patterns_path)
    report = FilterReport()
    pages, records = [], []
    for snapshot in result.snapshots(env):
        kept = _accept_page(snapshot, extract_elements(snapshot, roles), filter_config, patterns, report)
        if kept is None:
            continue
        pages.append(page_record(snapshot, kept, False))
        windows = plan_windows(snapshot.page_size, window_size_for(snapshot, window_size))
        records.extend(emit_reg_records(snapshot, kept, windows, min_visible_fraction))
    return {
        "env_id": env.id,
        "trajectories": [trajectory.to_dict() for trajectory in result.trajectories],
        "steps": [step.to_dict() for step in steps],
        "pages": pages,
        "records": [record.to_dict() for record in records],
        "report": report,
    }


class Pipeline:
    """
    Runs corpus stages for one configuration.
    """

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.config_digest = config.digest()
        self.manifest = RunManifest(config.output_dir)

    def output(self, name: str) -> str:
        return self.config.output(name)

    def _existing(self, *names: str) -> List[str]:
        return [self.output(name) for name in names if os.path.exists(self.output(name))]

    def _require_outputs(self, stage: str, *names: str) -> List[str]:
        missing = [name for name in names if not os.path.exists(self.output(name))]
        if missing:
            raise ConfigError(f"Stage {stage} needs {', '.join(missing)}; run the earlier stages first")
        return [self.output(name) for name in names]

    def _inputs(self, stage: str) -> List[str]:
        config = self.config
        patterns = [config.error_patterns] if config.error_patterns else []
        if stage == "ingest":
            if not config.snapshots:
                raise ConfigError("Stage ingest needs paths.snapshots")
            return config.snapshots + patterns
        if stage == "filter":
            return self._require_outputs(stage, PAGES) + patterns
        if stage == "segment":
            return self._require_outputs(stage, FILTERED_PAGES)
        if stage == "explore":
            if not config.environments:
                raise ConfigError("Stage explore needs paths.environments")
            return config.environments + patterns
        if stage == "annotate":
            script = [os.path.join(config.base_dir, config.client["script"])] if config.client.get("script") else []
            return self._require_outputs(stage, TRAJECTORIES) + config.environments + script
        if stage == "unify":
            grounding = self._existing(GROUNDING_REG, EXPLORED_REG, GROUNDING_IG)
            if not config.source_steps and not grounding:
                raise ConfigError("Stage unify needs paths.source_steps or grounding records")
            templates = [config.templates] if config.templates else []
            return config.source_steps + grounding + config.alias_files + config.adapter_files + templates
        if stage == "evaluate":
            if config.predictions:
                return [config.predictions]
            steps = self._existing(UNIFIED_STEPS, AGENT_STEPS)
            if not steps:
                raise ConfigError("Stage evaluate needs paths.predictions or unified agent steps")
            return steps
        raise ConfigError(f"Unknown stage {stage!r}")

    def run(self, stage: str) -> StageResult:
        """
        Runs one stage unless its manifest entry is current.

        :param stage: Stage name.
        :return: The stage's output record counts.
        """
        inputs = self._inputs(stage)
        entry = StageEntry(digest_files(inputs, self.config.base_dir), self.config_digest)
        if self.manifest.is_current(stage, entry):
            logger.info("Stage %s is up to date, skipping", stage)
            return StageResult(stage, self.manifest.counts(stage), skipped=True)
        logger.info("Running stage %s", stage)
        counts = getattr(self, f"_run_{stage}")()
        self.manifest.record(stage, entry, counts)
        self.manifest.save(self.config_digest)
        for name, count in sorted(counts.items()):
            logger.info("  %s: %d records", name, count)
        return StageResult(stage, counts)

    def available(self, stage: str) -> bool:
        try:
            self._inputs(stage)
        except ConfigError:
            return False
        return True

    def run_all(self) -> List[StageResult]:
        """
        Runs every stage whose inputs are configured, in pipeline order.
        """
        results = []
        for stage in STAGES:
            if self.available(stage):
                results.append(self.run(stage))
            else:
                logger.info("Stage %s has no inputs, not run", stage)
        return results

    def _run_ingest(self) -> Dict[str, int]:
        config = self.config
        batches = Parallel(n_jobs=config.workers)(
            delayed(_ingest_file)(path, config.interactable_roles, config.error_patterns)
            for path in tqdm(config.snapshots, desc="Ingesting", unit="file"))
        seen = set()
        with RecordWriter(self.output(PAGES), "page") as writer:
            for batch in batches:
                for page in batch:
                    snapshot_id = page["snapshot"]["id"]
                    if snapshot_id in seen:
                        raise DataError(f"Duplicate snapshot id {snapshot_id!r}")
                    seen.add(snapshot_id)
                    writer.write(page)
        return {PAGES: writer.count}

    def _run_filter(self) -> Dict[str, int]:
        config = self.config
        patterns = ErrorPagePatterns.load(config.error_patterns)
        report = FilterReport()
        with RecordWriter(self.output(FILTERED_PAGES), "page") as writer:
            for snapshot, elements in tqdm(read_pages(self.output(PAGES)), desc="Filtering", unit="page"):
                kept = _accept_page(snapshot, elements, config.filter, patterns, report)
                if kept is not None:
                    writer.write(page_record(snapshot, kept, False))
        report.log_summary()
        write_json(self.output(FILTER_REPORT), report.to_dict())
        return {FILTERED_PAGES: writer.count, FILTER_REPORT: 1}

    def _run_segment(self) -> Dict[str, int]:
        config = self.config
        records: List[GroundingRecord] = []
        elements_by_page: Dict[str, List[Element]] = {}
        for snapshot, elements in tqdm(read_pages(self.output(FILTERED_PAGES)), desc="Segmenting", unit="page"):
            windows = plan_windows(snapshot.page_size, window_size_for(snapshot, config.window_size))
            records.extend(emit_reg_records(snapshot, elements, windows, config.min_visible_fraction))
            elements_by_page[snapshot.id] = elements
        findings = lint_annotations(records, elements_by_page)
        if findings:
            logger.warning("Linter flagged %d of %d grounding records", len(findings), len(records))
        return {
            GROUNDING_REG: write_records(self.output(GROUNDING_REG), "grounding", records),
            LINT_FINDINGS: write_records(self.output(LINT_FINDINGS), "lint", findings),
        }

    def _run_explore(self) -> Dict[str, int]:
        config = self.config
        results = Parallel(n_jobs=config.workers)(
            delayed(_explore_environment)(path, config.policy, config.task_instruction, config.filter,
                                          config.window_size, config.min_visible_fraction,
                                          config.interactable_roles, config.error_patterns)
            for path in tqdm(config.environments, desc="Exploring", unit="env"))
        env_ids = [result["env_id"] for result in results]
        if len(set(env_ids)) != len(env_ids):
            raise DataError(f"Duplicate environment ids in {env_ids}")
        report = FilterReport()
        for result in results:
            report = report.merge(result["report"])
        report.log_summary()
        return {
            TRAJECTORIES: write_records(self.output(TRAJECTORIES), "trajectory",
                                        (item for result in results for item in result["trajectories"])),
            AGENT_STEPS: write_records(self.output(AGENT_STEPS), "agent_step",
                                       (item for result in results for item in result["steps"])),
            EXPLORED_PAGES: write_records(self.output(EXPLORED_PAGES), "page",
                                          (item for result in results for item in result["pages"])),
            EXPLORED_REG: write_records(self.output(EXPLORED_REG), "grounding",
                                        (item for result in results for item in result["records"])),
        }

    def _environments(self) -> Dict[str, GuiEnvironment]:
        environments = {}
        for path in self.config.environments:
            env = load_environment(path)
            environments[env.id] = env
        return environments

    def _run_annotate(self) -> Dict[str, int]:
        config = self.config
        environments = self._environments()
        tasks = []
        for record in read_records(self.output(TRAJECTORIES), "trajectory"):
            trajectory = Trajectory.from_dict(record)
            if trajectory.environment not in environments:
                raise DataError(f"Trajectory of unknown environment {trajectory.environment!r}")
            tasks.extend(build_tasks(environments[trajectory.environment], trajectory,
                                     config.task_instruction, config.filter, config.window_size))
        client = make_client(config.client, config.base_dir)
        responses = annotate_many([task.request for task in tasks], client, config.annotator)
        records = [record for record in (ig_record(task, response, config.min_visible_fraction)
                                         for task, response in zip(tasks, responses)) if record is not None]
        elements_by_page = {snapshot.id: extract_elements(snapshot, config.interactable_roles)
                            for env in environments.values() for snapshot in env.states.values()}
        findings = lint_annotations(records, elements_by_page)
        if findings:
            logger.warning("Linter flagged %d of %d IG records", len(findings), len(records))
        return {
            GROUNDING_IG: write_records(self.output(GROUNDING_IG), "grounding", records),
            IG_LINT_FINDINGS: write_records(self.output(IG_LINT_FINDINGS), "lint", findings),
        }

    def _registry(self) -> AliasRegistry:
        adapters = load_adapters(self.config.adapter_files)
        names = set(CustomActionManifest.default().names())
        for adapter in adapters.values():
            names.update(adapter.manifest.names())
        paths = [ConfigLoader.data_path("aliases", "finetune.json"),
                 ConfigLoader.data_path("aliases", "benchmarks.json")] + self.config.alias_files
        return AliasRegistry.load(*paths, canonical_names=sorted(names))

    def _run_unify(self) -> Dict[str, int]:
        config = self.config
        unifier = Unifier(self._registry(), load_adapters(config.adapter_files), config.dialect)
        with RecordWriter(self.output(UNIFIED_STEPS), "agent_step") as writer:
            for path in config.source_steps:
                for record in tqdm(read_records(path, "source_step"), desc=f"Unifying {os.path.basename(path)}",
                                   unit="step"):
                    writer.write(unifier.unify(SourceStep.from_dict(record)))
        unified = writer.count

        reg = [GroundingRecord.from_dict(record)
               for path in self._existing(GROUNDING_REG, EXPLORED_REG)
               for record in read_records(path, "grounding")]
        ig = [GroundingRecord.from_dict(record)
              for path in self._existing(GROUNDING_IG) for record in read_records(path, "grounding")]
        templates = InstructionTemplates.load(config.templates)
        base_seed = derive_seed(config.seed, "variants")
        variants = [variantize_reg(record, base_seed + index, templates, config.dialect)
                    for index, record in enumerate(reg)]
        packs = pack_conversations(variants + ig, config.pack_size, config.prompt_pool, config.seed)
        return {
            UNIFIED_STEPS: unified,
            VARIANTS: write_records(self.output(VARIANTS), "variant", variants),
            CONVERSATIONS: write_records(self.output(CONVERSATIONS), "conversation", packs),
        }

    def _run_evaluate(self) -> Dict[str, int]:
        config = self.config
        if config.predictions:
            steps = [AgentStep.from_dict(record) for record in read_records(config.predictions, "agent_step")]
            predictor = "file"
        else:
            steps = [AgentStep.from_dict(record)
                     for path in self._existing(UNIFIED_STEPS, AGENT_STEPS)
                     for record in read_records(path, "agent_step")]
            steps = make_predictor(config.predictor, derive_seed(config.seed, "predictor")).fill(steps)
            predictor = config.predictor
        report = evaluate_datasets(steps, config.click_threshold, config.text_f1_threshold)
        document = dict(report.to_dict(), predictor=predictor, steps=len(steps))
        write_json(self.output(METRIC_REPORT), document)
        with open(self.output(METRIC_SUMMARY), "w", encoding="utf-8", newline="\n") as summary_file:
            summary_file.write(report.to_tsv())
        logger.info("Metric summary:\n%s", report.summary().to_string(index=False))
        return {METRIC_REPORT: len(steps), METRIC_SUMMARY: len(report.datasets)}
