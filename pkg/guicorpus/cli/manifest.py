"""
Run Manifest Module

The run manifest records, per stage, the digests of its inputs, the config
digest and the digest and record count of every output. A stage whose entry
still matches the files on disk is up to date and is skipped.

Classes:
- StageEntry: Manifest entry of one stage.
- RunManifest: The manifest file of an output directory.
"""
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable

from guicorpus.exceptions import DataError
from guicorpus.records import file_digest

logger = logging.getLogger(__name__)

MANIFEST_NAME = "run_manifest.json"
MANIFEST_VERSION = 1


def digest_files(paths: Iterable[str], base_dir: str) -> Dict[str, str]:
    """
    Digests input files, keyed by their path relative to base_dir.
    """
    return {os.path.relpath(path, base_dir).replace(os.sep, "/"): file_digest(path) for path in paths}


@dataclass
class StageEntry:
    inputs: Dict[str, str]
    config_digest: str
    outputs: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "inputs": dict(sorted(self.inputs.items())),
            "config_digest": self.config_digest,
            "outputs": {name: self.outputs[name] for name in sorted(self.outputs)},
        }


class RunManifest:
    """
    Reads and writes run_manifest.json in an output directory.
    """

    def __init__(self, output_dir: str):
        self.path = os.path.join(output_dir, MANIFEST_NAME)
        self.output_dir = output_dir
        self.stages: Dict[str, Dict[str, Any]] = {}
        self.config_digest = ""
        if os.path.exists(self.path):
            with open(self.path, "r", encoding="utf-8") as manifest_file:
                try:
                    document = json.load(manifest_file)
                except json.JSONDecodeError as error:
                    raise DataError(f"{self.path}: invalid JSON ({error})") from error
            if document.get("version") == MANIFEST_VERSION:
                self.stages = document.get("stages", {})
                self.config_digest = document.get("config_digest", "")
            else:
                logger.warning("Ignoring run manifest of version %r", document.get("version"))

    def is_current(self, stage: str, entry: StageEntry) -> bool:
        """
        Checks whether a stage's recorded run matches its current inputs and outputs.
        """
        recorded = self.stages.get(stage)
        if recorded is None:
            return False
        if recorded.get("inputs") != entry.inputs or recorded.get("config_digest") != entry.config_digest:
            return False
        for name, output in recorded.get("outputs", {}).items():
            path = os.path.join(self.output_dir, name)
            if not os.path.exists(path) or file_digest(path) != output.get("digest"):
                return False
        return True

    def counts(self, stage: str) -> Dict[str, int]:
        outputs = self.stages.get(stage, {}).get("outputs", {})
        return {name: output.get("records", 0) for name, output in outputs.items()}

    def record(self, stage: str, entry: StageEntry, counts: Dict[str, int]) -> None:
        for name, count in counts.items():
            path = os.path.join(self.output_dir, name)
            entry.outputs[name] = {"digest": file_digest(path), "records": count}
        self.stages[stage] = entry.to_dict()

    def save(self, config_digest: str) -> None:
        self.config_digest = config_digest
        document = {
            "version": MANIFEST_VERSION,
            "config_digest": config_digest,
            "stages": {name: self.stages[name] for name in sorted(self.stages)},
        }
        os.makedirs(self.output_dir, exist_ok=True)
        with open(self.path, "w", encoding="utf-8", newline="\n") as manifest_file:
            json.dump(document, manifest_file, indent=2, sort_keys=True)
            manifest_file.write("\n")
