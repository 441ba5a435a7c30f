"""
Action Registry Module

This module provides the two lookup tables behind the unified action space:

- CustomActionManifest declares which custom actions a dataset may use and
  which argument slots each one carries.
- AliasRegistry maps a (dataset, raw action name) pair to its canonical name
  and the rule that moves the raw arguments into unified slots. It resolves
  cross-dataset naming conflicts such as "tap" versus "click".

Both are read-only once loaded and safe to share between threads.

Classes:
- AliasEntry: Canonical name and argument rule of one raw action name.
- AliasRegistry: (dataset, raw name) to AliasEntry mapping.
- CustomActionManifest: Custom action names and their argument slots.
"""
import json
import os
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple

from guicorpus.action_lang.actions import BASIC_ACTIONS, IDENTIFIER, SLOTS, UnifiedAction
from guicorpus.config_loader import ConfigLoader
from guicorpus.exceptions import ConfigError, DataError, UnmappedActionError

ARGUMENT_RULES: Mapping[str, Tuple[str, ...]] = MappingProxyType({
    "point": ("point",),
    "box": ("box",),
    "text": ("text",),
    "direction": ("direction",),
    "direction_inverted": ("direction",),
    "none": (),
})


def read_json(path: str) -> dict:
    if not os.path.exists(path):
        raise ConfigError(f"File not found: {path}")
    with open(path, "r", encoding="utf-8") as json_file:
        try:
            return json.load(json_file)
        except json.JSONDecodeError as error:
            raise ConfigError(f"{path}: invalid JSON ({error})") from error


class CustomActionManifest:
    """
    Declares the custom actions of a dataset and their argument slots.
    """

    def __init__(self, actions: Optional[Mapping[str, Iterable[str]]] = None):
        declared: Dict[str, Tuple[str, ...]] = {}
        for name, slots in (actions or {}).items():
            if not IDENTIFIER.match(name) or name in BASIC_ACTIONS:
                raise ConfigError(f"Invalid custom action name {name!r}")
            slots = tuple(slots)
            unknown = [slot for slot in slots if slot not in SLOTS]
            if unknown:
                raise ConfigError(f"Custom action {name}: unknown slots {unknown}")
            declared[name] = tuple(slot for slot in SLOTS if slot in slots)
        self._actions = MappingProxyType(declared)

    @classmethod
    def from_dict(cls, data: dict) -> "CustomActionManifest":
        entries = data.get("custom_actions", [])
        return cls({entry["name"]: entry.get("slots", []) for entry in entries})

    @classmethod
    def load(cls, path: str) -> "CustomActionManifest":
        return cls.from_dict(read_json(path))

    @classmethod
    def default(cls) -> "CustomActionManifest":
        """
        Returns the manifest of the canonical custom actions shipped with guicorpus.
        """
        return cls.load(ConfigLoader.data_path("manifests", "default.json"))

    def merge(self, other: "CustomActionManifest") -> "CustomActionManifest":
        combined = dict(self._actions)
        for name, slots in other.items():
            if name in combined and combined[name] != slots:
                raise ConfigError(f"Custom action {name} declared with conflicting slots")
            combined[name] = slots
        return CustomActionManifest(combined)

    def items(self):
        return self._actions.items()

    def names(self) -> List[str]:
        return sorted(self._actions)

    def __contains__(self, name: str) -> bool:
        return name in self._actions

    def __len__(self) -> int:
        return len(self._actions)

    def slots_for(self, name: str) -> Tuple[str, ...]:
        if name not in self._actions:
            raise UnmappedActionError(name)
        return self._actions[name]

    def validate(self, action: UnifiedAction) -> UnifiedAction:
        """
        Checks a custom action against its declaration.

        :param action: The action to check; basic actions pass unchanged.
        :return: The action.
        :raises UnmappedActionError: If the custom name is not declared.
        :raises DataError: If the populated slots differ from the declared ones.
        """
        if not action.is_custom:
            return action
        expected = self.slots_for(action.name)
        if action.slots() != expected:
            raise DataError(f"{action.name} declares slots {expected}, got {action.slots()}")
        return action


@dataclass(frozen=True)
class AliasEntry:
    canonical: str
    rule: str

    @property
    def slots(self) -> Tuple[str, ...]:
        return ARGUMENT_RULES[self.rule]


class AliasRegistry:
    """
    Maps (dataset tag, raw action name) to a canonical action name.

    Raw names are matched case-insensitively. A name that already is a
    canonical action name maps to itself for every dataset.
    """

    def __init__(self, entries: Optional[Mapping[Tuple[str, str], AliasEntry]] = None,
                 canonical_names: Iterable[str] = ()):
        entries = dict(entries or {})
        names: Set[str] = set(BASIC_ACTIONS) | set(canonical_names)
        for (dataset, raw), entry in entries.items():
            if entry.rule not in ARGUMENT_RULES:
                raise ConfigError(f"Alias {dataset}/{raw}: unknown argument rule {entry.rule!r}")
            if not IDENTIFIER.match(entry.canonical):
                raise ConfigError(f"Alias {dataset}/{raw}: {entry.canonical!r} is not a canonical identifier")
            names.add(entry.canonical)
        self._entries = MappingProxyType(entries)
        self._canonical = frozenset(names)

    @classmethod
    def from_dicts(cls, documents: Iterable[dict], canonical_names: Iterable[str] = ()) -> "AliasRegistry":
        entries: Dict[Tuple[str, str], AliasEntry] = {}
        for document in documents:
            for item in document.get("entries", []):
                key = (item["dataset"], item["raw"].lower())
                entry = AliasEntry(item["canonical"], item.get("args", "none"))
                if key in entries and entries[key] != entry:
                    raise ConfigError(f"Conflicting aliases for {key[0]}/{key[1]}")
                entries[key] = entry
        return cls(entries, canonical_names)

    @classmethod
    def load(cls, *paths: str, canonical_names: Iterable[str] = ()) -> "AliasRegistry":
        """
        Loads and merges alias registry files.

        :param paths: Registry JSON files.
        :param canonical_names: Extra canonical names (e.g. from custom-action manifests).
        :return: The merged registry.
        """
        return cls.from_dicts([read_json(path) for path in paths], canonical_names)

    @classmethod
    def default(cls) -> "AliasRegistry":
        manifest = CustomActionManifest.default()
        return cls.load(ConfigLoader.data_path("aliases", "finetune.json"),
                        ConfigLoader.data_path("aliases", "benchmarks.json"),
                        canonical_names=manifest.names())

    @property
    def canonical_names(self) -> frozenset:
        return self._canonical

    @property
    def datasets(self) -> List[str]:
        return sorted({dataset for dataset, _ in self._entries})

    def raw_names(self, dataset: Optional[str] = None) -> List[str]:
        return sorted({raw for ds, raw in self._entries if dataset is None or ds == dataset})

    def entries(self, dataset: Optional[str] = None) -> List[Tuple[str, str, AliasEntry]]:
        return sorted((ds, raw, entry) for (ds, raw), entry in self._entries.items()
                      if dataset is None or ds == dataset)

    def lookup(self, raw_name: str, source: str) -> Optional[AliasEntry]:
        return self._entries.get((source, raw_name.lower()))

    def canonicalize(self, raw_name: str, source: str) -> str:
        """
        Resolves a raw action name to its canonical name.

        :param raw_name: Action name as it appears in the source dataset.
        :param source: Dataset tag.
        :return: The canonical action name.
        :raises UnmappedActionError: If the name has no alias and is not canonical.
        """
        if raw_name in self._canonical:
            return raw_name
        entry = self.lookup(raw_name, source)
        if entry is None:
            raise UnmappedActionError(raw_name, source)
        return entry.canonical
