"""
Dataset Adapters Module

This module converts steps of heterogeneous agent datasets into the unified
action space. Each dataset is described by a declarative adapter file instead
of code: which raw-argument fields hold the coordinates, text and direction,
which fields give the screen size, and which custom actions the dataset uses.
Raw action names resolve through the AliasRegistry.

Adapter file layout::

    {"schema": "adapter", "version": 1, "dataset": "amex", "family": "mobile",
     "screen": {"width": "screen_width", "height": "screen_height"},
     "slots": {"x": "touch_x", "y": "touch_y", "x2": "x2", "y2": "y2",
               "text": "text", "direction": "swipe_direction"},
     "custom_actions": [{"name": "LONG_PRESS", "slots": ["point"]}, ...]}

Classes:
- Adapter: The field mapping of one dataset.
- Unifier: Registry plus adapters; unifies steps.

Functions:
- load_adapters: Bundled adapters, optionally extended by extra files.
- unify_step: Unifies one source step.
"""
import glob
import logging
import os
from functools import lru_cache
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from guicorpus.action_lang.actions import BASIC_ACTIONS, BASIC_SLOTS, Dialect, Direction, UnifiedAction
from guicorpus.action_lang.coordinates import (
    PixelBox, denormalize_box, denormalize_point, normalize_box, normalize_point,
)
from guicorpus.action_lang.grammar import parse_action, serialize_action
from guicorpus.action_lang.registry import AliasEntry, AliasRegistry, CustomActionManifest, read_json
from guicorpus.config_loader import ConfigLoader
from guicorpus.exceptions import (
    ConfigError, CoordinateRangeError, DataError, MissingArgumentError, UnmappedActionError,
)
from guicorpus.records import SCHEMA_VERSION
from guicorpus.unifier.steps import AgentStep, RawAction, SourceStep

logger = logging.getLogger(__name__)

FAMILIES = ("mobile", "web", "desktop")
SLOT_FIELDS = ("x", "y", "x2", "y2", "text", "direction")
_RULE_FOR_SLOTS = {(): "none", ("point",): "point", ("box",): "box", ("text",): "text",
                   ("direction",): "direction"}


def _number(value: str, field: str) -> Fraction:
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError):
        raise DataError(f"Field {field!r} is not a number: {value!r}") from None


class Adapter:
    """
    Maps the raw steps of one dataset into unified actions and back.
    """

    def __init__(self, dataset: str, family: str, screen_fields: Tuple[str, str],
                 slot_fields: Mapping[str, str], manifest: CustomActionManifest):
        if family not in FAMILIES:
            raise ConfigError(f"Adapter {dataset}: unknown family {family!r}")
        missing = [name for name in SLOT_FIELDS if name not in slot_fields]
        if missing:
            raise ConfigError(f"Adapter {dataset}: slot fields {missing} are not mapped")
        self.dataset = dataset
        self.family = family
        self.screen_fields = screen_fields
        self.slot_fields = dict(slot_fields)
        self.manifest = manifest

    @classmethod
    def from_dict(cls, document: dict) -> "Adapter":
        if document.get("schema") != "adapter" or document.get("version") != SCHEMA_VERSION:
            raise ConfigError(f"Not an adapter document: {document.get('schema')!r}")
        try:
            screen = document["screen"]
            return cls(document["dataset"], document["family"], (screen["width"], screen["height"]),
                       document["slots"], CustomActionManifest.from_dict(document))
        except KeyError as error:
            raise ConfigError(f"Adapter document is missing {error}") from error

    @classmethod
    def load(cls, path: str) -> "Adapter":
        return cls.from_dict(read_json(path))

    def action_space(self) -> List[str]:
        """
        Returns the basic actions followed by the dataset's custom actions.
        """
        return list(BASIC_ACTIONS) + self.manifest.names()

    def check_registry(self, registry: AliasRegistry) -> None:
        for _, raw, entry in registry.entries(self.dataset):
            if entry.canonical not in BASIC_ACTIONS and entry.canonical not in self.manifest:
                raise ConfigError(f"Adapter {self.dataset}: alias {raw!r} maps to undeclared "
                                  f"custom action {entry.canonical}")

    def _entry(self, raw_name: str, registry: AliasRegistry) -> AliasEntry:
        entry = registry.lookup(raw_name, self.dataset)
        if entry is not None:
            return entry
        if raw_name in BASIC_SLOTS:
            return AliasEntry(raw_name, _RULE_FOR_SLOTS[BASIC_SLOTS[raw_name]])
        if raw_name in self.manifest:
            slots = self.manifest.slots_for(raw_name)
            if slots not in _RULE_FOR_SLOTS:
                raise DataError(f"{raw_name} has no single-slot argument rule")
            return AliasEntry(raw_name, _RULE_FOR_SLOTS[slots])
        raise UnmappedActionError(raw_name, self.dataset)

    def _arg(self, args: Mapping[str, str], slot: str, action: str) -> str:
        field = self.slot_fields[slot]
        value = args.get(field)
        if value is None or str(value).strip() == "":
            raise MissingArgumentError(f"{self.dataset}/{action}: missing argument {field!r}")
        return str(value)

    def _pixel(self, args: Mapping[str, str], slot: str, action: str, extent: int) -> Fraction:
        value = _number(self._arg(args, slot, action), self.slot_fields[slot])
        if not 0 <= value <= extent:
            raise CoordinateRangeError(f"{self.dataset}/{action}: {self.slot_fields[slot]}={float(value):g} "
                                       f"outside the {extent}px screen")
        return value

    def screen(self, args: Mapping[str, str]) -> Tuple[int, int]:
        sizes = []
        for field in self.screen_fields:
            if field not in args:
                raise MissingArgumentError(f"{self.dataset}: missing screen field {field!r}")
            value = _number(args[field], field)
            if value <= 0 or value.denominator != 1:
                raise DataError(f"{self.dataset}: screen field {field!r} must be a positive integer")
            sizes.append(int(value))
        return sizes[0], sizes[1]

    def unify_action(self, raw: RawAction, screen: Tuple[int, int], registry: AliasRegistry) -> UnifiedAction:
        """
        Unifies one raw action.

        :param raw: Raw name and string arguments.
        :param screen: Source screen size in pixels.
        :param registry: Alias registry.
        :return: The canonical action with per-mille coordinates.
        :raises UnmappedActionError: If the raw name has no mapping for this dataset.
        :raises MissingArgumentError: If the rule needs an argument the step lacks.
        :raises CoordinateRangeError: If a coordinate lies outside the source screen.
        """
        entry = self._entry(raw.name, registry)
        width, height = screen
        values = {}
        if entry.rule == "point":
            values["point"] = normalize_point((self._pixel(raw.args, "x", raw.name, width),
                                               self._pixel(raw.args, "y", raw.name, height)), screen)
        elif entry.rule == "box":
            xs = sorted((self._pixel(raw.args, "x", raw.name, width), self._pixel(raw.args, "x2", raw.name, width)))
            ys = sorted((self._pixel(raw.args, "y", raw.name, height), self._pixel(raw.args, "y2", raw.name, height)))
            values["box"] = normalize_box(PixelBox(xs[0], ys[0], xs[1], ys[1]), screen)
        elif entry.rule == "text":
            values["text"] = self._arg(raw.args, "text", raw.name)
        elif entry.rule in ("direction", "direction_inverted"):
            content = self._arg(raw.args, "direction", raw.name).strip().upper()
            try:
                direction = Direction(content)
            except ValueError:
                raise DataError(f"{self.dataset}/{raw.name}: unknown direction {content!r}") from None
            values["direction"] = direction.inverse if entry.rule == "direction_inverted" else direction
        return self.manifest.validate(UnifiedAction(entry.canonical, **values))

    def unify(self, step: SourceStep, registry: AliasRegistry, dialect: Dialect = Dialect.TAGGED) -> AgentStep:
        screen = self.screen(step.raw_args)
        action = self.unify_action(RawAction(step.raw_action_name, step.raw_args), screen, registry)
        history = tuple(serialize_action(self.unify_action(raw, screen, registry), dialect)
                        for raw in step.history)
        return AgentStep(
            task=step.task,
            history=history,
            screenshot_ref=step.screenshot_ref,
            gt_action=action,
            screen=screen,
            dataset=self.dataset,
            split=step.split,
            thought=step.thought,
        )

    def _raw_name(self, canonical: str, registry: AliasRegistry) -> Tuple[str, str]:
        candidates = [(entry.rule == "direction_inverted", raw, entry.rule)
                      for _, raw, entry in registry.entries(self.dataset) if entry.canonical == canonical]
        if candidates:
            _, raw, rule = min(candidates)
            return raw, rule
        return canonical, "identity"

    def to_raw(self, action: UnifiedAction, screen: Tuple[int, int], registry: AliasRegistry) -> RawAction:
        """
        Writes a unified action back in this dataset's raw form.
        """
        raw_name, rule = self._raw_name(action.name, registry)
        fields = self.slot_fields
        args: Dict[str, str] = {}
        if action.point is not None:
            x, y = denormalize_point(action.point, screen)
            args.update({fields["x"]: str(x), fields["y"]: str(y)})
        if action.box is not None:
            pixels = denormalize_box(action.box, screen)
            args.update({fields["x"]: str(pixels.x1), fields["y"]: str(pixels.y1),
                         fields["x2"]: str(pixels.x2), fields["y2"]: str(pixels.y2)})
        if action.text is not None:
            args[fields["text"]] = action.text
        if action.direction is not None:
            direction = action.direction.inverse if rule == "direction_inverted" else action.direction
            args[fields["direction"]] = direction.value.lower()
        return RawAction(raw_name, args)

    def to_source(self, step: AgentStep, registry: AliasRegistry, dialect: Dialect = Dialect.TAGGED) -> SourceStep:
        """
        Inverse of unify: rebuilds a source step of this dataset from a unified step.
        """
        raw = self.to_raw(step.gt_action, step.screen, registry)
        args = dict(raw.args)
        args[self.screen_fields[0]] = str(step.screen[0])
        args[self.screen_fields[1]] = str(step.screen[1])
        history = tuple(self.to_raw(parse_action(item, dialect, self.manifest), step.screen, registry)
                        for item in step.history)
        return SourceStep(
            dataset=self.dataset,
            task=step.task,
            raw_action_name=raw.name,
            raw_args=args,
            screenshot_ref=step.screenshot_ref,
            history=history,
            split=step.split,
            thought=step.thought,
        )


def load_adapters(paths: Iterable[str] = (), include_bundled: bool = True) -> Dict[str, Adapter]:
    """
    Loads adapters keyed by dataset tag; later files replace earlier ones.

    :param paths: Extra adapter files.
    :param include_bundled: Whether to start from the bundled adapters.
    :return: Adapters by dataset.
    """
    files: List[str] = []
    if include_bundled:
        files.extend(sorted(glob.glob(os.path.join(ConfigLoader.data_path("adapters"), "*.json"))))
    files.extend(paths)
    adapters = {}
    for path in files:
        adapter = Adapter.load(path)
        adapters[adapter.dataset] = adapter
    return adapters


class Unifier:
    """
    Unifies source steps of every registered dataset.
    """

    def __init__(self, registry: Optional[AliasRegistry] = None, adapters: Optional[Mapping[str, Adapter]] = None,
                 dialect: Dialect = Dialect.TAGGED):
        self.registry = registry if registry is not None else AliasRegistry.default()
        self.adapters = dict(adapters) if adapters is not None else load_adapters()
        self.dialect = Dialect(dialect)
        for adapter in self.adapters.values():
            adapter.check_registry(self.registry)

    def adapter(self, dataset: str) -> Adapter:
        if dataset not in self.adapters:
            raise DataError(f"No adapter registered for dataset {dataset!r}")
        return self.adapters[dataset]

    def unify(self, step: SourceStep) -> AgentStep:
        return self.adapter(step.dataset).unify(step, self.registry, self.dialect)


def unify_step(step: SourceStep, registry: AliasRegistry, adapters: Optional[Mapping[str, Adapter]] = None,
               dialect: Dialect = Dialect.TAGGED) -> AgentStep:
    """
    Unifies one source step.

    :param step: The source step.
    :param registry: Alias registry.
    :param adapters: Adapters by dataset; the bundled ones if omitted.
    :param dialect: Dialect of the serialized history.
    :return: The unified step; the history is unified recursively.
    """
    if adapters is None:
        adapters = _bundled_adapters()
    if step.dataset not in adapters:
        raise DataError(f"No adapter registered for dataset {step.dataset!r}")
    return adapters[step.dataset].unify(step, registry, dialect)


@lru_cache(maxsize=None)
def _bundled_adapters() -> Dict[str, Adapter]:
    return load_adapters()
