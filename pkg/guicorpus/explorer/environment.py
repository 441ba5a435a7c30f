"""
GUI Environment Module

This module loads declarative GUI environments: a set of screen states, each
one a snapshot, and a transition table saying which state an action on an
element leads to. Environments stand in for live desktop and mobile harnesses;
explorers only see the GuiEnvironment contract.

Fixture file layout::

    {"schema": "environment", "version": 1, "id": "settings_app",
     "initial": "home",
     "states": {"home": {...snapshot...}, "wifi": {"file": "wifi.json"}},
     "transitions": [{"from": "home", "node_path": [0, 2], "action": "CLICK", "to": "wifi"},
                     {"from": "wifi", "node_path": [0, 1], "action": "TYPE", "text": "guest", "to": "wifi"}]}

Classes:
- Transition: One outgoing edge of a state.
- GuiEnvironment: States, transitions and the initial state.

Functions:
- load_environment: Reads and validates a fixture file.
"""
import json
import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Tuple

from guicorpus.action_lang.actions import BASIC_SLOTS, Direction, UnifiedAction
from guicorpus.action_lang.coordinates import normalize_box, normalize_point
from guicorpus.action_lang.registry import CustomActionManifest
from guicorpus.exceptions import ConfigError, DataError, SnapshotSchemaError
from guicorpus.records import SCHEMA_VERSION
from guicorpus.snapshot_ingest.snapshot import NodePath, PageSnapshot, load_snapshot

logger = logging.getLogger(__name__)

ENVIRONMENT_SCHEMA = "environment"


@dataclass(frozen=True)
class Transition:
    source: str
    node_path: NodePath
    action: str
    target: str
    text: Optional[str] = None
    direction: Optional[Direction] = None

    @property
    def key(self) -> Tuple[str, NodePath, str]:
        return self.source, self.node_path, self.action

    @property
    def order(self) -> Tuple[NodePath, str]:
        return self.node_path, self.action


class GuiEnvironment:
    """
    A finite GUI state graph.

    Outgoing transitions of a state are kept sorted by (node path, action
    name), which is document order of the acted elements.
    """

    def __init__(self, env_id: str, states: Mapping[str, PageSnapshot], transitions: List[Transition],
                 initial: str, manifest: Optional[CustomActionManifest] = None):
        self.id = env_id
        self.states = dict(states)
        self.initial = initial
        self.manifest = manifest if manifest is not None else CustomActionManifest.default()
        self._outgoing: Dict[str, List[Transition]] = {state: [] for state in self.states}
        self._transitions: Dict[Tuple[str, NodePath, str], Transition] = {}
        for transition in transitions:
            self._add(transition)
        for outgoing in self._outgoing.values():
            outgoing.sort(key=lambda item: item.order)

    def _add(self, transition: Transition) -> None:
        if transition.source not in self.states or transition.target not in self.states:
            raise DataError(f"{self.id}: transition {transition.source!r} -> {transition.target!r} "
                            f"references an unknown state")
        if transition.key in self._transitions:
            raise DataError(f"{self.id}: duplicate transition {transition.key}")
        if self.states[transition.source].root.find(transition.node_path) is None:
            raise DataError(f"{self.id}: state {transition.source!r} has no node at {list(transition.node_path)}")
        self.action_for(transition)
        self._transitions[transition.key] = transition
        self._outgoing[transition.source].append(transition)

    def validate(self) -> None:
        if self.initial not in self.states:
            raise DataError(f"{self.id}: initial state {self.initial!r} is not a state")

    def outgoing(self, state: str) -> List[Transition]:
        return self._outgoing[state]

    def transition(self, state: str, node_path: NodePath, action: str) -> Optional[Transition]:
        return self._transitions.get((state, tuple(node_path), action))

    def __len__(self) -> int:
        return len(self.states)

    def action_for(self, transition: Transition) -> UnifiedAction:
        """
        Builds the unified action a transition performs.

        Point and box slots come from the acted node's bbox, normalized to
        the state's page; text and direction slots come from the transition.

        :param transition: The transition.
        :return: The action.
        """
        if transition.action in BASIC_SLOTS:
            slots = BASIC_SLOTS[transition.action]
        else:
            slots = self.manifest.slots_for(transition.action)
        snapshot = self.states[transition.source]
        node = snapshot.root.find(transition.node_path)
        values: Dict[str, Any] = {}
        if "point" in slots:
            values["point"] = normalize_point(node.bbox.center(), snapshot.page_size)
        if "box" in slots:
            values["box"] = normalize_box(node.bbox, snapshot.page_size)
        if "text" in slots:
            if not transition.text:
                raise DataError(f"{self.id}: {transition.action} transition needs text")
            values["text"] = transition.text
        if "direction" in slots:
            if transition.direction is None:
                raise DataError(f"{self.id}: {transition.action} transition needs a direction")
            values["direction"] = transition.direction
        return UnifiedAction(transition.action, **values)


def _transition(item: Dict[str, Any]) -> Transition:
    try:
        direction = item.get("direction")
        return Transition(
            source=item["from"],
            node_path=tuple(int(index) for index in item["node_path"]),
            action=item["action"],
            target=item["to"],
            text=item.get("text"),
            direction=Direction(direction.upper()) if direction else None,
        )
    except (KeyError, ValueError, TypeError, AttributeError) as error:
        raise DataError(f"Malformed transition {item!r} ({error})") from error


def _state(document: Any, base_dir: str) -> PageSnapshot:
    if isinstance(document, dict) and "file" in document and "root" not in document:
        path = os.path.join(base_dir, document["file"])
        if not os.path.exists(path):
            raise ConfigError(f"State file not found: {path}")
        with open(path, "rb") as state_file:
            return load_snapshot(state_file.read())
    return load_snapshot(document)


def environment_from_dict(document: Dict[str, Any], base_dir: str = ".",
                          manifest: Optional[CustomActionManifest] = None) -> GuiEnvironment:
    if document.get("schema") != ENVIRONMENT_SCHEMA or document.get("version") != SCHEMA_VERSION:
        raise DataError(f"Not an environment document (schema {document.get('schema')!r}, "
                        f"version {document.get('version')!r})")
    env_id = document.get("id") or "environment"
    states = {}
    for state_id, state in sorted(document.get("states", {}).items()):
        try:
            states[state_id] = _state(state, base_dir)
        except SnapshotSchemaError:
            logger.error("Invalid state %s/%s", env_id, state_id)
            raise
    transitions = [_transition(item) for item in document.get("transitions", [])]
    environment = GuiEnvironment(env_id, states, transitions, document.get("initial"), manifest)
    environment.validate()
    logger.debug("Loaded environment %s: %d states, %d transitions", env_id, len(states), len(transitions))
    return environment


def load_environment(path: str, manifest: Optional[CustomActionManifest] = None) -> GuiEnvironment:
    """
    Loads an environment fixture file.

    :param path: Path of the fixture file; state file references resolve relative to it.
    :param manifest: Custom actions the transitions may use; the bundled manifest by default.
    :return: The validated environment.
    """
    if not os.path.exists(path):
        raise ConfigError(f"Environment file not found: {path}")
    with open(path, "r", encoding="utf-8") as env_file:
        try:
            document = json.load(env_file)
        except json.JSONDecodeError as error:
            raise DataError(f"{path}: invalid JSON ({error})") from error
    return environment_from_dict(document, os.path.dirname(os.path.abspath(path)), manifest)
