"""
Snapshot Module

This module provides the PageSnapshot and NodeTree types and the loader that
turns a serialized interface snapshot (a web DOM dump or a desktop/mobile
A11y-tree dump) into a validated snapshot.

A snapshot document is one self-describing JSON tree:

    {"id": "...", "platform": "web", "title": "...", "body_text": "...",
     "page_size": [w, h], "viewport": [w, h],
     "root": {"role": "...", "name": "...", "text": "...", "attributes": {...},
              "bbox": [x1, y1, x2, y2], "visible": true, "children": [...]}}

A node may carry "node_id"; a child written as {"ref": "<node_id>"} reuses
that node's definition. Node geometry is rounded half up to integer pixels
and clamped into the page, with a warning for every clamp.

Classes:
- NodeTree: One node of the interface tree.
- PageSnapshot: A validated page or screen snapshot.

Functions:
- load_snapshot: Validates a serialized snapshot.
- iter_snapshot_documents: Streams raw snapshot documents from a file.

Dependencies:
- lm_dataformat: Reads batched snapshot archives stored as .jsonl.zst.
- jsonlines: Reads line-delimited snapshot batches.
"""
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Set, Tuple, Union

import jsonlines
from lm_dataformat import Reader

from guicorpus.action_lang.coordinates import PixelBox, round_half_up
from guicorpus.exceptions import DataError, SnapshotSchemaError

logger = logging.getLogger(__name__)

PLATFORMS = ("web", "windows", "linux", "macos", "android")

NodePath = Tuple[int, ...]


@dataclass(frozen=True)
class NodeTree:
    """
    One node of an interface tree with its pixel geometry.
    """

    role: str
    bbox: PixelBox
    name: Optional[str] = None
    text: Optional[str] = None
    attributes: Dict[str, str] = field(default_factory=dict)
    visible: bool = True
    children: Tuple["NodeTree", ...] = ()

    def walk(self, path: NodePath = ()) -> Iterator[Tuple[NodePath, "NodeTree"]]:
        """
        Yields (path, node) pairs in depth-first document order.
        """
        stack = [(path, self)]
        while stack:
            node_path, node = stack.pop()
            yield node_path, node
            for index in range(len(node.children) - 1, -1, -1):
                stack.append((node_path + (index,), node.children[index]))

    def find(self, path: NodePath) -> Optional["NodeTree"]:
        node = self
        for index in path:
            if index >= len(node.children):
                return None
            node = node.children[index]
        return node

    def to_dict(self) -> Dict[str, Any]:
        return {
            "role": self.role,
            "name": self.name,
            "text": self.text,
            "attributes": dict(sorted(self.attributes.items())),
            "bbox": self.bbox.as_list(),
            "visible": self.visible,
            "children": [child.to_dict() for child in self.children],
        }


@dataclass(frozen=True)
class PageSnapshot:
    """
    A validated snapshot of one page or screen.

    Attributes:
    - id (str): Snapshot identifier; screenshot references derive from it.
    - platform (str): One of web, windows, linux, macos, android.
    - page_size (Tuple[int, int]): Full page width and height in pixels.
    - viewport (Tuple[int, int]): Visible viewport width and height in pixels.
    - root (NodeTree): The interface tree.
    - title (str): Page or window title.
    - body_text (str): Visible body text, used for error-page detection.
    - warnings (Tuple[str, ...]): Non-fatal issues found while loading.
    """

    id: str
    platform: str
    page_size: Tuple[int, int]
    viewport: Tuple[int, int]
    root: NodeTree
    title: str = ""
    body_text: str = ""
    warnings: Tuple[str, ...] = ()

    def node_count(self) -> int:
        return sum(1 for _ in self.root.walk())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "platform": self.platform,
            "title": self.title,
            "body_text": self.body_text,
            "page_size": list(self.page_size),
            "viewport": list(self.viewport),
            "root": self.root.to_dict(),
        }


def _size(document: dict, key: str) -> Tuple[int, int]:
    value = document.get(key)
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)):
        raise SnapshotSchemaError(f"'{key}' must be [width, height] integers")
    if value[0] < 1 or value[1] < 1:
        raise SnapshotSchemaError(f"'{key}' must be at least 1x1, got {value}")
    return value[0], value[1]


class _TreeBuilder:
    """
    Builds a NodeTree from a document, resolving refs and clamping geometry.
    """

    def __init__(self, page_size: Tuple[int, int], root_document: dict):
        self.page_size = page_size
        self.warnings: List[str] = []
        self.definitions: Dict[str, dict] = {}
        self._collect_definitions(root_document)

    def _collect_definitions(self, root_document: dict) -> None:
        stack = [root_document]
        seen: Set[int] = set()
        while stack:
            node = stack.pop()
            if not isinstance(node, dict) or id(node) in seen:
                continue
            seen.add(id(node))
            node_id = node.get("node_id")
            if isinstance(node_id, str):
                if node_id in self.definitions and self.definitions[node_id] is not node:
                    raise SnapshotSchemaError(f"duplicate node_id {node_id!r}")
                self.definitions[node_id] = node
            children = node.get("children", [])
            if isinstance(children, list):
                stack.extend(children)

    def _bbox(self, node: dict, path: NodePath) -> PixelBox:
        raw = node.get("bbox")
        if (not isinstance(raw, (list, tuple)) or len(raw) != 4
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw)):
            raise SnapshotSchemaError("'bbox' must be four numbers [x1, y1, x2, y2]", path)
        if raw[2] < raw[0] or raw[3] < raw[1]:
            raise SnapshotSchemaError(f"negative geometry in bbox {list(raw)}", path)
        box = PixelBox(*(round_half_up(v) for v in raw))
        clamped = box.clamp(*self.page_size)
        if clamped != box:
            message = (f"node /{'/'.join(str(i) for i in path)}: bbox {box.as_list()} "
                       f"clamped to {clamped.as_list()}")
            self.warnings.append(message)
            logger.warning(message)
        return clamped

    def build(self, node: Any, path: NodePath, ancestors: Tuple[int, ...], refs: Tuple[str, ...]) -> NodeTree:
        while isinstance(node, dict) and "ref" in node:
            ref = node["ref"]
            if ref in refs:
                raise SnapshotSchemaError(f"cyclic reference to node {ref!r}", path)
            if ref not in self.definitions:
                raise SnapshotSchemaError(f"unknown node reference {ref!r}", path)
            refs = refs + (ref,)
            node = self.definitions[ref]
        if not isinstance(node, dict):
            raise SnapshotSchemaError("node must be an object", path)
        if id(node) in ancestors:
            raise SnapshotSchemaError("cyclic reference: node is its own ancestor", path)
        node_id = node.get("node_id")
        if isinstance(node_id, str) and node_id not in refs:
            refs = refs + (node_id,)
        role = node.get("role")
        if not isinstance(role, str) or not role:
            raise SnapshotSchemaError("'role' must be a non-empty string", path)
        attributes = node.get("attributes", {})
        if not isinstance(attributes, dict):
            raise SnapshotSchemaError("'attributes' must be an object", path)
        visible = node.get("visible", True)
        if not isinstance(visible, bool):
            raise SnapshotSchemaError("'visible' must be a boolean", path)
        children = node.get("children", [])
        if not isinstance(children, list):
            raise SnapshotSchemaError("'children' must be a list", path)
        for key in ("name", "text"):
            if node.get(key) is not None and not isinstance(node[key], str):
                raise SnapshotSchemaError(f"'{key}' must be a string", path)
        inner = ancestors + (id(node),)
        return NodeTree(
            role=role,
            bbox=self._bbox(node, path),
            name=node.get("name"),
            text=node.get("text"),
            attributes={str(k): str(v) for k, v in attributes.items()},
            visible=visible,
            children=tuple(self.build(child, path + (index,), inner, refs)
                           for index, child in enumerate(children)),
        )


def load_snapshot(data: Union[bytes, str, dict]) -> PageSnapshot:
    """
    Parses and validates a serialized snapshot.

    :param data: Snapshot JSON as bytes or text, or an already decoded document.
    :return: The validated snapshot; clamped boxes are listed in its warnings.
    :raises SnapshotSchemaError: On schema violations, cyclic references or negative geometry.
    """
    if isinstance(data, (bytes, str)):
        try:
            document = json.loads(data)
        except (json.JSONDecodeError, UnicodeDecodeError) as error:
            raise SnapshotSchemaError(f"snapshot is not valid JSON ({error})") from error
    else:
        document = data
    if not isinstance(document, dict):
        raise SnapshotSchemaError("snapshot must be a JSON object")
    snapshot_id = document.get("id")
    if not isinstance(snapshot_id, str) or not snapshot_id:
        raise SnapshotSchemaError("'id' must be a non-empty string")
    platform = document.get("platform")
    if platform not in PLATFORMS:
        raise SnapshotSchemaError(f"'platform' must be one of {PLATFORMS}, got {platform!r}")
    page_size = _size(document, "page_size")
    viewport = _size(document, "viewport")
    if viewport[0] > page_size[0] or viewport[1] > page_size[1]:
        raise SnapshotSchemaError(f"viewport {list(viewport)} exceeds page_size {list(page_size)}")
    if "root" not in document:
        raise SnapshotSchemaError("missing 'root' node")
    builder = _TreeBuilder(page_size, document["root"])
    root = builder.build(document["root"], (), (), ())
    return PageSnapshot(
        id=snapshot_id,
        platform=platform,
        page_size=page_size,
        viewport=viewport,
        root=root,
        title=str(document.get("title") or ""),
        body_text=str(document.get("body_text") or ""),
        warnings=tuple(builder.warnings),
    )


def _is_header(item: Any) -> bool:
    return isinstance(item, dict) and "root" not in item and "schema" in item


def iter_snapshot_documents(path: str) -> Iterator[Union[str, dict]]:
    """
    Streams the raw snapshot documents stored in a file.

    Supported containers: a single '.json' document, a '.jsonl' batch (one
    snapshot per line, an optional schema header line), and a '.jsonl.zst'
    archive whose documents' text is the snapshot JSON.

    :param path: The snapshot file.
    :return: Iterator over undecoded or decoded snapshot documents.
    """
    if path.endswith(".jsonl.zst"):
        for text, _meta in Reader(path).stream_data(get_meta=True):
            yield text
    elif path.endswith(".jsonl"):
        with jsonlines.open(path, mode="r") as reader:
            for item in reader:
                if not _is_header(item):
                    yield item
    elif path.endswith(".json"):
        with open(path, "rb") as snapshot_file:
            yield snapshot_file.read()
    else:
        raise DataError(f"Unsupported snapshot container: {path}")
