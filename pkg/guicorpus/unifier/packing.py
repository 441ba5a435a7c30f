"""
Conversation Packing Module

This module prepares grounding records for multi-sample training
conversations: REG records are rewritten into point, box or OCR variants
wrapped in instruction templates, and records are grouped in order into
fixed-size conversation packs, each opened by one of a pool of prefix
prompts.

Classes:
- InstructionTemplates: Template pools per variant kind.
- GroundingVariant: One formatted grounding sample.
- ConversationPack: Records grouped into one conversation.

Functions:
- variantize_reg: Rewrites a REG record into one variant.
- pack_conversations: Groups records into packs.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from guicorpus.action_lang.actions import Dialect
from guicorpus.action_lang.grammar import serialize_box, serialize_point
from guicorpus.action_lang.registry import read_json
from guicorpus.config_loader import ConfigLoader
from guicorpus.exceptions import ConfigError, DataError
from guicorpus.page_segmenter.records import GroundingKind, GroundingRecord
from guicorpus.rng import SeededRandom, derive_seed

POINT = "point"
BOX = "box"
OCR = "ocr"
VARIANT_KINDS = (POINT, BOX, OCR)


class InstructionTemplates:
    """
    Instruction template pools. Point and box templates take {text}; OCR templates take {box}.
    """

    def __init__(self, pools: Mapping[str, Sequence[str]]):
        for kind in VARIANT_KINDS:
            if not pools.get(kind):
                raise ConfigError(f"Instruction templates need a non-empty {kind!r} pool")
        self.pools = {kind: tuple(pools[kind]) for kind in VARIANT_KINDS}

    @classmethod
    def load(cls, path: Optional[str] = None) -> "InstructionTemplates":
        return cls(read_json(path or ConfigLoader.data_path("templates.json")))

    def __getitem__(self, kind: str) -> Tuple[str, ...]:
        return self.pools[kind]


@dataclass(frozen=True)
class GroundingVariant:
    snapshot_id: str
    window_index: int
    node_path: Tuple[int, ...]
    kind: str
    prompt: str
    answer: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "snapshot_id": self.snapshot_id,
            "window_index": self.window_index,
            "node_path": list(self.node_path),
            "kind": self.kind,
            "prompt": self.prompt,
            "answer": self.answer,
        }


def variantize_reg(record: GroundingRecord, seed: int, templates: Optional[InstructionTemplates] = None,
                   dialect: Dialect = Dialect.TAGGED, kind: Optional[str] = None) -> GroundingVariant:
    """
    Rewrites a REG record as a point, box or OCR grounding sample.

    The kind rotates with the seed (seed % 3 over point, box, ocr) unless
    given; the template is drawn from that kind's pool with a seeded choice.

    :param record: A REG record with a target box.
    :param seed: Seed; consecutive seeds rotate through the three kinds.
    :param templates: Template pools; the bundled ones if omitted.
    :param dialect: Dialect the coordinates are written in.
    :param kind: Force a variant kind.
    :return: The variant. Point answers are the box centre; box answers keep the
             box; OCR samples ask about the box and answer with the expression.
    """
    if record.kind != GroundingKind.REG or record.target_box is None:
        raise DataError("Only REG records with a target box have variants")
    kind = kind or VARIANT_KINDS[seed % len(VARIANT_KINDS)]
    if kind not in VARIANT_KINDS:
        raise DataError(f"Unknown variant kind {kind!r}")
    templates = templates or _bundled_templates()
    template = SeededRandom(derive_seed(seed, "template", kind)).choice(templates[kind])

    box_text = serialize_box(record.target_box, dialect)
    if kind == POINT:
        prompt, answer = template.format(text=record.text), serialize_point(record.target_box.center(), dialect)
    elif kind == BOX:
        prompt, answer = template.format(text=record.text), box_text
    else:
        prompt, answer = template.format(box=box_text), record.text
    return GroundingVariant(record.snapshot_id, record.window_index, record.node_path, kind, prompt, answer)


@lru_cache(maxsize=None)
def _bundled_templates() -> InstructionTemplates:
    return InstructionTemplates.load()


Sample = Union[GroundingRecord, GroundingVariant]


@dataclass(frozen=True)
class ConversationPack:
    index: int
    prefix_prompt_id: int
    samples: Tuple[Sample, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "prefix_prompt_id": self.prefix_prompt_id,
            "samples": [sample.to_dict() for sample in self.samples],
        }


def pack_conversations(records: Sequence[Sample], pack_size: int = 15, prompt_pool: int = 100,
                       seed: int = 0) -> List[ConversationPack]:
    """
    Groups records, in order, into conversation packs.

    :param records: Grounding records or variants.
    :param pack_size: Samples per pack; the last pack may be smaller.
    :param prompt_pool: Number of prefix prompts to draw ids from.
    :param seed: Seed of the prefix id draws.
    :return: Packs whose concatenated samples equal the input.
    """
    if pack_size < 1 or prompt_pool < 1:
        raise ConfigError("pack_size and prompt_pool must be >= 1")
    rng = SeededRandom(derive_seed(seed, "prefix"))
    return [
        ConversationPack(index, rng.randbelow(prompt_pool), tuple(records[start:start + pack_size]))
        for index, start in enumerate(range(0, len(records), pack_size))
    ]
