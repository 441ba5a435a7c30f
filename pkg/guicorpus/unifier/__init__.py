"""
Dataset unification.

Declarative per-dataset adapters that move heterogeneous agent-dataset
steps into the unified action space, plus REG variant formatting and
conversation packing of grounding records.
"""
from .adapters import Adapter, Unifier, load_adapters, unify_step
from .packing import (
    VARIANT_KINDS, ConversationPack, GroundingVariant, InstructionTemplates, pack_conversations, variantize_reg,
)
from .steps import AgentStep, RawAction, SourceStep
