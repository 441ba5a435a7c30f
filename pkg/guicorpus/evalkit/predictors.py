"""
Predictors Module

Trivial predictors for exercising the evaluation path without a model.

Classes:
- Predictor: Fills the predicted action of a step.
- GtEchoPredictor: Repeats the ground truth.
- ConstantClickPredictor: Always clicks one point.
- RandomPredictor: Seeded random actions over the step's action space.

Functions:
- make_predictor: Predictor by configured name.
"""
from abc import ABC, abstractmethod
from typing import List, Optional, Sequence

from guicorpus.action_lang.actions import BASIC_ACTIONS, BASIC_SLOTS, Direction, UnifiedAction
from guicorpus.action_lang.coordinates import PER_MILLE, Box, Point
from guicorpus.action_lang.registry import CustomActionManifest
from guicorpus.exceptions import ConfigError
from guicorpus.rng import SeededRandom, derive_seed
from guicorpus.unifier.steps import AgentStep

RANDOM_WORDS = ("open", "settings", "search", "home", "next", "cancel", "submit", "menu")


class Predictor(ABC):
    name = ""

    @abstractmethod
    def predict(self, step: AgentStep, index: int) -> Optional[UnifiedAction]:
        raise NotImplementedError

    def fill(self, steps: Sequence[AgentStep]) -> List[AgentStep]:
        return [step.with_prediction(self.predict(step, index)) for index, step in enumerate(steps)]


class GtEchoPredictor(Predictor):
    name = "gt-echo"

    def predict(self, step: AgentStep, index: int) -> Optional[UnifiedAction]:
        return step.gt_action


class ConstantClickPredictor(Predictor):
    name = "constant-click"

    def __init__(self, point: Point = Point(500, 500)):
        self.point = point

    def predict(self, step: AgentStep, index: int) -> Optional[UnifiedAction]:
        return UnifiedAction.click(self.point)


class RandomPredictor(Predictor):
    """
    Draws an action name uniformly from the basic actions plus the manifest's
    custom actions, then random arguments for its slots. Each step gets its
    own stream derived from the seed and the step's position.
    """

    name = "random-seeded"

    def __init__(self, seed: int = 0, manifest: Optional[CustomActionManifest] = None):
        self.seed = seed
        self.manifest = manifest if manifest is not None else CustomActionManifest.default()
        self.names = list(BASIC_ACTIONS) + self.manifest.names()

    def _slots(self, name: str):
        return BASIC_SLOTS[name] if name in BASIC_SLOTS else self.manifest.slots_for(name)

    def predict(self, step: AgentStep, index: int) -> Optional[UnifiedAction]:
        rng = SeededRandom(derive_seed(self.seed, "predict", index))
        name = rng.choice(self.names)
        values = {}
        for slot in self._slots(name):
            if slot == "point":
                values["point"] = Point(rng.randbelow(PER_MILLE + 1), rng.randbelow(PER_MILLE + 1))
            elif slot == "box":
                xs = sorted((rng.randbelow(PER_MILLE + 1), rng.randbelow(PER_MILLE + 1)))
                ys = sorted((rng.randbelow(PER_MILLE + 1), rng.randbelow(PER_MILLE + 1)))
                values["box"] = Box(xs[0], ys[0], xs[1], ys[1])
            elif slot == "text":
                values["text"] = " ".join(rng.choice(RANDOM_WORDS) for _ in range(1 + rng.randbelow(3)))
            elif slot == "direction":
                values["direction"] = rng.choice(list(Direction))
        return UnifiedAction(name, **values)


def make_predictor(name: str, seed: int = 0, manifest: Optional[CustomActionManifest] = None) -> Predictor:
    if name == GtEchoPredictor.name:
        return GtEchoPredictor()
    if name == ConstantClickPredictor.name:
        return ConstantClickPredictor()
    if name == RandomPredictor.name:
        return RandomPredictor(seed, manifest)
    raise ConfigError(f"Unknown predictor {name!r}")
