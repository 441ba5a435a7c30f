"""
Explorer Module

This module explores a GuiEnvironment the way a data-collection harness
drives a real device: depth-first over every reachable screen, or as a
seeded random walk.

DFS takes outgoing transitions in (node path, action name) order, never
moves into a state it has already seen, and counts a backtrack each time it
returns to a parent. Each backtrack closes the current trajectory; the next
forward move starts a new one from the state it backtracked to.

The random walk draws uniformly among a state's outgoing transitions with a
SeededRandom stream. It may revisit states and follow self-loops, and stops
at max_steps or at a state without outgoing transitions.

Classes:
- PolicyKind: DFS or RANDOM_WALK.
- ExplorationPolicy: Policy kind, step budget and seed.
- TrajectoryStep, Trajectory: Chained steps taken through the environment.
- ExplorationResult: Visited states, trajectories and backtrack count.

Functions:
- explore: Runs a policy over an environment.
- trajectory_to_steps: Turns a trajectory into AgentStep records.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Tuple

from guicorpus.action_lang.actions import Dialect, UnifiedAction
from guicorpus.action_lang.grammar import serialize_action
from guicorpus.exceptions import ConfigError, DataError, ExplorationBudgetError
from guicorpus.explorer.environment import GuiEnvironment, Transition
from guicorpus.rng import SeededRandom, derive_seed
from guicorpus.snapshot_ingest.snapshot import NodePath, PageSnapshot
from guicorpus.unifier.steps import AgentStep

logger = logging.getLogger(__name__)


class PolicyKind(str, Enum):
    DFS = "DFS"
    RANDOM_WALK = "RANDOM_WALK"


@dataclass(frozen=True)
class ExplorationPolicy:
    kind: PolicyKind = PolicyKind.DFS
    max_steps: int = 500
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.kind, PolicyKind):
            try:
                object.__setattr__(self, "kind", PolicyKind(str(self.kind).upper()))
            except ValueError:
                raise ConfigError(f"Unknown exploration policy {self.kind!r}") from None
        if self.max_steps < 1:
            raise ConfigError(f"explore.max_steps must be >= 1, got {self.max_steps}")


@dataclass(frozen=True)
class TrajectoryStep:
    state: str
    node_path: NodePath
    action: UnifiedAction
    next_state: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "state": self.state,
            "node_path": list(self.node_path),
            "action": self.action.to_dict(),
            "next_state": self.next_state,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrajectoryStep":
        return cls(data["state"], tuple(data["node_path"]), UnifiedAction.from_dict(data["action"]), data["next_state"])


@dataclass(frozen=True)
class Trajectory:
    environment: str
    steps: Tuple[TrajectoryStep, ...]

    def __post_init__(self):
        for previous, current in zip(self.steps, self.steps[1:]):
            if previous.next_state != current.state:
                raise DataError(f"Trajectory breaks between {previous.next_state!r} and {current.state!r}")

    def __len__(self) -> int:
        return len(self.steps)

    def to_dict(self) -> Dict[str, Any]:
        return {"environment": self.environment, "steps": [step.to_dict() for step in self.steps]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Trajectory":
        return cls(data["environment"], tuple(TrajectoryStep.from_dict(step) for step in data["steps"]))


@dataclass
class ExplorationResult:
    environment: str
    visited: List[str] = field(default_factory=list)
    trajectories: List[Trajectory] = field(default_factory=list)
    backtracks: int = 0
    steps_taken: int = 0

    def snapshots(self, env: GuiEnvironment) -> List[PageSnapshot]:
        """
        Snapshots of the visited states in visit order, each state once.
        """
        return [env.states[state] for state in dict.fromkeys(self.visited)]


class _TrajectoryBuilder:
    def __init__(self, env: GuiEnvironment, result: ExplorationResult):
        self.env = env
        self.result = result
        self.steps: List[TrajectoryStep] = []

    def take(self, transition: Transition) -> None:
        self.steps.append(TrajectoryStep(transition.source, transition.node_path,
                                         self.env.action_for(transition), transition.target))
        self.result.steps_taken += 1

    def close(self) -> None:
        if self.steps:
            self.result.trajectories.append(Trajectory(self.env.id, tuple(self.steps)))
            self.steps = []


def _explore_dfs(env: GuiEnvironment, max_steps: int) -> ExplorationResult:
    result = ExplorationResult(env.id, visited=[env.initial])
    builder = _TrajectoryBuilder(env, result)
    seen = {env.initial}
    stack: List[List[Any]] = [[env.initial, 0]]

    while stack:
        frame = stack[-1]
        state, position = frame
        outgoing = env.outgoing(state)
        while position < len(outgoing) and outgoing[position].target in seen:
            position += 1
        frame[1] = position
        if position < len(outgoing):
            if result.steps_taken >= max_steps:
                builder.close()
                frontier = sum(1 for entry_state, entry_position in stack
                               for transition in env.outgoing(entry_state)[entry_position:]
                               if transition.target not in seen)
                raise ExplorationBudgetError(frontier, result)
            transition = outgoing[position]
            frame[1] = position + 1
            builder.take(transition)
            seen.add(transition.target)
            result.visited.append(transition.target)
            stack.append([transition.target, 0])
        else:
            stack.pop()
            if stack:
                result.backtracks += 1
                builder.close()
    builder.close()
    return result


def _explore_random_walk(env: GuiEnvironment, max_steps: int, seed: int) -> ExplorationResult:
    result = ExplorationResult(env.id, visited=[env.initial])
    builder = _TrajectoryBuilder(env, result)
    rng = SeededRandom(derive_seed(seed, "random-walk", env.id))
    state = env.initial
    for _ in range(max_steps):
        outgoing = env.outgoing(state)
        if not outgoing:
            break
        transition = rng.choice(outgoing)
        builder.take(transition)
        state = transition.target
        result.visited.append(state)
    builder.close()
    return result


def explore(env: GuiEnvironment, policy: ExplorationPolicy) -> ExplorationResult:
    """
    Explores an environment.

    :param env: A validated environment.
    :param policy: Exploration policy.
    :return: Visited states in visit order and the trajectories taken.
             Random walks list a state again each time they re-enter it.
    :raises ExplorationBudgetError: If DFS runs out of steps before exhausting the
                                    reachable states; the partial result is attached.
    """
    if policy.kind == PolicyKind.DFS:
        result = _explore_dfs(env, policy.max_steps)
    else:
        result = _explore_random_walk(env, policy.max_steps, policy.seed)
    logger.info("Explored %s with %s: %d states, %d trajectories, %d steps, %d backtracks",
                env.id, policy.kind.value, len(set(result.visited)), len(result.trajectories),
                result.steps_taken, result.backtracks)
    return result


def screenshot_ref(env: GuiEnvironment, state: str) -> str:
    return f"{env.states[state].id}#0"


def trajectory_to_steps(trajectory: Trajectory, task_instruction: str, env: GuiEnvironment,
                        dialect: Dialect = Dialect.TAGGED) -> List[AgentStep]:
    """
    Converts a trajectory into agent steps.

    :param trajectory: A chained trajectory.
    :param task_instruction: Task text shared by every step.
    :param env: The environment the trajectory was taken in.
    :param dialect: Dialect of the serialized history.
    :return: One step per trajectory step; step i's history holds actions 0..i-1.
    """
    steps = []
    history: List[str] = []
    for step in trajectory.steps:
        snapshot = env.states[step.state]
        steps.append(AgentStep(
            task=task_instruction,
            history=tuple(history),
            screenshot_ref=screenshot_ref(env, step.state),
            gt_action=step.action,
            screen=snapshot.page_size,
            dataset=env.id,
            split="explored",
        ))
        history.append(serialize_action(step.action, dialect))
    return steps
