"""
Synthetic GUI exploration.

Declarative GUI environments (screen states and a transition table) and the
DFS and random-walk explorers that collect trajectories from them.
"""
from .environment import GuiEnvironment, Transition, environment_from_dict, load_environment
from .explorer import (
    ExplorationPolicy, ExplorationResult, PolicyKind, Trajectory, TrajectoryStep, explore, trajectory_to_steps,
)
