import json

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from guicorpus.action_lang import Dialect, Direction, Point, UnifiedAction, parse_action
from guicorpus.exceptions import ConfigError, DataError, ExplorationBudgetError
from guicorpus.explorer import (
    ExplorationPolicy, PolicyKind, Trajectory, TrajectoryStep, environment_from_dict, explore, load_environment,
    trajectory_to_steps,
)
from tests.synthetic import (
    chain_environment, environment_doc, mobile_state, random_environment, star_environment,
)


def graph(document):
    oracle = nx.DiGraph()
    oracle.add_nodes_from(document["states"])
    for transition in document["transitions"]:
        oracle.add_edge(transition["from"], transition["to"])
    return oracle


class TestEnvironment:
    def test_load_from_file_with_state_files(self, tmp_path, write_json):
        write_json("wifi.json", mobile_state("wifi", "settings"))
        document = environment_doc("settings", [("home", "wifi")], ["home", "wifi"], initial="home")
        document["states"]["wifi"] = {"file": "wifi.json"}
        env = load_environment(write_json("settings.json", document))
        assert sorted(env.states) == ["home", "wifi"]
        assert env.states["wifi"].id == "settings/wifi"

    def test_outgoing_sorted_by_node_path(self):
        document = environment_doc("order", [], ["s0", "a", "b"])
        document["transitions"] = [
            {"from": "s0", "node_path": [3], "action": "CLICK", "to": "b"},
            {"from": "s0", "node_path": [1], "action": "LONG_PRESS", "to": "a"},
            {"from": "s0", "node_path": [1], "action": "CLICK", "to": "b"},
        ]
        env = environment_from_dict(document)
        assert [(t.node_path, t.action) for t in env.outgoing("s0")] == [
            ((1,), "CLICK"), ((1,), "LONG_PRESS"), ((3,), "CLICK")]

    def test_click_action_targets_node_centre(self):
        env = environment_from_dict(chain_environment(2))
        [transition] = env.outgoing("s0")
        # button 0 spans x 100..980, y 200..300 on a 1080x2400 screen
        assert env.action_for(transition) == UnifiedAction.click(Point(500, 104))

    def test_text_and_direction_transitions(self):
        document = environment_doc("form", [], ["s0", "s1"])
        document["transitions"] = [
            {"from": "s0", "node_path": [0], "action": "TYPE", "text": "guest", "to": "s1"},
            {"from": "s1", "node_path": [], "action": "SCROLL", "direction": "down", "to": "s0"},
        ]
        env = environment_from_dict(document)
        assert env.action_for(env.outgoing("s0")[0]) == UnifiedAction.type_text("guest")
        assert env.action_for(env.outgoing("s1")[0]) == UnifiedAction.scroll(Direction.DOWN)

    def test_type_without_text_rejected(self):
        document = environment_doc("form", [], ["s0", "s1"])
        document["transitions"] = [{"from": "s0", "node_path": [0], "action": "TYPE", "to": "s1"}]
        with pytest.raises(DataError):
            environment_from_dict(document)

    @pytest.mark.parametrize("transition", [
        {"from": "s0", "node_path": [0], "action": "CLICK", "to": "nowhere"},
        {"from": "s0", "node_path": [42], "action": "CLICK", "to": "s1"},
        {"from": "s0", "node_path": "zero", "action": "CLICK", "to": "s1"},
    ])
    def test_invalid_transitions(self, transition):
        document = environment_doc("bad", [], ["s0", "s1"])
        document["transitions"] = [transition]
        with pytest.raises(DataError):
            environment_from_dict(document)

    def test_duplicate_transition(self):
        document = environment_doc("dup", [], ["s0", "s1"])
        document["transitions"] = [{"from": "s0", "node_path": [0], "action": "CLICK", "to": "s1"}] * 2
        with pytest.raises(DataError):
            environment_from_dict(document)

    def test_unknown_initial_state(self):
        with pytest.raises(DataError):
            environment_from_dict(environment_doc("init", [], ["s0"], initial="missing"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_environment(str(tmp_path / "missing.json"))


class TestDfs:
    def test_chain(self):
        result = explore(environment_from_dict(chain_environment(3)), ExplorationPolicy())
        assert result.visited == ["s0", "s1", "s2"]
        assert len(result.trajectories) == 1
        assert len(result.trajectories[0]) == 2

    def test_star_backtracks(self):
        result = explore(environment_from_dict(star_environment(4)), ExplorationPolicy())
        assert len(result.visited) == 5
        assert result.backtracks == 4
        assert [len(trajectory) for trajectory in result.trajectories] == [1, 1, 1, 1]

    def test_self_loops_and_cycles_terminate(self):
        document = environment_doc("loop", [("s0", "s0"), ("s0", "s1"), ("s1", "s0")], ["s0", "s1"])
        result = explore(environment_from_dict(document), ExplorationPolicy())
        assert result.visited == ["s0", "s1"]

    def test_budget(self):
        env = environment_from_dict(chain_environment(6))
        with pytest.raises(ExplorationBudgetError) as info:
            explore(env, ExplorationPolicy(max_steps=2))
        assert info.value.frontier_size == 1
        assert info.value.partial.visited == ["s0", "s1", "s2"]
        assert sum(len(trajectory) for trajectory in info.value.partial.trajectories) == 2

    @settings(max_examples=60)
    @given(st.integers(1, 12), st.integers(0, 40), st.integers(0, 10 ** 6))
    def test_matches_graph_oracle(self, states, edges, seed):
        document = random_environment(states, edges, seed)
        result = explore(environment_from_dict(document), ExplorationPolicy())
        oracle = graph(document)
        assert set(result.visited) == {"s0"} | nx.descendants(oracle, "s0")
        assert result.visited == list(nx.dfs_preorder_nodes(oracle, "s0"))
        for trajectory in result.trajectories:
            for step in trajectory.steps:
                assert oracle.has_edge(step.state, step.next_state)


class TestRandomWalk:
    def test_deterministic(self):
        policy = ExplorationPolicy(PolicyKind.RANDOM_WALK, max_steps=10, seed=7)
        first = explore(environment_from_dict(star_environment(4)), policy)
        second = explore(environment_from_dict(star_environment(4)), policy)
        assert json.dumps([t.to_dict() for t in first.trajectories]) == \
            json.dumps([t.to_dict() for t in second.trajectories])

    def test_stops_at_dead_end(self):
        policy = ExplorationPolicy(PolicyKind.RANDOM_WALK, max_steps=10, seed=7)
        result = explore(environment_from_dict(star_environment(4)), policy)
        assert result.steps_taken == 1
        assert result.visited[0] == "s0"

    def test_respects_step_budget(self):
        document = environment_doc("cycle", [("s0", "s1"), ("s1", "s0")], ["s0", "s1"])
        result = explore(environment_from_dict(document), ExplorationPolicy("random_walk", max_steps=9, seed=1))
        assert result.steps_taken == 9
        assert result.visited == ["s0", "s1"] * 5

    def test_unknown_policy(self):
        with pytest.raises(ConfigError):
            ExplorationPolicy("bfs")


class TestTrajectoryToSteps:
    def test_one_step(self):
        env = environment_from_dict(chain_environment(2))
        [trajectory] = explore(env, ExplorationPolicy()).trajectories
        [step] = trajectory_to_steps(trajectory, "open settings", env)
        assert step.history == ()
        assert step.screenshot_ref == "chain/s0#0"
        assert step.screen == (1080, 2400)
        assert step.split == "explored"

    def test_history_grows(self):
        env = environment_from_dict(chain_environment(4))
        [trajectory] = explore(env, ExplorationPolicy()).trajectories
        steps = trajectory_to_steps(trajectory, "go deep", env)
        assert [len(step.history) for step in steps] == [0, 1, 2]
        assert steps[2].history == tuple(
            f"CLICK <point>[[500, {y}]]</point>" for y in (104, 104))

    def test_click_then_type_history_parses(self):
        document = environment_doc("form", [], ["s0", "s1", "s2", "s3"])
        document["transitions"] = [
            {"from": "s0", "node_path": [2], "action": "CLICK", "to": "s1"},
            {"from": "s1", "node_path": [0], "action": "TYPE", "text": "hello world", "to": "s2"},
            {"from": "s2", "node_path": [1], "action": "CLICK", "to": "s3"},
        ]
        env = environment_from_dict(document)
        [trajectory] = explore(env, ExplorationPolicy()).trajectories
        steps = trajectory_to_steps(trajectory, "fill the form", env, Dialect.PAIR)
        assert [parse_action(item, Dialect.PAIR) for item in steps[-1].history] == \
            [step.action for step in trajectory.steps[:-1]]

    def test_broken_chain_rejected(self):
        click = UnifiedAction.click(Point(1, 1))
        with pytest.raises(DataError):
            Trajectory("env", (TrajectoryStep("a", (0,), click, "b"), TrajectoryStep("c", (0,), click, "d")))

    def test_trajectory_dict_round_trip(self):
        env = environment_from_dict(chain_environment(3))
        [trajectory] = explore(env, ExplorationPolicy()).trajectories
        assert Trajectory.from_dict(trajectory.to_dict()) == trajectory
