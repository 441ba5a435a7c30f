import pytest
from hypothesis import given
from hypothesis import strategies as st

from guicorpus.action_lang import Box, Dialect, Direction, Point, UnifiedAction, serialize_action
from guicorpus.action_lang.registry import AliasRegistry
from guicorpus.config_loader import ConfigLoader
from guicorpus.exceptions import (
    ConfigError, CoordinateRangeError, DataError, MissingArgumentError, UnmappedActionError,
)
from guicorpus.page_segmenter import GroundingKind, GroundingRecord
from guicorpus.unifier import (
    Adapter, AgentStep, InstructionTemplates, SourceStep, Unifier, load_adapters, pack_conversations,
    unify_step, variantize_reg,
)
from tests.synthetic import source_step

ADAPTERS = load_adapters()
SCREENS = [(1080, 1920), (1080, 2400), (1920, 1080), (1280, 1000), (2560, 1440)]
WORDS = ["open", "settings", "wifi", "search", "hello", "shopping", "mall"]


def unify(registry, dataset, raw_name, args=None, screen=(1080, 1920), **extra):
    adapter = ADAPTERS[dataset]
    step = SourceStep.from_dict(source_step(dataset, raw_name, args, screen, adapter.screen_fields, **extra))
    return unify_step(step, registry)


def reg_record(box=Box(100, 100, 300, 200), text="Open"):
    return GroundingRecord("page", 0, GroundingKind.REG, text, target_box=box, node_path=(0, 1))


class TestUnifyStep:
    def test_tap_is_click(self, registry):
        step = unify(registry, "amex", "tap", {"touch_x": 540, "touch_y": 960})
        assert step.gt_action == UnifiedAction.click(Point(500, 500))
        assert step.screen == (1080, 1920)
        assert step.dataset == "amex"

    def test_input_is_type(self, registry):
        assert unify(registry, "amex", "input", {"text": "hello"}).gt_action == UnifiedAction.type_text("hello")

    def test_press_home(self, registry):
        assert unify(registry, "aitz", "press_home").gt_action == UnifiedAction("PRESS_HOME")
        assert unify(registry, "amex", "home").gt_action == UnifiedAction("PRESS_HOME")

    def test_swipe_direction_is_inverted(self, registry):
        step = unify(registry, "amex", "swipe", {"swipe_direction": "up"})
        assert step.gt_action == UnifiedAction.scroll(Direction.DOWN)

    def test_drag_box_is_ordered(self, registry):
        step = unify(registry, "omniact", "drag_to", {"x": 1920, "y": 1080, "to_x": 0, "to_y": 0},
                     screen=(1920, 1080))
        assert step.gt_action == UnifiedAction("DRAG", box=Box(0, 0, 1000, 1000))

    def test_fractional_pixels(self, registry):
        step = unify(registry, "android_control", "click", {"x": "539.5", "y": "1200"}, screen=(1080, 2400))
        assert step.gt_action.point == Point(500, 500)

    def test_history_is_unified(self, registry):
        history = [{"name": "tap", "args": {"touch_x": "108", "touch_y": "192"}},
                   {"name": "input", "args": {"text": "wifi"}}]
        step = unify(registry, "amex", "back", history=history)
        assert step.history == ("CLICK <point>[[100, 100]]</point>", "TYPE [wifi]")

    def test_unmapped(self, registry):
        with pytest.raises(UnmappedActionError):
            unify(registry, "amex", "teleport")

    def test_missing_argument(self, registry):
        with pytest.raises(MissingArgumentError):
            unify(registry, "amex", "tap", {"touch_x": 10})

    def test_outside_screen(self, registry):
        with pytest.raises(CoordinateRangeError):
            unify(registry, "amex", "tap", {"touch_x": 1081, "touch_y": 10})

    def test_missing_screen(self, registry):
        step = SourceStep("amex", "t", "tap", {"touch_x": "1", "touch_y": "1"}, "shot#0")
        with pytest.raises(MissingArgumentError):
            unify_step(step, registry)

    def test_unknown_dataset(self, registry):
        with pytest.raises(DataError):
            Unifier(registry).unify(SourceStep("nowhere", "t", "tap", {}, "shot#0"))

    def test_bad_direction(self, registry):
        with pytest.raises(DataError):
            unify(registry, "android_control", "scroll", {"direction": "diagonal"})


@st.composite
def unified_steps(draw):
    dataset = draw(st.sampled_from(sorted(ADAPTERS)))
    adapter = ADAPTERS[dataset]
    screen = draw(st.sampled_from(SCREENS))

    def action():
        name = draw(st.sampled_from(adapter.action_space()))
        slots = {"CLICK": ("point",), "TYPE": ("text",), "SCROLL": ("direction",)}.get(name) \
            or adapter.manifest.slots_for(name)
        coord = st.integers(0, 1000)
        values = {}
        if "point" in slots:
            values["point"] = Point(draw(coord), draw(coord))
        if "box" in slots:
            xs, ys = sorted((draw(coord), draw(coord))), sorted((draw(coord), draw(coord)))
            values["box"] = Box(xs[0], ys[0], xs[1], ys[1])
        if "text" in slots:
            values["text"] = " ".join(draw(st.lists(st.sampled_from(WORDS), min_size=1, max_size=4)))
        if "direction" in slots:
            values["direction"] = draw(st.sampled_from(list(Direction)))
        return UnifiedAction(name, **values)

    history = tuple(serialize_action(action(), Dialect.TAGGED) for _ in range(draw(st.integers(0, 3))))
    return AgentStep("do the task", history, "shot#0", action(), screen, dataset, "test")


class TestRoundTrip:
    @given(unified_steps())
    def test_adapter_inverse(self, step):
        registry = AliasRegistry.default()
        adapter = ADAPTERS[step.dataset]
        source = adapter.to_source(step, registry)
        assert source.dataset == step.dataset
        assert adapter.unify(source, registry) == step

    def test_source_step_dict_round_trip(self):
        data = source_step("amex", "tap", {"touch_x": 1, "touch_y": 2}, history=[{"name": "back", "args": {}}])
        step = SourceStep.from_dict(data)
        assert SourceStep.from_dict(step.to_dict()) == step

    def test_source_step_missing_field(self):
        with pytest.raises(DataError):
            SourceStep.from_dict({"dataset": "amex"})


class TestAdapters:
    def test_bundled_datasets(self):
        assert sorted(ADAPTERS) == ["aitz", "amex", "android_control", "gui_act_web", "gui_odyssey", "mind2web",
                                    "omniact"]

    def test_action_space(self):
        assert ADAPTERS["mind2web"].action_space() == ["CLICK", "TYPE", "SCROLL"]
        assert "PRESS_RECENT" in ADAPTERS["gui_odyssey"].action_space()

    @pytest.mark.parametrize("dataset, custom", [
        ("gui_act_web", 2), ("android_control", 5), ("gui_odyssey", 6), ("omniact", 11), ("mind2web", 0),
    ])
    def test_basic_plus_custom_counts(self, dataset, custom):
        space = ADAPTERS[dataset].action_space()
        assert space[:3] == ["CLICK", "TYPE", "SCROLL"]
        assert len(space) == len(set(space)) == 3 + custom

    def test_fine_tuning_aliases_fit_the_custom_manifest(self, manifest):
        registry = AliasRegistry.load(ConfigLoader.data_path("aliases", "finetune.json"))
        canonical = {entry.canonical for _, _, entry in registry.entries()}
        assert len(registry.raw_names()) == 17
        assert len(canonical) == 10
        assert canonical - {"CLICK", "TYPE", "SCROLL"} <= set(manifest.names())

    def test_unknown_family(self):
        document = {"schema": "adapter", "version": 1, "dataset": "x", "family": "console",
                    "screen": {"width": "w", "height": "h"},
                    "slots": {name: name for name in ("x", "y", "x2", "y2", "text", "direction")}}
        with pytest.raises(ConfigError):
            Adapter.from_dict(document)

    def test_registry_must_match_manifest(self):
        registry = AliasRegistry.from_dicts(
            [{"entries": [{"dataset": "mind2web", "raw": "hold", "canonical": "LONG_PRESS", "args": "point"}]}])
        with pytest.raises(ConfigError):
            Unifier(registry, ADAPTERS)

    def test_extra_adapter_file_replaces_bundled(self, write_json):
        document = {"schema": "adapter", "version": 1, "dataset": "amex", "family": "mobile",
                    "screen": {"width": "w", "height": "h"},
                    "slots": {name: name for name in ("x", "y", "x2", "y2", "text", "direction")}}
        adapters = load_adapters([write_json("amex.json", document)])
        assert adapters["amex"].screen_fields == ("w", "h")
        assert len(adapters) == len(ADAPTERS)


class TestPacking:
    @pytest.mark.parametrize("count, sizes", [(30, [15, 15]), (7, [7]), (31, [15, 15, 1]), (0, [])])
    def test_pack_sizes(self, count, sizes):
        records = [reg_record(text=f"item {i}") for i in range(count)]
        packs = pack_conversations(records, pack_size=15)
        assert [len(pack.samples) for pack in packs] == sizes
        assert [sample for pack in packs for sample in pack.samples] == records

    def test_large_corpus(self):
        records = [reg_record()] * 10007
        packs = pack_conversations(records, pack_size=15, prompt_pool=100, seed=3)
        assert len(packs) == 668
        assert all(0 <= pack.prefix_prompt_id < 100 for pack in packs)
        assert [pack.index for pack in packs] == list(range(668))

    def test_prefix_ids_are_seeded(self):
        records = [reg_record()] * 150
        ids = [pack.prefix_prompt_id for pack in pack_conversations(records, seed=1)]
        assert ids == [pack.prefix_prompt_id for pack in pack_conversations(records, seed=1)]

    def test_invalid_sizes(self):
        with pytest.raises(ConfigError):
            pack_conversations([], pack_size=0)


class TestVariants:
    def test_point_variant_uses_centre(self):
        variant = variantize_reg(reg_record(), seed=0, kind="point")
        assert variant.answer == "<point>[[200, 150]]</point>"
        assert '"Open"' in variant.prompt

    def test_box_variant_keeps_box(self):
        variant = variantize_reg(reg_record(), seed=0, kind="box")
        assert variant.answer == "<box>[[100, 100, 300, 200]]</box>"

    def test_ocr_variant(self):
        variant = variantize_reg(reg_record(), seed=0, kind="ocr")
        assert variant.answer == "Open"
        assert "<box>[[100, 100, 300, 200]]</box>" in variant.prompt

    def test_pair_dialect(self):
        variant = variantize_reg(reg_record(), seed=0, kind="point", dialect=Dialect.PAIR)
        assert variant.answer == "<|box_start|>(200,150)<|box_end|>"

    def test_kind_rotates_with_seed(self):
        assert [variantize_reg(reg_record(), seed).kind for seed in range(6)] == \
            ["point", "box", "ocr", "point", "box", "ocr"]

    def test_custom_templates(self):
        templates = InstructionTemplates({"point": ["P {text}"], "box": ["B {text}"], "ocr": ["O {box}"]})
        assert variantize_reg(reg_record(), 1, templates).prompt == "B Open"

    def test_ig_records_have_no_variants(self):
        record = GroundingRecord("page", 0, GroundingKind.IG, "open it", target_point=Point(5, 5))
        with pytest.raises(DataError):
            variantize_reg(record, 0)

    def test_empty_template_pool(self):
        with pytest.raises(ConfigError):
            InstructionTemplates({"point": ["x"], "box": [], "ocr": ["y"]})
