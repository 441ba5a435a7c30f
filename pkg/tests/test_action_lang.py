import random
import string
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from guicorpus.action_lang import (
    AliasRegistry, Box, CustomActionManifest, Dialect, Direction, PixelBox, Point, UnifiedAction, canonicalize,
    denormalize_box, denormalize_point, normalize_box, normalize_point, parse_action, serialize_action,
)
from guicorpus.config_loader import ConfigLoader
from guicorpus.exceptions import (
    ActionSyntaxError, ConfigError, CoordinateRangeError, DataError, UnmappedActionError,
)

coords = st.integers(min_value=0, max_value=1000)
points = st.builds(Point, coords, coords)


@st.composite
def boxes(draw):
    xs = sorted((draw(coords), draw(coords)))
    ys = sorted((draw(coords), draw(coords)))
    return Box(xs[0], ys[0], xs[1], ys[1])


texts = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=40)
custom_names = ["LONG_PRESS", "OPEN_APP", "DRAG", "PRESS_BACK", "PRESS_HOME", "PRESS_ENTER", "WAIT", "COMPLETE"]


@st.composite
def actions(draw):
    manifest = CustomActionManifest.default()
    name = draw(st.sampled_from(["CLICK", "TYPE", "SCROLL"] + custom_names))
    slots = {"CLICK": ("point",), "TYPE": ("text",), "SCROLL": ("direction",)}.get(name) or manifest.slots_for(name)
    values = {}
    if "point" in slots:
        values["point"] = draw(points)
    if "box" in slots:
        values["box"] = draw(boxes())
    if "text" in slots:
        values["text"] = draw(texts)
    if "direction" in slots:
        values["direction"] = draw(st.sampled_from(list(Direction)))
    return UnifiedAction(name, **values)


ALPHABET = string.ascii_letters + string.digits + string.punctuation + " \t\néü中☃"


def random_action(rng, manifest):
    name = rng.choice(["CLICK", "TYPE", "SCROLL"] + custom_names)
    slots = {"CLICK": ("point",), "TYPE": ("text",), "SCROLL": ("direction",)}.get(name) or manifest.slots_for(name)
    values = {}
    if "point" in slots:
        values["point"] = Point(rng.randint(0, 1000), rng.randint(0, 1000))
    if "box" in slots:
        xs = sorted((rng.randint(0, 1000), rng.randint(0, 1000)))
        ys = sorted((rng.randint(0, 1000), rng.randint(0, 1000)))
        values["box"] = Box(xs[0], ys[0], xs[1], ys[1])
    if "text" in slots:
        values["text"] = "".join(rng.choice(ALPHABET) for _ in range(rng.randint(1, 24)))
    if "direction" in slots:
        values["direction"] = rng.choice(list(Direction))
    return UnifiedAction(name, **values)


class TestParse:
    def test_click(self):
        assert parse_action("CLICK <point>[[101, 872]]</point>", Dialect.TAGGED) == UnifiedAction.click(Point(101, 872))

    def test_type(self):
        action = parse_action("TYPE [Shanghai shopping mall]", Dialect.TAGGED)
        assert action == UnifiedAction.type_text("Shanghai shopping mall")

    def test_scroll(self):
        assert parse_action("SCROLL [UP]", Dialect.TAGGED) == UnifiedAction.scroll(Direction.UP)

    def test_origin(self):
        assert parse_action("CLICK <point>[[0, 0]]</point>", Dialect.TAGGED).point == Point(0, 0)

    def test_whitespace_inside_coordinates(self):
        assert parse_action("CLICK <point>[[ 101 ,872 ]]</point>", Dialect.TAGGED).point == Point(101, 872)

    def test_pair_dialect(self):
        assert parse_action("CLICK <|box_start|>(101,872)<|box_end|>", Dialect.PAIR).point == Point(101, 872)
        drag = parse_action("DRAG <|box_start|>(10,20),(30,40)<|box_end|>", Dialect.PAIR)
        assert drag.box == Box(10, 20, 30, 40)

    def test_custom_without_arguments(self):
        assert parse_action("PRESS_BACK", Dialect.TAGGED) == UnifiedAction("PRESS_BACK")

    def test_escaped_text(self):
        assert parse_action(r"TYPE [a\]b\\c]", Dialect.TAGGED).text == "a]b\\c"

    def test_out_of_range_coordinate(self):
        with pytest.raises(CoordinateRangeError):
            parse_action("CLICK <point>[[1001, 5]]</point>", Dialect.TAGGED)

    def test_negative_coordinate(self):
        with pytest.raises(CoordinateRangeError):
            parse_action("CLICK <point>[[-1, 5]]</point>", Dialect.TAGGED)

    @pytest.mark.parametrize("text", [
        "CLICK <point>[[101, 872]</point>",
        "CLICK <point>[[101]]</point>",
        "CLICK",
        "TYPE [unterminated",
        "SCROLL [SIDEWAYS]",
        "CLICK [text]",
        "",
    ])
    def test_malformed(self, text):
        with pytest.raises(ActionSyntaxError) as info:
            parse_action(text, Dialect.TAGGED)
        assert 0 <= info.value.position <= len(text)

    def test_wrong_dialect_is_a_syntax_error(self):
        with pytest.raises(ActionSyntaxError):
            parse_action("CLICK <point>[[101, 872]]</point>", Dialect.PAIR)

    def test_unknown_name(self):
        with pytest.raises(UnmappedActionError):
            parse_action("FLY <point>[[1, 2]]</point>", Dialect.TAGGED)

    def test_alias_through_registry(self, registry):
        action = parse_action("tap <point>[[5, 6]]</point>", Dialect.TAGGED, registry=registry, source="amex")
        assert action == UnifiedAction.click(Point(5, 6))


class TestSerialize:
    def test_click(self):
        assert serialize_action(UnifiedAction.click(Point(101, 872)), Dialect.TAGGED) == \
            "CLICK <point>[[101, 872]]</point>"

    def test_pair_box_round_trip(self):
        drag = UnifiedAction("DRAG", box=Box(10, 20, 30, 40))
        text = serialize_action(drag, Dialect.PAIR)
        assert text == "DRAG <|box_start|>(10,20),(30,40)<|box_end|>"
        assert parse_action(text, Dialect.PAIR) == drag

    @pytest.mark.parametrize("direction", list(Direction))
    def test_every_direction(self, direction):
        action = UnifiedAction.scroll(direction)
        text = serialize_action(action, Dialect.TAGGED)
        assert text == f"SCROLL [{direction.value}]"
        assert parse_action(text, Dialect.TAGGED) == action

    @given(actions(), st.sampled_from(list(Dialect)))
    def test_round_trip(self, action, dialect):
        assert parse_action(serialize_action(action, dialect), dialect) == action

    def test_round_trip_at_scale(self, manifest):
        rng = random.Random(1000)
        dialects = list(Dialect)
        for index in range(100_000):
            action = random_action(rng, manifest)
            dialect = dialects[index % len(dialects)]
            text = serialize_action(action, dialect)
            assert parse_action(text, dialect) == action, text



class TestActions:
    def test_basic_actions_take_exactly_their_slot(self):
        with pytest.raises(DataError):
            UnifiedAction("CLICK")
        with pytest.raises(DataError):
            UnifiedAction("CLICK", point=Point(1, 1), text="x")
        with pytest.raises(DataError):
            UnifiedAction("TYPE", text="")

    def test_non_identifier_name(self):
        with pytest.raises(DataError):
            UnifiedAction("press back")

    def test_box_corner_order(self):
        with pytest.raises(CoordinateRangeError):
            Box(10, 10, 5, 20)

    def test_dict_round_trip(self):
        action = UnifiedAction("DRAG", box=Box(1, 2, 3, 4))
        assert UnifiedAction.from_dict(action.to_dict()) == action

    def test_manifest_validates_custom_slots(self, manifest):
        assert manifest.validate(UnifiedAction("WAIT")) == UnifiedAction("WAIT")
        with pytest.raises(DataError):
            manifest.validate(UnifiedAction("WAIT", point=Point(1, 1)))
        with pytest.raises(UnmappedActionError):
            manifest.validate(UnifiedAction("TELEPORT"))

    def test_manifest_rejects_basic_names(self):
        with pytest.raises(ConfigError):
            CustomActionManifest({"CLICK": ["point"]})


class TestCanonicalize:
    def test_tap_is_click(self, registry):
        assert canonicalize("tap", "amex", registry) == "CLICK"

    def test_case_insensitive(self, registry):
        assert canonicalize("TAP", "amex", registry) == "CLICK"

    def test_canonical_is_idempotent(self, registry):
        for dataset in registry.datasets + ["unknown"]:
            assert canonicalize("CLICK", dataset, registry) == "CLICK"

    def test_unmapped(self, registry):
        with pytest.raises(UnmappedActionError):
            canonicalize("teleport", "amex", registry)

    def test_fine_tuning_alias_set(self):
        registry = AliasRegistry.load(ConfigLoader.data_path("aliases", "finetune.json"))
        raw_names = registry.raw_names()
        canonical = {entry.canonical for _, _, entry in registry.entries()}
        assert len(raw_names) == 17
        assert len(canonical) == 10

    def test_conflicting_aliases_rejected(self):
        documents = [{"entries": [{"dataset": "d", "raw": "tap", "canonical": "CLICK", "args": "point"}]},
                     {"entries": [{"dataset": "d", "raw": "TAP", "canonical": "LONG_PRESS", "args": "point"}]}]
        with pytest.raises(ConfigError):
            AliasRegistry.from_dicts(documents)

    def test_unknown_rule_rejected(self):
        with pytest.raises(ConfigError):
            AliasRegistry.from_dicts([{"entries": [{"dataset": "d", "raw": "x", "canonical": "X", "args": "warp"}]}])


class TestCoordinates:
    def test_midpoint(self):
        assert normalize_point((960, 540), (1920, 1080)) == Point(500, 500)

    def test_far_corner(self):
        assert normalize_point((1920, 1080), (1920, 1080)) == Point(1000, 1000)

    def test_half_rounds_up(self):
        # 1 px of 2000 is exactly half a per-mille unit
        assert normalize_point((1, 0), (2000, 10)) == Point(1, 0)

    def test_clamped(self):
        assert normalize_point((2500, -10), (1920, 1080)) == Point(1000, 0)

    def test_fractional_pixels(self):
        assert normalize_point((Fraction(3, 2), 0), (3000, 10)).x == 1
        assert normalize_point((1.25, 0), (3000, 10)).x == 0

    def test_zero_size(self):
        with pytest.raises(CoordinateRangeError):
            normalize_point((0, 0), (0, 1080))

    @given(st.integers(1, 5000), st.integers(1, 5000), st.data())
    def test_inverse_within_half_unit(self, width, height, data):
        x = data.draw(st.integers(0, width))
        y = data.draw(st.integers(0, height))
        point = normalize_point((x, y), (width, height))
        back = denormalize_point(point, (width, height))
        assert abs(Fraction(back[0]) - x) <= Fraction(width, 1000) / 2 + 1
        assert abs(Fraction(back[1]) - y) <= Fraction(height, 1000) / 2 + 1

    @given(st.integers(1, 4000), st.integers(1, 4000), st.data())
    def test_monotone(self, width, height, data):
        a = data.draw(st.integers(0, width))
        b = data.draw(st.integers(a, width))
        assert normalize_point((a, 0), (width, height)).x <= normalize_point((b, 0), (width, height)).x

    def test_every_per_mille_point_survives_pixels(self):
        size = (1920, 1080)
        for x in range(1001):
            for y in range(1001):
                point = Point(x, y)
                assert normalize_point(denormalize_point(point, size), size) == point

    @pytest.mark.parametrize("extent", [1000, 1001, 1080, 1366, 1920, 2400, 3840])
    def test_per_mille_axis_against_integer_rounding(self, extent):
        for value in range(1001):
            # half up on non-negative integers: floor((2 * v * e + 1000) / 2000)
            pixels = (2 * value * extent + 1000) // 2000
            assert denormalize_point(Point(value, 0), (extent, extent)) == (pixels, 0)
            assert normalize_point((pixels, pixels), (extent, extent)) == Point(value, value)

    def test_box_round_trip_on_per_mille_grid(self):
        box = Box(100, 200, 300, 400)
        assert normalize_box(denormalize_box(box, (1000, 1000)), (1000, 1000)) == box

    def test_pixel_box_intersection(self):
        assert PixelBox(0, 0, 10, 10).intersect(PixelBox(5, 5, 20, 20)) == PixelBox(5, 5, 10, 10)
        assert PixelBox(0, 0, 10, 10).intersect(PixelBox(10, 0, 20, 10)) is None
