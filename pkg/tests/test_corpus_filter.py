import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from guicorpus.action_lang.coordinates import Box, PixelBox, Point
from guicorpus.corpus_filter import (
    CLUSTERED, DEGENERATE_BOX, DUPLICATE_INSTRUCTION, ERROR_PAGE, INCOMPLETE_RENDER, NO_ELEMENT_OVERLAP,
    OUT_OF_RANGE, TOO_WIDE, FilterConfig, FilterReport, PageVerdict, cap_elements, filter_page, lint_annotations,
)
from guicorpus.corpus_filter.page_filter import _is_clustered
from guicorpus.exceptions import ConfigError
from guicorpus.page_segmenter import GroundingKind, GroundingRecord
from guicorpus.snapshot_ingest import Element, load_snapshot
from tests.synthetic import snapshot_doc

CONFIG = FilterConfig()


def element(index, y, role="button", height=20, name=None):
    return Element((index,), role, name or f"element {index}", PixelBox(100, y, 200, y + height))


def page(page_size=(1920, 1000), title="Shop", platform="web"):
    return load_snapshot(snapshot_doc("page", page_size=page_size, title=title, platform=platform))


class TestFilterPage:
    def test_spread_elements_accepted(self):
        elements = [element(i, 50 + 130 * i) for i in range(7)]
        assert filter_page(page(), elements, CONFIG) == PageVerdict(True)

    def test_bottom_cluster_rejected(self):
        elements = [element(0, 100)] + [element(i, 910) for i in range(1, 10)]
        assert filter_page(page(), elements, CONFIG) == PageVerdict(False, CLUSTERED)

    def test_cluster_threshold_is_inclusive(self):
        # 8 of 10 centres in the band: exactly the rejection share
        elements = [element(0, 100), element(1, 300)] + [element(i, 910) for i in range(2, 10)]
        assert filter_page(page(), elements, CONFIG).reason == CLUSTERED

    def test_below_cluster_threshold(self):
        elements = [element(i, 100 + 200 * i) for i in range(3)] + [element(i, 910) for i in range(3, 10)]
        assert filter_page(page(), elements, CONFIG).accepted

    def test_single_element_is_incomplete(self):
        assert filter_page(page(), [element(0, 100)], CONFIG) == PageVerdict(False, INCOMPLETE_RENDER)

    def test_error_page(self):
        elements = [element(i, 50 + 130 * i) for i in range(7)]
        assert filter_page(page(title="404 Not Found"), elements, CONFIG).reason == ERROR_PAGE

    def test_too_wide(self):
        elements = [element(i, 50 + 130 * i) for i in range(7)]
        assert filter_page(page(page_size=(2400, 1000)), elements, CONFIG).reason == TOO_WIDE

    def test_width_limit_applies_to_web_only(self):
        elements = [element(i, 50 + 130 * i) for i in range(7)]
        desktop = page(page_size=(2560, 1000), platform="windows")
        assert filter_page(desktop, elements, CONFIG).accepted

    def test_error_page_reported_before_other_reasons(self):
        verdict = filter_page(page(page_size=(2400, 1000), title="404 Not Found"), [], CONFIG)
        assert verdict.reason == ERROR_PAGE

    def test_empty_page_gets_a_verdict(self):
        verdict = filter_page(page(), [], FilterConfig(min_elements_for_render_check=1))
        assert verdict == PageVerdict(False, INCOMPLETE_RENDER)

    def test_no_elements_is_not_clustered(self):
        assert not _is_clustered(page(), [], CONFIG)


class TestCapElements:
    def test_under_cap_unchanged(self):
        elements = [element(i, 10 * i) for i in range(8)]
        assert cap_elements(elements, CONFIG) == elements

    def test_every_role_kept(self):
        roles = ["button", "link", "textbox", "tab"]
        rng = random.Random(3)
        elements = [element(i, 10 * i, role=rng.choice(roles)) for i in range(21)] + \
            [element(21 + i, 300 + 10 * i, role=role) for i, role in enumerate(roles)]
        capped = cap_elements(elements, CONFIG, "page-a")
        assert len(capped) == 10
        assert {item.role for item in capped} == set(roles)
        assert capped == cap_elements(elements, CONFIG, "page-a")

    def test_single_role_subset_in_order(self):
        elements = [element(i, 10 * i) for i in range(17)]
        capped = cap_elements(elements, CONFIG, "page-b")
        assert len(capped) == 10
        positions = [elements.index(item) for item in capped]
        assert positions == sorted(positions)

    def test_seed_changes_sample(self):
        elements = [element(i, 10 * i) for i in range(40)]
        samples = {tuple(item.node_path for item in cap_elements(elements, FilterConfig(seed=seed), "p"))
                   for seed in range(5)}
        assert len(samples) > 1

    @given(st.integers(0, 60), st.integers(1, 6), st.integers(1, 15), st.integers(0, 2 ** 32))
    def test_cap_properties(self, count, role_count, cap, seed):
        rng = random.Random(seed)
        elements = [element(i, i, role=f"role{rng.randrange(role_count)}") for i in range(count)]
        capped = cap_elements(elements, FilterConfig(max_elements_per_page=cap, seed=seed), str(seed))
        assert len(capped) == min(count, cap)
        positions = [elements.index(item) for item in capped]
        assert positions == sorted(set(positions))
        roles = {item.role for item in elements}
        assert len({item.role for item in capped}) >= min(len(roles), cap)


class TestFilterConfig:
    def test_rejects_zero_cap(self):
        with pytest.raises(ConfigError):
            FilterConfig(max_elements_per_page=0)

    def test_rejects_fraction_out_of_range(self):
        with pytest.raises(ConfigError):
            FilterConfig(bottom_band_fraction=1.5)

    @pytest.mark.parametrize("fields", [
        {"bottom_band_fraction": 0},
        {"bottom_band_fraction": 1},
        {"bottom_band_fraction": 1.0},
        {"clustered_reject_fraction": 0},
        {"clustered_reject_fraction": 1.01},
        {"min_elements_for_render_check": 0},
    ])
    def test_rejects_bounds(self, fields):
        with pytest.raises(ConfigError):
            FilterConfig(**fields)

    def test_accepts_inclusive_edges(self):
        config = FilterConfig(bottom_band_fraction=0.99, clustered_reject_fraction=1, min_elements_for_render_check=1)
        assert config.clustered_reject_fraction == 1

    def test_full_share_rejects_only_when_every_element_is_in_band(self):
        config = FilterConfig(clustered_reject_fraction=1.0)
        assert filter_page(page(), [element(i, 910) for i in range(5)], config).reason == CLUSTERED
        assert filter_page(page(), [element(0, 100)] + [element(i, 910) for i in range(1, 5)], config).accepted


    def test_from_dict_carries_seed(self):
        assert FilterConfig.from_dict({"max_elements_per_page": 5}, seed=7) == FilterConfig(5, seed=7)


class TestFilterReport:
    def test_counts_and_merge(self):
        first, second = FilterReport(), FilterReport()
        first.add(PageVerdict(True), 12, 10)
        first.add(PageVerdict(False, CLUSTERED), 4)
        second.add(PageVerdict(False, ERROR_PAGE), 3)
        merged = first.merge(second)
        assert merged.to_dict() == {
            "pages_in": 3,
            "pages_out": 1,
            "elements_in": 19,
            "elements_out": 10,
            "rejected": {CLUSTERED: 1, ERROR_PAGE: 1},
        }
        assert list(merged.to_dict()["rejected"]) == sorted(merged.to_dict()["rejected"])


def reg(text, box=None, point=None, snapshot_id="page", window_index=0):
    return GroundingRecord(snapshot_id, window_index, GroundingKind.REG, text, target_point=point, target_box=box)


class TestLinter:
    def test_zero_area_box(self):
        findings = lint_annotations([reg("Open", Box(500, 500, 500, 500))])
        assert [finding.kind for finding in findings] == [DEGENERATE_BOX]

    def test_duplicate_instruction(self):
        records = [reg("Open the menu", Box(0, 0, 10, 10)), reg("open the  menu.", Box(20, 20, 30, 30))]
        findings = lint_annotations(records)
        assert [(finding.kind, finding.record_index) for finding in findings] == [(DUPLICATE_INSTRUCTION, 1)]

    def test_same_text_in_other_window_is_fine(self):
        records = [reg("Open", Box(0, 0, 10, 10)), reg("Open", Box(0, 0, 10, 10), window_index=1)]
        assert lint_annotations(records) == []

    def test_instruction_names_an_element(self):
        elements = {"page": [Element((0,), "button", "Submit", PixelBox(0, 0, 10, 10))]}
        assert lint_annotations([reg("click submit", point=Point(5, 5))], elements) == []

    def test_instruction_names_no_element(self):
        elements = {"page": [Element((0,), "button", "Submit", PixelBox(0, 0, 10, 10))]}
        findings = lint_annotations([reg("open settings", point=Point(5, 5))], elements)
        assert [finding.kind for finding in findings] == [NO_ELEMENT_OVERLAP]

    def test_out_of_range_in_stored_record(self):
        stored = {"snapshot_id": "page", "window_index": 0, "text": "Open", "target_box": [0, 0, 1200, 10]}
        assert [finding.kind for finding in lint_annotations([stored])] == [OUT_OF_RANGE]
