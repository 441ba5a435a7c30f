"""
Annotator Module

This module turns explored before/after screen pairs into instruction
grounding (IG) data: it builds Set-of-Mark annotation requests, sends them
to a completion client with retries, and converts the returned
sub-instructions into grounding records.

Classes:
- AnnotatorConfig: Prompt template, retry and concurrency settings.
- AnnotationRequest: What the completion service sees for one step.
- AnnotationResponse: The sub-instruction it returned.
- AnnotationTask: A request plus the acted element it describes.

Functions:
- annotate: Runs one request with retries.
- annotate_many: Runs requests with a bounded number in flight.
- build_tasks: Annotation tasks for the steps of a trajectory.
- ig_record: The IG grounding record of an answered task.

Dependencies:
- joblib: Thread-backed parallel client calls.
"""
import logging
import time
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from joblib import Parallel, delayed

from guicorpus.annotator.clients import CompletionClient
from guicorpus.annotator.overlay import SomOverlay, build_overlay
from guicorpus.corpus_filter.page_filter import FilterConfig, cap_elements
from guicorpus.exceptions import AnnotationResponseError, ClientError, ConfigError, DataError, TransientClientError
from guicorpus.explorer.environment import GuiEnvironment
from guicorpus.explorer.explorer import Trajectory, screenshot_ref
from guicorpus.page_segmenter.records import GroundingKind, GroundingRecord
from guicorpus.page_segmenter.segmenter import DEFAULT_WINDOW_SIZE, plan_windows, remap_element, window_size_for
from guicorpus.snapshot_ingest.extractor import Element, extract_elements

logger = logging.getLogger(__name__)

DEFAULT_PROMPT_TEMPLATE = (
    "High-level task: {instruction}\nBefore: {before_ref}\nAfter: {after_ref}\n"
    "Marked elements:\n{mark_table}\n"
    "The action was performed on mark {acted_mark}. Describe this step as one short sub-instruction."
)


@dataclass(frozen=True)
class AnnotatorConfig:
    prompt_template: str = DEFAULT_PROMPT_TEMPLATE
    max_retries: int = 3
    backoff_base: float = 0.5
    max_response_chars: int = 512
    max_in_flight: int = 4

    def __post_init__(self):
        if self.max_retries < 0:
            raise ConfigError("annotator.max_retries must be >= 0")
        if self.max_in_flight < 1:
            raise ConfigError("annotator.max_in_flight must be >= 1")
        if self.max_response_chars < 1:
            raise ConfigError("annotator.max_response_chars must be >= 1")

    @classmethod
    def from_dict(cls, section: Dict[str, Any]) -> "AnnotatorConfig":
        return cls(
            prompt_template=section.get("prompt_template", DEFAULT_PROMPT_TEMPLATE),
            max_retries=section.get("max_retries", 3),
            backoff_base=section.get("backoff_base", 0.5),
            max_response_chars=section.get("max_response_chars", 512),
            max_in_flight=section.get("max_in_flight", 4),
        )


@dataclass(frozen=True)
class AnnotationRequest:
    high_level_instruction: str
    before_ref: str
    after_ref: str
    overlay: SomOverlay
    acted_mark: int

    def __post_init__(self):
        if self.acted_mark not in self.overlay.indices:
            raise DataError(f"Acted mark {self.acted_mark} is not on the overlay")

    def to_document(self, prompt_template: str = DEFAULT_PROMPT_TEMPLATE) -> Dict[str, Any]:
        """
        Builds the request document sent to the completion service.
        """
        fields = {
            "instruction": self.high_level_instruction,
            "before_ref": self.before_ref,
            "after_ref": self.after_ref,
            "acted_mark": self.acted_mark,
            "acted_label": self.overlay.mark(self.acted_mark).label,
            "mark_table": self.overlay.table(),
        }
        try:
            prompt = prompt_template.format(**fields)
        except (KeyError, IndexError) as error:
            raise ConfigError(f"Prompt template refers to unknown field {error}") from error
        return dict(fields, marks=self.overlay.to_dict()["marks"], prompt=prompt)


@dataclass(frozen=True)
class AnnotationResponse:
    sub_instruction: str


@dataclass(frozen=True)
class AnnotationTask:
    request: AnnotationRequest
    snapshot_id: str
    page_size: Tuple[int, int]
    window_size: Tuple[int, int]
    element: Element


def parse_response(text: str, max_chars: int) -> AnnotationResponse:
    sub_instruction = " ".join(str(text).split())
    if not sub_instruction:
        raise AnnotationResponseError("Empty annotation response")
    if len(sub_instruction) > max_chars:
        raise AnnotationResponseError(f"Annotation response has {len(sub_instruction)} characters, "
                                      f"limit is {max_chars}")
    return AnnotationResponse(sub_instruction)


def annotate(request: AnnotationRequest, client: CompletionClient, config: AnnotatorConfig = AnnotatorConfig(),
             sleep: Callable[[float], None] = time.sleep) -> AnnotationResponse:
    """
    Asks the completion service for the sub-instruction of one step.

    Transient failures are retried with exponential backoff
    (backoff_base * 2 ** attempt seconds), logging a warning per retry.

    :param request: The request; it is not modified.
    :param client: Completion client.
    :param config: Annotator settings.
    :param sleep: Delay function, replaceable in tests.
    :return: The trimmed sub-instruction.
    :raises ClientError: If the client still fails after max_retries retries.
    :raises AnnotationResponseError: If the response is empty or too long.
    """
    document = request.to_document(config.prompt_template)
    for attempt in range(config.max_retries + 1):
        try:
            text = client.complete(document)
            break
        except TransientClientError as error:
            if attempt == config.max_retries:
                raise ClientError(f"Completion failed after {config.max_retries} retries: {error}") from error
            delay = config.backoff_base * 2 ** attempt
            logger.warning("Completion attempt %d failed (%s), retrying in %.2fs", attempt + 1, error, delay)
            sleep(delay)
    return parse_response(text, config.max_response_chars)


def annotate_many(requests: Sequence[AnnotationRequest], client: CompletionClient,
                  config: AnnotatorConfig = AnnotatorConfig(),
                  sleep: Callable[[float], None] = time.sleep) -> List[AnnotationResponse]:
    """
    Annotates requests with at most max_in_flight client calls at a time.

    :return: Responses in request order.
    """
    if not requests:
        return []
    return Parallel(n_jobs=config.max_in_flight, backend="threading")(
        delayed(annotate)(request, client, config, sleep) for request in requests)


def _overlay_elements(elements: List[Element], acted: Element, filter_config: FilterConfig,
                      page_key: str) -> List[Element]:
    capped = cap_elements(elements, filter_config, page_key)
    if acted in capped:
        return capped
    replaced = next(element for element in reversed(capped) if element != acted)
    kept = [element for element in capped if element != replaced] + [acted]
    return sorted(kept, key=elements.index)


def build_tasks(env: GuiEnvironment, trajectory: Trajectory, instruction: str,
                filter_config: Optional[FilterConfig] = None,
                window_size: Tuple[int, int] = DEFAULT_WINDOW_SIZE) -> List[AnnotationTask]:
    """
    Builds annotation tasks for the steps of a trajectory.

    Steps whose acted node is not an extracted element (for example a
    hardware back press on the root) carry no mark and are skipped.

    :param env: The environment the trajectory was taken in.
    :param trajectory: The trajectory.
    :param instruction: The high-level task instruction.
    :param filter_config: Element cap applied to the overlay.
    :param window_size: Window of web pages; other platforms use their viewport.
    :return: One task per markable step.
    """
    filter_config = filter_config or FilterConfig()
    tasks = []
    for step in trajectory.steps:
        snapshot = env.states[step.state]
        elements = extract_elements(snapshot)
        acted = next((element for element in elements if element.node_path == step.node_path), None)
        if acted is None:
            logger.debug("Step on %s%s acts on no element, skipped", step.state, list(step.node_path))
            continue
        overlay = build_overlay(_overlay_elements(elements, acted, filter_config, snapshot.id))
        request = AnnotationRequest(
            high_level_instruction=instruction,
            before_ref=screenshot_ref(env, step.state),
            after_ref=screenshot_ref(env, step.next_state),
            overlay=overlay,
            acted_mark=overlay.mark_for(acted.node_path).index,
        )
        tasks.append(AnnotationTask(request, snapshot.id, snapshot.page_size,
                                    window_size_for(snapshot, window_size), acted))
    return tasks


def ig_record(task: AnnotationTask, response: AnnotationResponse,
              min_visible_fraction: float = 0.5) -> Optional[GroundingRecord]:
    """
    Builds the IG record of an answered task: the sub-instruction grounded to
    the acted element's centre, in the first window that shows the element.
    """
    for window in plan_windows(task.page_size, task.window_size):
        box = remap_element(task.element, window, min_visible_fraction)
        if box is not None:
            return GroundingRecord(
                snapshot_id=task.snapshot_id,
                window_index=window.index,
                kind=GroundingKind.IG,
                text=response.sub_instruction,
                target_point=box.center(),
                node_path=task.element.node_path,
            )
    return None
