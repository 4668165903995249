"""Causal threads: link extraction from traces, link classification,
feedback-loop detection, and verification of authored episodes.

A link connects two state-change events when the later event's transition
carries a condition on the earlier event's dimension that the earlier event
established. The dependency is syntactic, not counterfactual: it mirrors the
trigger machinery the engine actually evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .engine import DEFAULT_QUIESCENCE_WINDOW, StateChangeEvent, Trace, detect_equilibrium
from .model import Condition, ConditionTest, EpisodeSpec, SystemModel

CAUSAL = "causal"
NECESSARY_CONDITION = "necessaryCondition"


@dataclass(frozen=True)
class CausalLink:
    from_event: StateChangeEvent
    to_event: StateChangeEvent
    via_transition: str
    classification: Optional[str] = None
    loop_closure: bool = False


@dataclass(frozen=True)
class CausalThread:
    root_cause: str
    events: tuple[StateChangeEvent, ...]
    links: tuple[CausalLink, ...]
    ordered_dimension_path: tuple[str, ...]


@dataclass(frozen=True)
class FeedbackLoop:
    cycle: tuple[str, ...]  # first and last dimension identical
    polarity: str  # "positive" | "negative"
    termination_condition: Optional[Condition]


def _supports(earlier: StateChangeEvent, condition: Condition, later_step: int,
              last_on_dim: Optional[StateChangeEvent]) -> bool:
    if condition.dimension != earlier.dimension:
        return False
    if condition.test == ConditionTest.CHANGED:
        return earlier.step == later_step - 1
    if condition.test == ConditionTest.CHANGED_TO:
        return earlier.step == later_step - 1 and earlier.to_state == condition.state
    # Value tests read the step-start snapshot, so only the event that last
    # set the dimension before the firing step can be the support.
    return last_on_dim is earlier


def build_links(trace: Trace, model: SystemModel) -> list[CausalLink]:
    """All dependency links between events in the trace, in event order."""
    transitions = model.transition_map()
    links: list[CausalLink] = []
    for j, to_event in enumerate(trace.events):
        if to_event.cause_kind != "transition":
            continue
        transition = transitions[to_event.cause_id]
        for condition in transition.when:
            last_on_dim = None
            for e in trace.events:
                if e.dimension == condition.dimension and e.step < to_event.step:
                    last_on_dim = e
            for i, from_event in enumerate(trace.events):
                if i == j or from_event.step >= to_event.step:
                    continue
                if _supports(from_event, condition, to_event.step, last_on_dim):
                    links.append(CausalLink(from_event, to_event, transition.id))
    # One link per (from, to, transition) even if several conditions match.
    seen: set[tuple[int, int, str]] = set()
    unique = []
    for link in links:
        key = (trace.events.index(link.from_event), trace.events.index(link.to_event),
               link.via_transition)
        if key not in seen:
            seen.add(key)
            unique.append(link)
    return unique


def trace_thread(trace: Trace, model: SystemModel, root: str) -> CausalThread:
    """Transitive closure of dependency links from the root disruption's
    events. Raises ValueError if the root never fired in the trace.
    """
    root_events = [e for e in trace.events
                   if e.cause_kind == "disruption" and e.cause_id == root]
    if not any(root in fired for fired in trace.fired):
        raise ValueError(f"disruption {root!r} never fired in this trace")

    all_links = build_links(trace, model)
    reachable: list[StateChangeEvent] = list(root_events)
    included: list[CausalLink] = []
    changed = True
    while changed:
        changed = False
        for link in all_links:
            if link in included or link.from_event not in reachable:
                continue
            included.append(link)
            if link.to_event not in reachable:
                reachable.append(link.to_event)
            changed = True

    events = tuple(sorted(reachable, key=lambda e: (e.step, trace.events.index(e))))
    path: list[str] = []
    first_event: dict[str, StateChangeEvent] = {}
    for e in events:
        if e.dimension not in path:
            path.append(e.dimension)
            first_event[e.dimension] = e
    links = tuple(
        replace(link, loop_closure=first_event[link.to_event.dimension] is not link.to_event)
        for link in sorted(included, key=lambda l: (l.to_event.step, l.from_event.step))
    )
    return CausalThread(root_cause=root, events=events, links=links,
                        ordered_dimension_path=tuple(path))


def _inside(step: int, intervals: Sequence[tuple[int, int]]) -> bool:
    return any(start <= step < end for start, end in intervals)


def classify(links: Sequence[CausalLink],
             intervals: Sequence[tuple[int, int]]) -> list[CausalLink]:
    """Necessary-condition links live wholly inside equilibrium; everything
    else is causal. Every link gets exactly one of the two labels.
    """
    return [
        replace(
            link,
            classification=NECESSARY_CONDITION
            if _inside(link.from_event.step, intervals) and _inside(link.to_event.step, intervals)
            else CAUSAL,
        )
        for link in links
    ]


def classify_links(thread: CausalThread,
                   equilibrium_intervals: Sequence[tuple[int, int]]) -> CausalThread:
    return replace(thread, links=tuple(classify(thread.links, equilibrium_intervals)))


def _dimension_edges(thread: CausalThread) -> dict[tuple[str, str], list[CausalLink]]:
    edges: dict[tuple[str, str], list[CausalLink]] = {}
    for link in thread.links:
        edges.setdefault((link.from_event.dimension, link.to_event.dimension), []).append(link)
    return edges


def _simple_cycles(nodes: list[str], edges: set[tuple[str, str]]) -> list[list[str]]:
    """All simple cycles, each rooted at its smallest node, by plain DFS.
    Fine for the dimension graphs this sees (a handful of nodes).
    """
    cycles: list[list[str]] = []
    order = {n: i for i, n in enumerate(sorted(nodes))}

    def walk(start: str, node: str, path: list[str]) -> None:
        for a, b in sorted(edges):
            if a != node or order[b] < order[start]:
                continue
            if b == start:
                cycles.append(path + [start])
            elif b not in path:
                walk(start, b, path + [b])

    for start in sorted(nodes):
        walk(start, start, [start])
    return cycles


def _direction(event: StateChangeEvent, model: SystemModel) -> int:
    dim = model.dimension(event.dimension)
    return 1 if dim.state_index(event.to_state) > dim.state_index(event.from_state) else -1


def detect_feedback_loops(thread: CausalThread, model: SystemModel) -> list[FeedbackLoop]:
    """Every directed cycle in the thread's dimension-level graph. Polarity
    multiplies each link's direction gain around the cycle; the termination
    condition is the unique guard on a dimension outside the cycle, if any.
    """
    edges = _dimension_edges(thread)
    nodes = sorted({d for pair in edges for d in pair})
    loops = []
    transitions = model.transition_map()
    for cycle in _simple_cycles(nodes, set(edges)):
        gain = 1
        cycle_transitions: set[str] = set()
        for a, b in zip(cycle, cycle[1:]):
            link = edges[(a, b)][0]
            gain *= _direction(link.from_event, model) * _direction(link.to_event, model)
            cycle_transitions.update(l.via_transition for l in edges[(a, b)])
        members = set(cycle)
        guards = {
            (c.dimension, c.test, c.state): c
            for tid in sorted(cycle_transitions)
            for c in transitions[tid].when
            if c.dimension not in members
        }
        termination = next(iter(guards.values())) if len(guards) == 1 else None
        loops.append(FeedbackLoop(
            cycle=tuple(cycle),
            polarity="positive" if gain > 0 else "negative",
            termination_condition=termination,
        ))
    return loops


@dataclass(frozen=True)
class EpisodeReport:
    equilibrium_verified: bool
    thread_path_matches: bool
    diffs: tuple[str, ...]


def check_episode(
    model: SystemModel,
    episode: EpisodeSpec,
    trace: Trace,
    window: int = DEFAULT_QUIESCENCE_WINDOW,
) -> EpisodeReport:
    """Verify an authored episode against an execution: an equilibrium
    interval must run up to the disruption step, and the realized thread
    path must equal the authored one.
    """
    disruption = model.disruption_map()[episode.causal_disruption]
    if not any(disruption.id in fired for fired in trace.fired):
        raise ValueError(f"trace does not cover disruption {disruption.id!r}")

    intervals = detect_equilibrium(trace, window)
    at = disruption.at_step
    equilibrium_verified = any(start < at <= end for start, end in intervals)

    thread = trace_thread(trace, model, disruption.id)
    expected = episode.expected_thread_dimensions
    actual = thread.ordered_dimension_path
    diffs: list[str] = []
    for i in range(max(len(expected), len(actual))):
        want = expected[i] if i < len(expected) else "<absent>"
        got = actual[i] if i < len(actual) else "<absent>"
        if want != got:
            diffs.append(f"position {i}: expected {want}, got {got}")
    return EpisodeReport(
        equilibrium_verified=equilibrium_verified,
        thread_path_matches=not diffs,
        diffs=tuple(diffs),
    )


def serialize_thread(thread: CausalThread) -> str:
    """Canonical text form for golden tests."""
    lines = [f'root: "{thread.root_cause}"',
             "path: [" + ", ".join(f'"{d}"' for d in thread.ordered_dimension_path) + "]",
             "links:"]
    for link in thread.links:
        lines.append(
            f'  - {{from: "{link.from_event.dimension}@{link.from_event.step}",'
            f' to: "{link.to_event.dimension}@{link.to_event.step}",'
            f' via: "{link.via_transition}",'
            f' classification: "{link.classification or "unset"}",'
            f' loopClosure: {"true" if link.loop_closure else "false"}}}'
        )
    return "\n".join(lines) + "\n"
