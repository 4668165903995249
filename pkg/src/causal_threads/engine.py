"""Deterministic synchronous execution of a SystemModel.

Each step: (1) apply disruptions scheduled for the step, (2) evaluate every
transition's conditions against the step-start snapshot (change tests read
the previous step's events), (3) fire all enabled transitions at once. If
two enabled transitions push one dimension to different states, the
earlier-declared one wins and a conflict warning lands in the trace.
Effects that match the current state fire without emitting an event.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .model import Condition, ConditionTest, Disruption, SystemModel

DEFAULT_QUIESCENCE_WINDOW = 5


@dataclass(frozen=True)
class StateChangeEvent:
    step: int
    dimension: str
    from_state: str
    to_state: str
    cause_kind: str  # "transition" | "disruption"
    cause_id: str


@dataclass(frozen=True)
class ConflictWarning:
    step: int
    dimension: str
    winner: str
    loser: str


@dataclass
class Trace:
    """Execution log: initial vector, events, and per-step fired cause ids
    (no-change firings included). Carries the model's system-level dimension
    ids so equilibrium scanning needs no model handle.
    """

    initial: dict[str, str]
    events: list[StateChangeEvent] = field(default_factory=list)
    fired: list[list[str]] = field(default_factory=list)
    conflicts: list[ConflictWarning] = field(default_factory=list)
    system_dimensions: frozenset[str] = frozenset()

    @property
    def steps(self) -> int:
        return len(self.fired)

    def events_at(self, step: int) -> list[StateChangeEvent]:
        return [e for e in self.events if e.step == step]

    def final_vector(self) -> dict[str, str]:
        vector = dict(self.initial)
        for e in self.events:
            vector[e.dimension] = e.to_state
        return vector


@dataclass
class SimulationState:
    vector: dict[str, str]
    step: int
    trace: Trace


def init(model: SystemModel) -> SimulationState:
    """Fresh simulation: every dimension at its initial state, empty trace."""
    vector = {d.id: d.initial_state() for d in model.dimensions}
    trace = Trace(
        initial=dict(vector),
        system_dimensions=frozenset(d.id for d in model.dimensions if d.system_level),
    )
    return SimulationState(vector=vector, step=0, trace=trace)


def _satisfied(
    c: Condition,
    model: SystemModel,
    vector: dict[str, str],
    last_events: Sequence[StateChangeEvent],
) -> bool:
    if c.test == ConditionTest.CHANGED:
        return any(e.dimension == c.dimension for e in last_events)
    if c.test == ConditionTest.CHANGED_TO:
        return any(e.dimension == c.dimension and e.to_state == c.state for e in last_events)
    current = vector[c.dimension]
    if c.test == ConditionTest.IS:
        return current == c.state
    if c.test == ConditionTest.IS_NOT:
        return current != c.state
    dim = model.dimension(c.dimension)
    idx = dim.state_index(current)
    ref = dim.state_index(c.state or "")
    return idx >= ref if c.test == ConditionTest.AT_LEAST else idx <= ref


def step(
    sim: SimulationState,
    model: SystemModel,
    disruptions: Sequence[Disruption] = (),
) -> tuple[SimulationState, list[str]]:
    """Advance one synchronous round; returns the new state and fired ids."""
    now = sim.step
    pre = dict(sim.vector)
    last_events = sim.trace.events_at(now - 1) if now > 0 else []

    vector = dict(pre)
    claimed: dict[str, tuple[str, str]] = {}  # dimension -> (target, cause id)
    events: list[StateChangeEvent] = []
    fired: list[str] = []
    conflicts: list[ConflictWarning] = []

    def apply(cause_kind: str, cause_id: str, dimension: str, target: str) -> None:
        prior = claimed.get(dimension)
        if prior is not None:
            if prior[0] != target:
                conflicts.append(ConflictWarning(now, dimension, prior[1], cause_id))
            return
        claimed[dimension] = (target, cause_id)
        if vector[dimension] != target:
            events.append(StateChangeEvent(now, dimension, vector[dimension], target, cause_kind, cause_id))
            vector[dimension] = target

    for d in disruptions:
        fired.append(d.id)
        for eff in d.effects:
            apply("disruption", d.id, eff.dimension, eff.state)

    # Conditions see the step-start snapshot, not this step's disruptions.
    for t in model.transitions:
        if all(_satisfied(c, model, pre, last_events) for c in t.when):
            fired.append(t.id)
            for eff in t.effects:
                apply("transition", t.id, eff.dimension, eff.state)

    trace = sim.trace
    trace.events.extend(events)
    trace.fired.append(fired)
    trace.conflicts.extend(conflicts)
    return SimulationState(vector=vector, step=now + 1, trace=trace), fired


def run(
    model: SystemModel,
    schedule: Sequence[Disruption],
    max_steps: int,
    quiescence_window: int = DEFAULT_QUIESCENCE_WINDOW,
) -> Trace:
    """Run up to max_steps rounds, stopping early once the system has been
    event-free for a full quiescence window and no scheduled disruption
    remains in the future.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    by_step: dict[int, list[Disruption]] = {}
    for d in schedule:
        by_step.setdefault(d.at_step, []).append(d)
    last_scheduled = max(by_step, default=-1)

    sim = init(model)
    quiet = 0
    for _ in range(max_steps):
        now = sim.step
        sim, _fired = step(sim, model, by_step.get(now, ()))
        quiet = 0 if sim.trace.events_at(now) else quiet + 1
        if quiet >= quiescence_window and now >= last_scheduled:
            break
    return sim.trace


def replay(trace: Trace) -> list[dict[str, str]]:
    """Vectors after each step, recomputed from the event log."""
    vector = dict(trace.initial)
    out = []
    for s in range(trace.steps):
        for e in trace.events_at(s):
            assert vector[e.dimension] == e.from_state
            vector[e.dimension] = e.to_state
        out.append(dict(vector))
    return out


def detect_equilibrium(trace: Trace, window: int) -> list[tuple[int, int]]:
    """Maximal half-open step intervals of length >= window with no
    system-level state change. Subsystem events are allowed inside.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    noisy = {e.step for e in trace.events if e.dimension in trace.system_dimensions}
    intervals = []
    start: Optional[int] = None
    for s in range(trace.steps + 1):
        boundary = s == trace.steps
        if not boundary and s not in noisy:
            if start is None:
                start = s
            continue
        if start is not None and s - start >= window:
            intervals.append((start, s))
        start = None
    return intervals


def serialize_trace(trace: Trace) -> str:
    """Canonical structured-text form of a trace, for golden-file tests."""
    lines = [f"steps: {trace.steps}", "initial:"]
    for dim in sorted(trace.initial):
        lines.append(f'  {dim}: "{trace.initial[dim]}"')
    lines.append("events:")
    for e in trace.events:
        lines.append(
            f'  - {{step: {e.step}, dimension: "{e.dimension}", from: "{e.from_state}",'
            f' to: "{e.to_state}", causeKind: "{e.cause_kind}", causeId: "{e.cause_id}"}}'
        )
    lines.append("fired:")
    for step_fired in trace.fired:
        lines.append("  - [" + ", ".join(f'"{c}"' for c in step_fired) + "]")
    lines.append("conflicts:")
    for c in trace.conflicts:
        lines.append(
            f'  - {{step: {c.step}, dimension: "{c.dimension}", winner: "{c.winner}", loser: "{c.loser}"}}'
        )
    return "\n".join(lines) + "\n"
