"""Domain types for executable system models and structural validation.

A model is a set of entities grouped into regions. Each entity carries
dimensions (properties or processes) that move between ordered qualitative
states. Transitions fire on conjunctive conditions and push dimensions to
target states; disruptions are externally scheduled state changes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Union


class DimensionKind(str, Enum):
    PROPERTY = "property"
    PROCESS = "process"


class ConditionTest(str, Enum):
    IS = "is"
    IS_NOT = "isNot"
    AT_LEAST = "atLeast"
    AT_MOST = "atMost"
    CHANGED_TO = "changedTo"
    CHANGED = "changed"


@dataclass(frozen=True)
class Region:
    id: str
    label: str


@dataclass(frozen=True)
class Entity:
    id: str
    label: str
    region: str


@dataclass(frozen=True)
class State:
    """One qualitative value of a dimension. Ids are scoped to the dimension."""

    id: str
    label: str


@dataclass(frozen=True)
class Dimension:
    """A property or process of an entity, with a totally ordered state list.

    List order defines the increase/decrease direction used by `atLeast` /
    `atMost` tests and by feedback-loop polarity. The initial state is the
    first state unless `initial` overrides it.
    """

    id: str
    entity: str
    kind: DimensionKind
    states: tuple[State, ...]
    system_level: bool = False
    detail_level: int = 0
    note: Optional[str] = None
    initial: Optional[str] = None

    def state_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.states)

    def state_index(self, state_id: str) -> int:
        for i, s in enumerate(self.states):
            if s.id == state_id:
                return i
        raise KeyError(f"{self.id} has no state {state_id!r}")

    def initial_state(self) -> str:
        return self.initial if self.initial is not None else self.states[0].id


@dataclass(frozen=True)
class Condition:
    dimension: str
    test: ConditionTest
    state: Optional[str] = None  # absent for `changed`


@dataclass(frozen=True)
class Effect:
    dimension: str
    state: str


@dataclass(frozen=True)
class Transition:
    """A proposition-shaped rule: subject + verb + roles, guarded by `when`.

    All conditions are conjunctive; express disjunction as two transitions.
    """

    id: str
    subject: str
    verb: str
    when: tuple[Condition, ...] = ()
    effects: tuple[Effect, ...] = ()
    roles: tuple[tuple[str, str], ...] = ()
    detail_level: int = 0
    note: Optional[str] = None


@dataclass(frozen=True)
class Disruption:
    id: str
    at_step: int
    effects: tuple[Effect, ...]
    label: str = ""


@dataclass(frozen=True)
class EpisodeSpec:
    """Authored discourse unit: an equilibrium phase disrupted by a causal phase."""

    id: str
    label: str
    overview: str
    equilibrium_transitions: tuple[str, ...]
    causal_disruption: str
    expected_thread_dimensions: tuple[str, ...]


@dataclass(frozen=True)
class SystemModel:
    name: str
    regions: tuple[Region, ...] = ()
    entities: tuple[Entity, ...] = ()
    dimensions: tuple[Dimension, ...] = ()
    transitions: tuple[Transition, ...] = ()
    disruptions: tuple[Disruption, ...] = ()
    episodes: tuple[EpisodeSpec, ...] = ()
    layout: tuple[tuple[str, tuple[float, float]], ...] = ()

    def dimension(self, dim_id: str) -> Dimension:
        d = self.dimension_map().get(dim_id)
        if d is None:
            raise KeyError(f"unknown dimension {dim_id!r}")
        return d

    def dimension_map(self) -> dict[str, Dimension]:
        return {d.id: d for d in self.dimensions}

    def transition_map(self) -> dict[str, Transition]:
        return {t.id: t for t in self.transitions}

    def disruption_map(self) -> dict[str, Disruption]:
        return {d.id: d for d in self.disruptions}

    def episode_map(self) -> dict[str, EpisodeSpec]:
        return {e.id: e for e in self.episodes}

    def top_level_elements(self) -> Iterable[tuple[str, object]]:
        for group in (self.regions, self.entities, self.dimensions,
                      self.transitions, self.disruptions, self.episodes):
            for el in group:
                yield el.id, el


Element = Union[Region, Entity, Dimension, Transition, Disruption, EpisodeSpec, State]


def lookup(model: SystemModel, element_id: str) -> Optional[Element]:
    """Resolve an id to its element, or None if nothing carries that id.

    State ids are scoped to their dimension and addressed in qualified form
    ``<dimension id>.<state id>``.
    """
    for eid, el in model.top_level_elements():
        if eid == element_id:
            return el
    if "." in element_id:
        dim_id, _, state_id = element_id.partition(".")
        dim = model.dimension_map().get(dim_id)
        if dim is not None:
            for s in dim.states:
                if s.id == state_id:
                    return s
    return None


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    element_id: str
    message: str


@dataclass
class ValidationReport:
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]

    @property
    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "warning"]

    def ok(self) -> bool:
        return not self.errors


def _conditions_exclusive(a: Condition, b: Condition, dim: Optional[Dimension]) -> bool:
    """Conservative static check: can conditions a and b never hold together?"""
    if a.dimension != b.dimension or dim is None:
        return False
    # changedTo X implies the dimension currently is X.
    def implied_is(c: Condition) -> Optional[str]:
        if c.test in (ConditionTest.IS, ConditionTest.CHANGED_TO):
            return c.state
        return None

    ia, ib = implied_is(a), implied_is(b)
    if ia is not None and ib is not None and ia != ib:
        return True
    for x, y in ((a, b), (b, a)):
        ix = implied_is(x)
        if ix is None:
            continue
        if y.test == ConditionTest.IS_NOT and y.state == ix:
            return True
        try:
            idx = dim.state_index(ix)
            if y.test == ConditionTest.AT_LEAST and idx < dim.state_index(y.state or ""):
                return True
            if y.test == ConditionTest.AT_MOST and idx > dim.state_index(y.state or ""):
                return True
        except KeyError:
            pass
    return False


def _may_fire_together(t1: Transition, t2: Transition, dims: dict[str, Dimension]) -> bool:
    for c1, c2 in itertools.product(t1.when, t2.when):
        if _conditions_exclusive(c1, c2, dims.get(c1.dimension)):
            return False
    return True


def validate_model(model: SystemModel) -> ValidationReport:
    """Structural validation. Errors for broken references and invariant
    violations; warnings for unreachable states, dimensions no condition ever
    reads, and statically possible same-step effect conflicts.
    """
    report = ValidationReport()
    err = lambda eid, msg: report.diagnostics.append(Diagnostic("error", eid, msg))
    warn = lambda eid, msg: report.diagnostics.append(Diagnostic("warning", eid, msg))

    if not model.regions:
        err(model.name or "<model>", "model declares no regions")

    seen: dict[str, str] = {}
    for eid, el in model.top_level_elements():
        kind = type(el).__name__
        if eid in seen:
            err(eid, f"duplicate id: used by both {seen[eid]} and {kind}")
        seen[eid] = kind

    regions = {r.id for r in model.regions}
    entities = {e.id: e for e in model.entities}
    dims = model.dimension_map()
    transitions = model.transition_map()
    disruptions = model.disruption_map()

    for e in model.entities:
        if e.region not in regions:
            err(e.id, f"entity references unknown region {e.region!r}")

    for d in model.dimensions:
        if d.entity not in entities:
            err(d.id, f"dimension references unknown entity {d.entity!r}")
        if not d.states:
            err(d.id, "dimension has no states")
        state_ids = [s.id for s in d.states]
        for sid in {s for s in state_ids if state_ids.count(s) > 1}:
            err(d.id, f"duplicate state id {sid!r} within dimension")
        if d.detail_level < 0:
            err(d.id, "detailLevel must be >= 0")
        if d.initial is not None and d.initial not in state_ids:
            err(d.id, f"initial state {d.initial!r} is not one of the dimension's states")

    def check_condition(owner: str, c: Condition) -> None:
        dim = dims.get(c.dimension)
        if dim is None:
            err(owner, f"condition references unknown dimension {c.dimension!r}")
            return
        if c.test == ConditionTest.CHANGED:
            if c.state is not None:
                err(owner, "`changed` condition must not name a state")
            return
        if c.state is None:
            err(owner, f"`{c.test.value}` condition on {c.dimension!r} names no state")
        elif c.state not in dim.state_ids():
            err(owner, f"condition names state {c.state!r} missing from dimension {c.dimension!r}")

    def check_effects(owner: str, effects: tuple[Effect, ...]) -> None:
        touched: set[str] = set()
        for eff in effects:
            dim = dims.get(eff.dimension)
            if dim is None:
                err(owner, f"effect targets unknown dimension {eff.dimension!r}")
                continue
            if eff.state not in dim.state_ids():
                err(owner, f"effect targets state {eff.state!r} missing from dimension {eff.dimension!r}")
            if eff.dimension in touched:
                err(owner, f"two effects target dimension {eff.dimension!r}")
            touched.add(eff.dimension)

    for t in model.transitions:
        if t.subject not in entities:
            err(t.id, f"transition subject {t.subject!r} is not an entity")
        if not t.effects:
            err(t.id, "transition has no effects")
        for c in t.when:
            check_condition(t.id, c)
        check_effects(t.id, t.effects)
        for role, target in t.roles:
            if target not in entities and target not in dims:
                err(t.id, f"role {role!r} references unknown element {target!r}")

    for d in model.disruptions:
        if d.at_step < 0:
            err(d.id, "atStep must be >= 0")
        if not d.effects:
            err(d.id, "disruption has no effects")
        check_effects(d.id, d.effects)

    for ep in model.episodes:
        if not ep.equilibrium_transitions:
            err(ep.id, "episode lists no equilibrium transitions")
        for tid in ep.equilibrium_transitions:
            if tid not in transitions:
                err(ep.id, f"episode references unknown transition {tid!r}")
        if ep.causal_disruption not in disruptions:
            err(ep.id, f"episode references unknown disruption {ep.causal_disruption!r}")
        if not ep.expected_thread_dimensions:
            err(ep.id, "episode lists no expected thread dimensions")
        for did in ep.expected_thread_dimensions:
            if did not in dims:
                err(ep.id, f"episode expects unknown dimension {did!r}")

    for eid, _pos in model.layout:
        if lookup(model, eid) is None:
            err(eid, "layout hint references unknown element")

    if report.errors:
        return report

    # Warnings below assume references resolve.
    targeted: set[tuple[str, str]] = set()
    for t in model.transitions:
        targeted.update((e.dimension, e.state) for e in t.effects)
    for d in model.disruptions:
        targeted.update((e.dimension, e.state) for e in d.effects)
    for dim in model.dimensions:
        for s in dim.states:
            if s.id != dim.initial_state() and (dim.id, s.id) not in targeted:
                warn(dim.id, f"state {s.id!r} is unreachable: not initial and never targeted")

    read = {c.dimension for t in model.transitions for c in t.when}
    for dim in model.dimensions:
        if dim.id not in read:
            warn(dim.id, "dimension is never referenced by any condition")

    for t1, t2 in itertools.combinations(model.transitions, 2):
        clash = {e.dimension: e.state for e in t1.effects}
        conflicted = sorted(
            e.dimension for e in t2.effects
            if e.dimension in clash and clash[e.dimension] != e.state
        )
        if conflicted and _may_fire_together(t1, t2, dims):
            warn(t1.id, f"may fire alongside {t2.id!r} with conflicting effects on {', '.join(conflicted)}")

    return report
