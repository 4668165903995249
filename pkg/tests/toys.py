"""Hand-built toy models and independent brute-force oracles for the tests.

The oracles re-derive results from first principles (literal pairwise scans,
exhaustive enumeration) so they stay independent of the code paths they
check.
"""

from __future__ import annotations

import random

from causal_threads.engine import Trace
from causal_threads.model import (
    Condition,
    ConditionTest,
    Dimension,
    DimensionKind,
    Disruption,
    Effect,
    Entity,
    Region,
    State,
    SystemModel,
    Transition,
)

REGION = Region(id="r", label="Region")
ENTITY = Entity(id="obj", label="Object", region="r")


def dim(dim_id: str, states: list[str], detail: int = 0, system: bool = False,
        initial: str | None = None) -> Dimension:
    return Dimension(
        id=dim_id, entity="obj", kind=DimensionKind.PROPERTY,
        states=tuple(State(id=s, label=s.upper()) for s in states),
        detail_level=detail, system_level=system, initial=initial,
    )


def rule(rule_id: str, when: list[Condition], dimension: str, state: str,
         detail: int = 0, verb: str = "moves") -> Transition:
    return Transition(id=rule_id, subject="obj", verb=verb, when=tuple(when),
                      effects=(Effect(dimension, state),), detail_level=detail)


def changed_to(dimension: str, state: str) -> Condition:
    return Condition(dimension, ConditionTest.CHANGED_TO, state)


def is_(dimension: str, state: str) -> Condition:
    return Condition(dimension, ConditionTest.IS, state)


def model(dims: list[Dimension], rules: list[Transition],
          disruptions: list[Disruption] = (), name: str = "toy") -> SystemModel:
    return SystemModel(name=name, regions=(REGION,), entities=(ENTITY,),
                       dimensions=tuple(dims), transitions=tuple(rules),
                       disruptions=tuple(disruptions))


def kick(dimension: str, state: str, at_step: int = 0) -> Disruption:
    return Disruption(id="kick", at_step=at_step,
                      effects=(Effect(dimension, state),), label="kick")


def chain_model() -> SystemModel:
    """a -> b -> c, driven by a disruption on a."""
    return model(
        [dim("a", ["a0", "a1"]), dim("b", ["b0", "b1"]), dim("c", ["c0", "c1"])],
        [rule("t_ab", [changed_to("a", "a1")], "b", "b1"),
         rule("t_bc", [changed_to("b", "b1")], "c", "c1")],
        [kick("a", "a1")],
    )


def conflict_model() -> SystemModel:
    """Two transitions enabled together pushing x to different states."""
    return model(
        [dim("trigger", ["off", "on"]), dim("x", ["x0", "x1", "x2"])],
        [rule("first", [is_("trigger", "on")], "x", "x1"),
         rule("second", [is_("trigger", "on")], "x", "x2")],
        [kick("trigger", "on")],
    )


def elision_model() -> SystemModel:
    """Chain a -> m -> c -> d with a detail-level-2 middle dimension."""
    return model(
        [dim("a", ["a0", "a1"]), dim("m", ["m0", "m1"], detail=2),
         dim("c", ["c0", "c1"]), dim("d", ["d0", "d1"])],
        [rule("t_am", [changed_to("a", "a1")], "m", "m1"),
         rule("t_mc", [changed_to("m", "m1")], "c", "c1"),
         rule("t_cd", [changed_to("c", "c1")], "d", "d1")],
        [kick("a", "a1")],
    )


def mutual_loop_model() -> SystemModel:
    """Two dimensions that keep re-triggering each other: one 2-cycle."""
    return model(
        [dim("p", ["pa", "pb"]), dim("q", ["qa", "qb"])],
        [rule("t1", [changed_to("p", "pb")], "q", "qb"),
         rule("t2", [changed_to("q", "qb")], "p", "pa"),
         rule("t3", [changed_to("p", "pa")], "q", "qa"),
         rule("t4", [changed_to("q", "qa")], "p", "pb")],
        [kick("p", "pb")],
    )


def random_model(seed: int) -> tuple[SystemModel, Disruption]:
    """Small random model plus the disruption that drives it."""
    rng = random.Random(seed)
    n_dims = rng.randint(2, 6)
    dims = []
    for i in range(n_dims):
        n_states = rng.randint(2, 3)
        dims.append(dim(f"d{i}", [f"d{i}s{j}" for j in range(n_states)]))
    rules = []
    tests = [ConditionTest.IS, ConditionTest.IS_NOT, ConditionTest.AT_LEAST,
             ConditionTest.AT_MOST, ConditionTest.CHANGED_TO, ConditionTest.CHANGED]
    for i in range(rng.randint(1, 7)):
        when = []
        for _ in range(rng.randint(1, 2)):
            d = rng.choice(dims)
            test = rng.choice(tests)
            state = None if test == ConditionTest.CHANGED else rng.choice(d.states).id
            when.append(Condition(d.id, test, state))
        target = rng.choice(dims)
        rules.append(rule(f"t{i}", when, target.id, rng.choice(target.states).id))
    start = dims[0]
    disruption = kick(start.id, start.states[-1].id, at_step=rng.randint(0, 1))
    return model(dims, rules, [disruption]), disruption


# --- oracles ----------------------------------------------------------------

def oracle_links(trace: Trace, m: SystemModel) -> set[tuple[int, int, str]]:
    """Literal O(n^2) pairwise dependency scan over the event log. Returns
    (from index, to index, transition id) triples.
    """
    events = trace.events
    transitions = {t.id: t for t in m.transitions}
    found = set()
    for j, later in enumerate(events):
        if later.cause_kind != "transition":
            continue
        t = transitions[later.cause_id]
        for i, earlier in enumerate(events):
            if earlier.step >= later.step:
                continue
            for c in t.when:
                if c.dimension != earlier.dimension:
                    continue
                if c.test in (ConditionTest.CHANGED, ConditionTest.CHANGED_TO):
                    ok = earlier.step == later.step - 1 and (
                        c.test == ConditionTest.CHANGED or earlier.to_state == c.state)
                else:
                    # the support is whichever event last wrote the dimension
                    newest = max(
                        (k for k, e in enumerate(events)
                         if e.dimension == c.dimension and e.step < later.step),
                        key=lambda k: (events[k].step, k),
                    )
                    ok = newest == i
                if ok:
                    found.add((i, j, t.id))
    return found


def oracle_thread(trace: Trace, m: SystemModel, root: str) -> tuple[set[int], list[str]]:
    """Reachable closure from the root's events, recomputed from scratch.
    Returns (event indices, dimension path in first-reach order).
    """
    events = trace.events
    links = oracle_links(trace, m)
    reachable = {i for i, e in enumerate(events)
                 if e.cause_kind == "disruption" and e.cause_id == root}
    while True:
        extra = {j for i, j, _t in links if i in reachable} - reachable
        if not extra:
            break
        reachable |= extra
    path = []
    for i in sorted(reachable):
        if events[i].dimension not in path:
            path.append(events[i].dimension)
    return reachable, path


def oracle_cycles(edges: set[tuple[str, str]]) -> set[tuple[str, ...]]:
    """Exhaustive simple-cycle enumeration via networkx, rotation-normalized
    to start at the smallest node.
    """
    import networkx as nx

    g = nx.DiGraph()
    g.add_edges_from(edges)
    out = set()
    for cycle in nx.simple_cycles(g):
        pivot = cycle.index(min(cycle))
        out.add(tuple(cycle[pivot:] + cycle[:pivot]))
    return out
