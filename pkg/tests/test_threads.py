from dataclasses import replace

import pytest

import toys
from causal_threads.engine import detect_equilibrium, run
from causal_threads.model import EpisodeSpec
from causal_threads.threads import (
    CAUSAL,
    NECESSARY_CONDITION,
    build_links,
    check_episode,
    classify,
    classify_links,
    detect_feedback_loops,
    serialize_thread,
    trace_thread,
)


def run_toy(m, max_steps=10):
    return run(m, m.disruptions, max_steps, quiescence_window=2)


def test_chain_thread_has_two_links():
    m = toys.chain_model()
    trace = run_toy(m)
    thread = trace_thread(trace, m, "kick")
    assert thread.ordered_dimension_path == ("a", "b", "c")
    assert len(thread.links) == 2
    assert [(l.from_event.dimension, l.to_event.dimension, l.via_transition)
            for l in thread.links] == [("a", "b", "t_ab"), ("b", "c", "t_bc")]
    assert all(not l.loop_closure for l in thread.links)

    want_events, want_path = toys.oracle_thread(trace, m, "kick")
    assert {trace.events.index(e) for e in thread.events} == want_events
    assert list(thread.ordered_dimension_path) == want_path


def test_unrelated_events_stay_outside_the_thread():
    m = toys.chain_model()
    bystander = toys.dim("z", ["z0", "z1"])
    m = replace(
        m,
        dimensions=m.dimensions + (bystander,),
        disruptions=m.disruptions + (
            replace(m.disruptions[0], id="other", at_step=1,
                    effects=(toys.Effect("z", "z1"),)),),
    )
    trace = run_toy(m)
    thread = trace_thread(trace, m, "kick")
    assert "z" not in thread.ordered_dimension_path
    other = trace_thread(trace, m, "other")
    assert other.ordered_dimension_path == ("z",)
    assert other.links == ()


def test_value_condition_links_to_last_setter():
    # t_b keeps firing while a stays a1; every firing links back to the one
    # event that last set a.
    m = toys.model(
        [toys.dim("a", ["a0", "a1"]), toys.dim("b", ["b0", "b1", "b2"])],
        [toys.rule("t_b", [toys.is_("a", "a1")], "b", "b1"),
         toys.rule("t_b2", [toys.changed_to("b", "b1")], "b", "b2")],
        [toys.kick("a", "a1")],
    )
    trace = run_toy(m)
    links = build_links(trace, m)
    a_event = trace.events[0]
    for link in links:
        if link.via_transition == "t_b":
            assert link.from_event is a_event
    got = {(trace.events.index(l.from_event), trace.events.index(l.to_event),
            l.via_transition) for l in links}
    assert got == toys.oracle_links(trace, m)


def test_trace_thread_unknown_root():
    m = toys.chain_model()
    trace = run_toy(m)
    with pytest.raises(ValueError):
        trace_thread(trace, m, "never_scheduled")


def test_loop_closure_flags_revisited_dimensions():
    m = toys.mutual_loop_model()
    trace = run(m, m.disruptions, 6, quiescence_window=2)
    thread = trace_thread(trace, m, "kick")
    assert thread.ordered_dimension_path == ("p", "q")
    first_two, rest = thread.links[:1], thread.links[1:]
    assert all(not l.loop_closure for l in first_two)
    assert all(l.loop_closure for l in rest)


def test_classification_dichotomy():
    m = toys.chain_model()
    trace = run_toy(m)
    links = build_links(trace, m)
    inside = classify(links, [(0, trace.steps)])
    assert all(l.classification == NECESSARY_CONDITION for l in inside)
    outside = classify(links, [])
    assert all(l.classification == CAUSAL for l in outside)
    mixed = classify(links, [(0, 2)])  # a->b inside, b->c crosses the edge
    assert [l.classification for l in mixed] == [NECESSARY_CONDITION, CAUSAL]


def test_detected_cycles_match_exhaustive_enumeration():
    m = toys.mutual_loop_model()
    trace = run(m, m.disruptions, 6, quiescence_window=2)
    thread = trace_thread(trace, m, "kick")
    loops = detect_feedback_loops(thread, m)
    assert len(loops) == 1
    assert loops[0].cycle == ("p", "q", "p")
    edges = {(l.from_event.dimension, l.to_event.dimension) for l in thread.links}
    assert toys.oracle_cycles(edges) == {("p", "q")}


def test_loop_polarity_and_missing_termination():
    m = toys.mutual_loop_model()
    trace = run(m, m.disruptions, 6, quiescence_window=2)
    loops = detect_feedback_loops(trace_thread(trace, m, "kick"), m)
    # first p-event rises, first q-event rises, but the return edge drops p
    assert loops[0].polarity == "negative"
    assert loops[0].termination_condition is None


def test_termination_condition_is_the_unique_outside_guard():
    guard = toys.is_("fuel", "full")
    m = toys.model(
        [toys.dim("p", ["pa", "pb"]), toys.dim("q", ["qa", "qb"]),
         toys.dim("fuel", ["full", "empty"])],
        [toys.rule("t1", [toys.changed_to("p", "pb"), guard], "q", "qb"),
         toys.rule("t2", [toys.changed_to("q", "qb")], "p", "pa"),
         toys.rule("t3", [toys.changed_to("p", "pa"), guard], "q", "qa"),
         toys.rule("t4", [toys.changed_to("q", "qa")], "p", "pb")],
        [toys.kick("p", "pb")],
    )
    trace = run(m, m.disruptions, 6, quiescence_window=2)
    loops = detect_feedback_loops(trace_thread(trace, m, "kick"), m)
    assert len(loops) == 1
    assert loops[0].termination_condition == guard


def test_check_episode_reports_match_and_diffs():
    m = toys.chain_model()
    trace = run_toy(m, max_steps=12)
    good = EpisodeSpec(id="ep", label="", overview="",
                       equilibrium_transitions=("t_ab",), causal_disruption="kick",
                       expected_thread_dimensions=("a", "b", "c"))
    report = check_episode(m, good, trace, window=2)
    # the kick lands at step 0, so no equilibrium precedes it
    assert not report.equilibrium_verified
    assert report.thread_path_matches and report.diffs == ()

    bad = replace(good, expected_thread_dimensions=("a", "c"))
    report = check_episode(m, bad, trace, window=2)
    assert not report.thread_path_matches
    assert report.diffs == ("position 1: expected c, got b",
                            "position 2: expected <absent>, got c")


def test_check_episode_verifies_preceding_equilibrium():
    m = toys.chain_model()
    late = replace(m, disruptions=(replace(m.disruptions[0], at_step=4),))
    trace = run(late, late.disruptions, 15, quiescence_window=3)
    ep = EpisodeSpec(id="ep", label="", overview="",
                     equilibrium_transitions=("t_ab",), causal_disruption="kick",
                     expected_thread_dimensions=("a", "b", "c"))
    report = check_episode(late, ep, trace, window=3)
    assert report.equilibrium_verified

    with pytest.raises(KeyError):
        check_episode(m, replace(ep, causal_disruption="ghost"), trace)


def test_serialize_thread_shape():
    m = toys.chain_model()
    trace = run_toy(m)
    thread = classify_links(trace_thread(trace, m, "kick"),
                            detect_equilibrium(trace, 2))
    text = serialize_thread(thread)
    assert text.splitlines()[0] == 'root: "kick"'
    assert 'path: ["a", "b", "c"]' in text
    assert text.count("loopClosure: false") == 2
