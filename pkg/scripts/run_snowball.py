#!/usr/bin/env python3
"""End-to-end demo on the bundled Snowball Earth model.

Runs the simulation, prints the equilibrium intervals, each episode's causal
thread and verification report, any feedback loops, and a short narrative.
"""

import argparse

from causal_threads import (
    classify_links,
    detect_equilibrium,
    detect_feedback_loops,
    parse_file,
    render_overview,
    render_steps,
    run,
    snowball_path,
    trace_thread,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("model", nargs="?", default=snowball_path())
    parser.add_argument("--max-steps", type=int, default=60)
    parser.add_argument("--level", type=int, default=0, help="narrative detail level")
    args = parser.parse_args()

    model, _doc = parse_file(args.model)
    trace = run(model, model.disruptions, args.max_steps)
    intervals = detect_equilibrium(trace, 5)

    print(f"model: {model.name}")
    print(f"steps: {trace.steps}, events: {len(trace.events)}")
    print("equilibrium intervals:", ", ".join(f"[{a},{b})" for a, b in intervals))

    for episode in model.episodes:
        print(f"\n=== {episode.label} ===")
        thread = classify_links(
            trace_thread(trace, model, episode.causal_disruption), intervals)
        print("thread:", " -> ".join(thread.ordered_dimension_path))
        for loop in detect_feedback_loops(thread, model):
            guard = loop.termination_condition
            ends = (f"; ends when not ({guard.dimension} {guard.test.value} {guard.state})"
                    if guard else "")
            print(f"{loop.polarity} loop: {' -> '.join(loop.cycle)}{ends}")
        print(render_overview(model, episode))
        for step in render_steps(model, thread, args.level):
            print(f"  {step.ordinal + 1}. {step.text}")


if __name__ == "__main__":
    main()
