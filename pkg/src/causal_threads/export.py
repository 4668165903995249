"""Graph (DOT dialect) and timeline exports for external tools.

Node and edge order follow declaration order, so exports of equal inputs
are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .model import EpisodeSpec, SystemModel
from .threads import CausalThread


@dataclass(frozen=True)
class HighlightSpec:
    """What an episode lights up: red equilibrium transitions, green causal
    edges, and the grayed complement of every state those touch.
    """

    equilibrium_transition_ids: tuple[str, ...] = ()
    causal_link_edges: tuple[tuple[str, str], ...] = ()
    grayed_state_ids: tuple[str, ...] = ()
    highlighted_transition_ids: tuple[str, ...] = ()


def highlight_for_episode(model: SystemModel, episode: EpisodeSpec,
                          thread: CausalThread) -> HighlightSpec:
    """Compute the highlight: grayed states are all states minus those named
    in any highlighted transition's conditions or effects.
    """
    causal_edges: list[tuple[str, str]] = []
    causal_transitions: list[str] = []
    for link in thread.links:
        edge = (link.from_event.dimension, link.to_event.dimension)
        if edge not in causal_edges:
            causal_edges.append(edge)
        if link.via_transition not in causal_transitions:
            causal_transitions.append(link.via_transition)

    highlighted = list(episode.equilibrium_transitions) + [
        t for t in causal_transitions if t not in episode.equilibrium_transitions
    ]
    kept: set[str] = set()
    transitions = model.transition_map()
    for tid in highlighted:
        t = transitions[tid]
        for c in t.when:
            if c.state is not None:
                kept.add(f"{c.dimension}.{c.state}")
        for e in t.effects:
            kept.add(f"{e.dimension}.{e.state}")
    grayed = tuple(
        f"{d.id}.{s.id}"
        for d in model.dimensions for s in d.states
        if f"{d.id}.{s.id}" not in kept
    )
    return HighlightSpec(
        equilibrium_transition_ids=tuple(episode.equilibrium_transitions),
        causal_link_edges=tuple(causal_edges),
        grayed_state_ids=grayed,
        highlighted_transition_ids=tuple(highlighted),
    )


def _quote(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


def export_graph(model: SystemModel, highlight: Optional[HighlightSpec] = None) -> str:
    """DOT text: one cluster per region, one node per dimension listing its
    states. Equilibrium edges red, causal edges green, grayed states gray.
    """
    hl = highlight or HighlightSpec()
    grayed = set(hl.grayed_state_ids)
    equilibrium = set(hl.equilibrium_transition_ids)
    causal_edges = set(hl.causal_link_edges)
    layout = dict(model.layout)

    lines = ["digraph model {", "  rankdir=LR;", "  node [shape=plaintext];"]
    entity_region = {e.id: e.region for e in model.entities}
    for region in model.regions:
        lines.append(f"  subgraph cluster_{region.id} {{")
        lines.append(f"    label={_quote(region.label)};")
        for dim in model.dimensions:
            if entity_region.get(dim.entity) != region.id:
                continue
            cells = []
            for s in dim.states:
                qualified = f"{dim.id}.{s.id}"
                if qualified in grayed:
                    cells.append(f'<TD><FONT COLOR="gray">{s.label}</FONT></TD>')
                else:
                    cells.append(f"<TD>{s.label}</TD>")
            label = (
                "<<TABLE BORDER=\"0\" CELLBORDER=\"1\" CELLSPACING=\"0\">"
                f"<TR><TD COLSPAN=\"{max(len(cells), 1)}\"><B>{dim.id}</B></TD></TR>"
                "<TR>" + "".join(cells) + "</TR></TABLE>>"
            )
            attrs = [f"label={label}"]
            if dim.id in layout:
                x, y = layout[dim.id]
                attrs.append(f'pos="{x},{y}"')
            lines.append(f"    {dim.id} [{', '.join(attrs)}];")
        lines.append("  }")

    for t in model.transitions:
        sources = [c.dimension for c in t.when]
        for eff in t.effects:
            for src in sources:
                attrs = [f"label={_quote(t.id)}"]
                if t.id in equilibrium:
                    attrs.append('color="red"')
                elif (src, eff.dimension) in causal_edges:
                    attrs.append('color="green"')
                lines.append(f"  {src} -> {eff.dimension} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class TimelineRecord:
    step: int
    dimension: str
    from_state: str
    to_state: str
    episode_id: str
    thread_root: str


def export_timeline(trace, episodes: Sequence[EpisodeSpec],
                    model: Optional[SystemModel] = None) -> list[TimelineRecord]:
    """One record per state-change event, ordered as logged. Episode
    assignment is by step containment between disruption activations.
    """
    bounds: list[tuple[int, str, str]] = []
    if model is not None and episodes:
        disruptions = model.disruption_map()
        ordered = sorted(episodes, key=lambda e: disruptions[e.causal_disruption].at_step)
        for ep in ordered:
            bounds.append((disruptions[ep.causal_disruption].at_step, ep.id,
                           ep.causal_disruption))

    def locate(step: int) -> tuple[str, str]:
        # Steps before the first disruption belong to the first episode's
        # equilibrium phase; afterwards, to the latest activated episode.
        if not bounds:
            return "", ""
        chosen = (bounds[0][1], bounds[0][2])
        for at, eid, root in bounds:
            if step >= at:
                chosen = (eid, root)
        return chosen

    records = []
    for e in trace.events:
        episode_id, root = locate(e.step)
        records.append(TimelineRecord(e.step, e.dimension, e.from_state, e.to_state,
                                      episode_id, root))
    return records


def serialize_timeline(records: Sequence[TimelineRecord]) -> str:
    lines = ["timeline:"]
    for r in records:
        lines.append(
            f'  - {{step: {r.step}, dimension: "{r.dimension}", from: "{r.from_state}",'
            f' to: "{r.to_state}", episodeId: "{r.episode_id}", threadRoot: "{r.thread_root}"}}'
        )
    return "\n".join(lines) + "\n"
