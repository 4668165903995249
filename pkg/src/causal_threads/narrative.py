"""Deterministic textual explanations of threads and episodes.

All rendering is template substitution over a replaceable resource file, so
the same inputs always produce the same text. The detail-level filter hides
fine-grained elements behind a single "intermediate steps" clause; sessions
track which propositions a user has already seen so repeat material can be
compressed without dropping content.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import resources
from typing import Iterable, Optional, Sequence

import yaml

from .model import EpisodeSpec, SystemModel, lookup
from .threads import CausalLink, CausalThread


def load_templates(path: Optional[str] = None) -> dict[str, str]:
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            return yaml.safe_load(fh)
    text = resources.files("causal_threads").joinpath("templates.yaml").read_text("utf-8")
    return yaml.safe_load(text)


_DEFAULT_TEMPLATES = None


def _templates(templates: Optional[dict[str, str]]) -> dict[str, str]:
    global _DEFAULT_TEMPLATES
    if templates is not None:
        return templates
    if _DEFAULT_TEMPLATES is None:
        _DEFAULT_TEMPLATES = load_templates()
    return _DEFAULT_TEMPLATES


@dataclass(frozen=True)
class NarrativeStep:
    ordinal: int
    text: str
    proposition_ids: tuple[str, ...]
    detail_level: int


@dataclass(frozen=True)
class Session:
    session_id: str
    viewed_propositions: frozenset[str] = frozenset()
    cursor: Optional[tuple[str, int]] = None


def record_view(session: Session, proposition_ids: Iterable[str],
                model: SystemModel) -> Session:
    """Grow the viewed set; it never shrinks. Unknown ids raise KeyError."""
    ids = tuple(proposition_ids)
    for pid in ids:
        if lookup(model, pid) is None:
            raise KeyError(f"unknown proposition id {pid!r}")
    return replace(session, viewed_propositions=session.viewed_propositions | set(ids))


def _labels(model: SystemModel) -> dict[str, str]:
    out: dict[str, str] = {}
    for _id, el in model.top_level_elements():
        out[_id] = getattr(el, "label", _id) or _id
    for d in model.dimensions:
        for s in d.states:
            out[f"{d.id}.{s.id}"] = s.label or s.id
    return out


def _link_hidden(model: SystemModel, link: CausalLink, detail_level: int) -> bool:
    dims = model.dimension_map()
    transition = model.transition_map().get(link.via_transition)
    levels = [dims[link.from_event.dimension].detail_level,
              dims[link.to_event.dimension].detail_level]
    if transition is not None:
        levels.append(transition.detail_level)
    return max(levels) > detail_level


def render_step(model: SystemModel, thread: CausalThread, ordinal: int,
                detail_level: int, templates: Optional[dict[str, str]] = None) -> NarrativeStep:
    """One sentence for the ordinal-th link of the thread. Links above the
    requested detail level render as the elision clause instead.
    """
    if detail_level < 0:
        raise ValueError("detail level must be >= 0")
    if not 0 <= ordinal < len(thread.links):
        raise IndexError(f"ordinal {ordinal} outside thread of {len(thread.links)} links")
    t = _templates(templates)
    labels = _labels(model)
    link = thread.links[ordinal]
    from_dim = link.from_event.dimension
    to_dim = link.to_event.dimension
    if _link_hidden(model, link, detail_level):
        text = t["step_elided"].format(from_dim=labels[from_dim], to_dim=labels[to_dim])
        return NarrativeStep(ordinal, text, (), detail_level)
    verb = model.transition_map()[link.via_transition].verb
    text = t["step"].format(
        from_dim=labels[from_dim],
        from_state=labels[f"{from_dim}.{link.from_event.from_state}"],
        to_state=labels[f"{from_dim}.{link.from_event.to_state}"],
        verb=verb,
        to_dim=labels[to_dim],
    )
    return NarrativeStep(ordinal, text, (from_dim, to_dim, link.via_transition), detail_level)


def render_steps(model: SystemModel, thread: CausalThread, detail_level: int,
                 templates: Optional[dict[str, str]] = None) -> list[NarrativeStep]:
    """The whole narrative at one detail level. Consecutive hidden links
    collapse into a single elision step.
    """
    t = _templates(templates)
    labels = _labels(model)
    steps: list[NarrativeStep] = []
    hidden_run: list[CausalLink] = []

    def flush() -> None:
        if not hidden_run:
            return
        text = t["step_elided"].format(
            from_dim=labels[hidden_run[0].from_event.dimension],
            to_dim=labels[hidden_run[-1].to_event.dimension],
        )
        steps.append(NarrativeStep(len(steps), text, (), detail_level))
        hidden_run.clear()

    for ordinal, link in enumerate(thread.links):
        if _link_hidden(model, link, detail_level):
            hidden_run.append(link)
            continue
        flush()
        rendered = render_step(model, thread, ordinal, detail_level, templates)
        steps.append(replace(rendered, ordinal=len(steps)))
    flush()
    return steps


def render_overview(model: SystemModel, episode: EpisodeSpec,
                    templates: Optional[dict[str, str]] = None) -> str:
    """Authored overview followed by one generated sentence per expected
    thread link, in path order.
    """
    if model.episode_map().get(episode.id) is not episode and episode.id not in model.episode_map():
        raise KeyError(f"unknown episode {episode.id!r}")
    t = _templates(templates)
    labels = _labels(model)
    lines = [episode.overview]
    dims = episode.expected_thread_dimensions
    equilibrium = set(episode.equilibrium_transitions)
    for from_dim, to_dim in zip(dims, dims[1:]):
        # Prefer the causal-phase transition's verb over an equilibrium one.
        candidates = sorted(
            (transition.id in equilibrium, i)
            for i, transition in enumerate(model.transitions)
            if any(c.dimension == from_dim for c in transition.when)
            and any(e.dimension == to_dim for e in transition.effects)
        )
        verb = model.transitions[candidates[0][1]].verb if candidates else "affects"
        lines.append(t["overview_link"].format(
            from_dim=labels[from_dim], verb=verb, to_dim=labels[to_dim]))
    return "\n".join(lines)


def forewarning_moves(model: SystemModel,
                      episodes: Optional[Sequence[EpisodeSpec]] = None,
                      templates: Optional[dict[str, str]] = None) -> dict[str, list[str]]:
    """For every dimension an episode shares with a later episode's expected
    thread, a move pointing the reader forward. Deterministic order.
    """
    t = _templates(templates)
    labels = _labels(model)
    episodes = list(episodes if episodes is not None else model.episodes)
    out: dict[str, list[str]] = {e.id: [] for e in episodes}
    for i, episode in enumerate(episodes):
        for dim in episode.expected_thread_dimensions:
            for later in episodes[i + 1:]:
                if dim in later.expected_thread_dimensions:
                    out[episode.id].append(t["forewarning"].format(
                        dim=labels[dim], episode=later.label))
    return out


def personalize(model: SystemModel, thread: CausalThread, session: Session,
                detail_level: int,
                templates: Optional[dict[str, str]] = None) -> list[NarrativeStep]:
    """Steps whose propositions the session has all seen render compressed;
    the proposition content of every step is unchanged.
    """
    t = _templates(templates)
    labels = _labels(model)
    steps = render_steps(model, thread, detail_level, templates)
    out = []
    for step in steps:
        ids = set(step.proposition_ids)
        if ids and ids <= session.viewed_propositions:
            link_dims = [pid for pid in step.proposition_ids if pid in model.dimension_map()]
            text = t["step_compressed"].format(
                from_dim=labels[link_dims[0]], to_dim=labels[link_dims[1]])
            out.append(replace(step, text=text))
        else:
            out.append(step)
    return out
