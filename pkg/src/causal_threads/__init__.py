"""Executable process-based knowledge graphs with causal-thread explanations."""

from importlib import resources

from .engine import (
    SimulationState,
    StateChangeEvent,
    Trace,
    detect_equilibrium,
    init,
    run,
    serialize_trace,
    step,
)
from .export import HighlightSpec, export_graph, export_timeline, highlight_for_episode
from .format import ModelDocument, ParseError, parse, parse_file, serialize
from .model import (
    Condition,
    Dimension,
    Disruption,
    Entity,
    EpisodeSpec,
    Region,
    State,
    SystemModel,
    Transition,
    ValidationReport,
    lookup,
    validate_model,
)
from .narrative import (
    NarrativeStep,
    Session,
    forewarning_moves,
    personalize,
    record_view,
    render_overview,
    render_step,
    render_steps,
)
from .threads import (
    CausalLink,
    CausalThread,
    FeedbackLoop,
    check_episode,
    classify_links,
    detect_feedback_loops,
    trace_thread,
)


def snowball_path() -> str:
    """Filesystem path of the bundled Snowball Earth model."""
    return str(resources.files("causal_threads").joinpath("models/snowball.ctm"))
