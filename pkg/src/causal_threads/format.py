"""Parse and serialize the on-disk model language (`.ctm` files).

The concrete syntax is a strict YAML subset: a tree of maps and lists with
top-level keys ``name, regions, entities, dimensions, transitions,
disruptions, episodes, layout``. Unknown fields are rejected. Serialization
is canonical (schema key order, declaration order, fixed indentation, all
strings double-quoted), so equal models produce byte-identical text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional

import yaml

from .model import (
    Condition,
    ConditionTest,
    Dimension,
    DimensionKind,
    Disruption,
    Effect,
    Entity,
    EpisodeSpec,
    Region,
    State,
    SystemModel,
    Transition,
)


@dataclass(frozen=True)
class ParseIssue:
    line: int  # 1-based
    column: int  # 1-based
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.message}"


class ParseError(Exception):
    def __init__(self, issues: list[ParseIssue]):
        super().__init__("; ".join(str(i) for i in issues))
        self.issues = issues


@dataclass
class ModelDocument:
    """Raw text plus a source-position map for diagnostics."""

    text: str
    positions: dict[str, tuple[int, int]] = field(default_factory=dict)


def _pos(node: yaml.Node) -> tuple[int, int]:
    return node.start_mark.line + 1, node.start_mark.column + 1


class _Reader:
    """Strict walker over a composed YAML node tree."""

    def __init__(self) -> None:
        self.issues: list[ParseIssue] = []
        self.positions: dict[str, tuple[int, int]] = {}

    def fail(self, node: yaml.Node, message: str) -> None:
        line, col = _pos(node)
        self.issues.append(ParseIssue(line, col, message))

    def mapping(self, node: yaml.Node, what: str) -> dict[str, yaml.Node]:
        if not isinstance(node, yaml.MappingNode):
            self.fail(node, f"expected a mapping for {what}")
            return {}
        out: dict[str, yaml.Node] = {}
        for key_node, value_node in node.value:
            key = getattr(key_node, "value", None)
            if not isinstance(key, str):
                self.fail(key_node, f"non-string key in {what}")
                continue
            if key in out:
                self.fail(key_node, f"duplicate key {key!r} in {what}")
            out[key] = value_node
        return out

    def sequence(self, node: yaml.Node, what: str) -> list[yaml.Node]:
        if not isinstance(node, yaml.SequenceNode):
            self.fail(node, f"expected a list for {what}")
            return []
        return list(node.value)

    def string(self, node: yaml.Node, what: str) -> str:
        if isinstance(node, yaml.ScalarNode) and node.tag.endswith(":str"):
            return str(node.value)
        if isinstance(node, yaml.ScalarNode):
            self.fail(node, f"expected a string for {what}")
            return str(node.value)
        self.fail(node, f"expected a string for {what}")
        return ""

    def integer(self, node: yaml.Node, what: str) -> int:
        if isinstance(node, yaml.ScalarNode) and node.tag.endswith(":int"):
            return int(node.value)
        self.fail(node, f"expected an integer for {what}")
        return 0

    def number(self, node: yaml.Node, what: str) -> float:
        if isinstance(node, yaml.ScalarNode) and (
            node.tag.endswith(":int") or node.tag.endswith(":float")
        ):
            return float(node.value)
        self.fail(node, f"expected a number for {what}")
        return 0.0

    def boolean(self, node: yaml.Node, what: str) -> bool:
        if isinstance(node, yaml.ScalarNode) and node.tag.endswith(":bool"):
            return str(node.value).lower() in ("true", "yes", "on")
        self.fail(node, f"expected true/false for {what}")
        return False

    def record(
        self,
        node: yaml.Node,
        what: str,
        required: tuple[str, ...],
        optional: tuple[str, ...] = (),
    ) -> dict[str, yaml.Node]:
        fields = self.mapping(node, what)
        for key in required:
            if key not in fields:
                self.fail(node, f"{what} is missing required field {key!r}")
        allowed = set(required) | set(optional)
        for key, value_node in fields.items():
            if key not in allowed:
                self.fail(value_node, f"unknown field {key!r} in {what}")
        return {k: v for k, v in fields.items() if k in allowed}

    def register(self, element_id: str, node: yaml.Node) -> None:
        if element_id and element_id not in self.positions:
            self.positions[element_id] = _pos(node)


def parse(text: str) -> tuple[SystemModel, ModelDocument]:
    """Parse model-file text. Raises ParseError carrying line/column issues
    for syntax errors, unknown or missing fields, and wrong value types.
    Reference resolution is validate_model's job.
    """
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = (mark.line + 1) if mark else 1
        col = (mark.column + 1) if mark else 1
        raise ParseError([ParseIssue(line, col, f"syntax error: {exc.problem or exc}")]) from exc
    if root is None:
        raise ParseError([ParseIssue(1, 1, "empty document is not a model")])

    r = _Reader()
    top = r.record(
        root,
        "model",
        required=("name",),
        optional=("regions", "entities", "dimensions", "transitions",
                  "disruptions", "episodes", "layout"),
    )

    name = r.string(top["name"], "name") if "name" in top else ""

    def items(key: str) -> list[yaml.Node]:
        return r.sequence(top[key], key) if key in top else []

    regions = []
    for node in items("regions"):
        f = r.record(node, "region", required=("id", "label"))
        rid = r.string(f["id"], "region id") if "id" in f else ""
        r.register(rid, node)
        regions.append(Region(id=rid, label=r.string(f["label"], "region label") if "label" in f else ""))

    entities = []
    for node in items("entities"):
        f = r.record(node, "entity", required=("id", "label", "region"))
        eid = r.string(f["id"], "entity id") if "id" in f else ""
        r.register(eid, node)
        entities.append(Entity(
            id=eid,
            label=r.string(f["label"], "entity label") if "label" in f else "",
            region=r.string(f["region"], "entity region") if "region" in f else "",
        ))

    dimensions = []
    for node in items("dimensions"):
        f = r.record(
            node, "dimension",
            required=("id", "entity", "kind", "states"),
            optional=("initial", "systemLevel", "detailLevel", "note"),
        )
        did = r.string(f["id"], "dimension id") if "id" in f else ""
        r.register(did, node)
        kind = DimensionKind.PROPERTY
        if "kind" in f:
            raw = r.string(f["kind"], "dimension kind")
            try:
                kind = DimensionKind(raw)
            except ValueError:
                r.fail(f["kind"], f"kind must be 'property' or 'process', got {raw!r}")
        states = []
        for snode in r.sequence(f["states"], "states") if "states" in f else []:
            sf = r.record(snode, "state", required=("id", "label"))
            sid = r.string(sf["id"], "state id") if "id" in sf else ""
            r.register(f"{did}.{sid}", snode)
            states.append(State(id=sid, label=r.string(sf["label"], "state label") if "label" in sf else ""))
        dimensions.append(Dimension(
            id=did,
            entity=r.string(f["entity"], "dimension entity") if "entity" in f else "",
            kind=kind,
            states=tuple(states),
            initial=r.string(f["initial"], "initial") if "initial" in f else None,
            system_level=r.boolean(f["systemLevel"], "systemLevel") if "systemLevel" in f else False,
            detail_level=r.integer(f["detailLevel"], "detailLevel") if "detailLevel" in f else 0,
            note=r.string(f["note"], "note") if "note" in f else None,
        ))

    def read_condition(node: yaml.Node) -> Condition:
        f = r.record(node, "condition", required=("dimension", "test"), optional=("state",))
        test = ConditionTest.IS
        if "test" in f:
            raw = r.string(f["test"], "condition test")
            try:
                test = ConditionTest(raw)
            except ValueError:
                r.fail(f["test"], f"unknown condition test {raw!r}")
        return Condition(
            dimension=r.string(f["dimension"], "condition dimension") if "dimension" in f else "",
            test=test,
            state=r.string(f["state"], "condition state") if "state" in f else None,
        )

    def read_effects(node: yaml.Node) -> tuple[Effect, ...]:
        out = []
        for enode in r.sequence(node, "effects"):
            f = r.record(enode, "effect", required=("dimension", "state"))
            out.append(Effect(
                dimension=r.string(f["dimension"], "effect dimension") if "dimension" in f else "",
                state=r.string(f["state"], "effect state") if "state" in f else "",
            ))
        return tuple(out)

    transitions = []
    for node in items("transitions"):
        f = r.record(
            node, "transition",
            required=("id", "subject", "verb", "effects"),
            optional=("roles", "when", "detailLevel", "note"),
        )
        tid = r.string(f["id"], "transition id") if "id" in f else ""
        r.register(tid, node)
        roles: list[tuple[str, str]] = []
        if "roles" in f:
            for key_node, value_node in (f["roles"].value if isinstance(f["roles"], yaml.MappingNode) else []):
                roles.append((str(key_node.value), r.string(value_node, "role target")))
            if not isinstance(f["roles"], yaml.MappingNode):
                r.fail(f["roles"], "expected a mapping for roles")
        when = tuple(read_condition(c) for c in (r.sequence(f["when"], "when") if "when" in f else []))
        transitions.append(Transition(
            id=tid,
            subject=r.string(f["subject"], "transition subject") if "subject" in f else "",
            verb=r.string(f["verb"], "transition verb") if "verb" in f else "",
            roles=tuple(roles),
            when=when,
            effects=read_effects(f["effects"]) if "effects" in f else (),
            detail_level=r.integer(f["detailLevel"], "detailLevel") if "detailLevel" in f else 0,
            note=r.string(f["note"], "note") if "note" in f else None,
        ))

    disruptions = []
    for node in items("disruptions"):
        f = r.record(node, "disruption", required=("id", "atStep", "effects"), optional=("label",))
        did = r.string(f["id"], "disruption id") if "id" in f else ""
        r.register(did, node)
        disruptions.append(Disruption(
            id=did,
            at_step=r.integer(f["atStep"], "atStep") if "atStep" in f else 0,
            effects=read_effects(f["effects"]) if "effects" in f else (),
            label=r.string(f["label"], "disruption label") if "label" in f else "",
        ))

    episodes = []
    for node in items("episodes"):
        f = r.record(
            node, "episode",
            required=("id", "label", "overview", "equilibriumTransitions",
                      "causalDisruption", "expectedThreadDimensions"),
        )
        eid = r.string(f["id"], "episode id") if "id" in f else ""
        r.register(eid, node)
        episodes.append(EpisodeSpec(
            id=eid,
            label=r.string(f["label"], "episode label") if "label" in f else "",
            overview=r.string(f["overview"], "episode overview") if "overview" in f else "",
            equilibrium_transitions=tuple(
                r.string(n, "equilibrium transition id")
                for n in (r.sequence(f["equilibriumTransitions"], "equilibriumTransitions")
                          if "equilibriumTransitions" in f else [])
            ),
            causal_disruption=r.string(f["causalDisruption"], "causalDisruption")
            if "causalDisruption" in f else "",
            expected_thread_dimensions=tuple(
                r.string(n, "expected dimension id")
                for n in (r.sequence(f["expectedThreadDimensions"], "expectedThreadDimensions")
                          if "expectedThreadDimensions" in f else [])
            ),
        ))

    layout: list[tuple[str, tuple[float, float]]] = []
    if "layout" in top:
        for key_node, value_node in (top["layout"].value if isinstance(top["layout"], yaml.MappingNode) else []):
            f = r.record(value_node, "layout hint", required=("x", "y"))
            layout.append((
                str(key_node.value),
                (r.number(f["x"], "x") if "x" in f else 0.0,
                 r.number(f["y"], "y") if "y" in f else 0.0),
            ))
        if not isinstance(top["layout"], yaml.MappingNode):
            r.fail(top["layout"], "expected a mapping for layout")

    if r.issues:
        raise ParseError(r.issues)

    model = SystemModel(
        name=name,
        regions=tuple(regions),
        entities=tuple(entities),
        dimensions=tuple(dimensions),
        transitions=tuple(transitions),
        disruptions=tuple(disruptions),
        episodes=tuple(episodes),
        layout=tuple(layout),
    )
    return model, ModelDocument(text=text, positions=r.positions)


def parse_file(path: str) -> tuple[SystemModel, ModelDocument]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


# --- canonical emitter ------------------------------------------------------

def _scalar(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int,)):
        return str(value)
    if isinstance(value, float):
        return str(int(value)) if value == int(value) else repr(value)
    return json.dumps(value, ensure_ascii=False)


class _Emitter:
    def __init__(self) -> None:
        self.lines: list[str] = []

    def kv(self, indent: int, key: str, value: Any) -> None:
        self.lines.append("  " * indent + f"{key}: {_scalar(value)}")

    def key(self, indent: int, key: str) -> None:
        self.lines.append("  " * indent + f"{key}:")

    def records(self, indent: int, key: str, records: list[list[tuple[str, Any]]]) -> None:
        if not records:
            return
        self.key(indent, key)
        for fields in records:
            first = True
            for k, v in fields:
                prefix = "  " * indent + ("  - " if first else "    ")
                if isinstance(v, _Nested):
                    self.lines.append(prefix + f"{k}:")
                    v.emit(self, indent + 3)
                else:
                    self.lines.append(prefix + f"{k}: {_scalar(v)}")
                first = False

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


class _Nested:
    """Placeholder for a nested list/map value inside a record."""

    def __init__(self, kind: str, payload: Any):
        self.kind = kind  # "records" | "stringlist" | "map"
        self.payload = payload

    def emit(self, em: _Emitter, indent: int) -> None:
        if self.kind == "records":
            for fields in self.payload:
                first = True
                for k, v in fields:
                    prefix = "  " * (indent - 1) + ("- " if first else "  ")
                    em.lines.append(prefix + f"{k}: {_scalar(v)}")
                    first = False
        elif self.kind == "stringlist":
            for item in self.payload:
                em.lines.append("  " * (indent - 1) + f"- {_scalar(item)}")
        elif self.kind == "map":
            # Mapping values must sit deeper than their key, unlike sequences.
            for k, v in self.payload:
                em.lines.append("  " * indent + f"{k}: {_scalar(v)}")


def _condition_fields(c: Condition) -> list[tuple[str, Any]]:
    fields: list[tuple[str, Any]] = [("dimension", c.dimension), ("test", c.test.value)]
    if c.state is not None:
        fields.append(("state", c.state))
    return fields


def _effect_fields(e: Effect) -> list[tuple[str, Any]]:
    return [("dimension", e.dimension), ("state", e.state)]


def serialize(model: SystemModel) -> str:
    """Emit the canonical text form: schema key order, declaration order,
    2-space indentation, double-quoted strings, defaults omitted.
    parse(serialize(m)) structurally equals m for every valid model.
    """
    em = _Emitter()
    em.kv(0, "name", model.name)

    em.records(0, "regions", [[("id", x.id), ("label", x.label)] for x in model.regions])
    em.records(0, "entities", [
        [("id", x.id), ("label", x.label), ("region", x.region)] for x in model.entities
    ])

    dim_records = []
    for d in model.dimensions:
        fields: list[tuple[str, Any]] = [
            ("id", d.id), ("entity", d.entity), ("kind", d.kind.value),
            ("states", _Nested("records", [[("id", s.id), ("label", s.label)] for s in d.states])),
        ]
        if d.initial is not None:
            fields.append(("initial", d.initial))
        if d.system_level:
            fields.append(("systemLevel", True))
        if d.detail_level:
            fields.append(("detailLevel", d.detail_level))
        if d.note is not None:
            fields.append(("note", d.note))
        dim_records.append(fields)
    em.records(0, "dimensions", dim_records)

    tr_records = []
    for t in model.transitions:
        fields = [("id", t.id), ("subject", t.subject), ("verb", t.verb)]
        if t.roles:
            fields.append(("roles", _Nested("map", list(t.roles))))
        if t.when:
            fields.append(("when", _Nested("records", [_condition_fields(c) for c in t.when])))
        fields.append(("effects", _Nested("records", [_effect_fields(e) for e in t.effects])))
        if t.detail_level:
            fields.append(("detailLevel", t.detail_level))
        if t.note is not None:
            fields.append(("note", t.note))
        tr_records.append(fields)
    em.records(0, "transitions", tr_records)

    dis_records = []
    for d in model.disruptions:
        fields = [("id", d.id), ("atStep", d.at_step),
                  ("effects", _Nested("records", [_effect_fields(e) for e in d.effects]))]
        if d.label:
            fields.append(("label", d.label))
        dis_records.append(fields)
    em.records(0, "disruptions", dis_records)

    em.records(0, "episodes", [
        [
            ("id", e.id), ("label", e.label), ("overview", e.overview),
            ("equilibriumTransitions", _Nested("stringlist", list(e.equilibrium_transitions))),
            ("causalDisruption", e.causal_disruption),
            ("expectedThreadDimensions", _Nested("stringlist", list(e.expected_thread_dimensions))),
        ]
        for e in model.episodes
    ])

    if model.layout:
        em.key(0, "layout")
        for eid, (x, y) in model.layout:
            em.key(1, eid)
            em.kv(2, "x", x)
            em.kv(2, "y", y)

    return em.text()
