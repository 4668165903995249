import type {
  HighlightPayload,
  ModelPayload,
  ThreadPayload,
} from "../src/types.js";

/** Two-region toy model used by the unit tests. */
export const toyModel: ModelPayload = {
  name: "toy",
  regions: [
    { id: "top", label: "Top" },
    { id: "bottom", label: "Bottom" },
  ],
  entities: [
    { id: "sky", label: "Sky", region: "top" },
    { id: "ground", label: "Ground", region: "bottom" },
  ],
  dimensions: [
    {
      id: "a",
      entity: "sky",
      kind: "property",
      states: [
        { id: "a0", label: "A0" },
        { id: "a1", label: "A1" },
      ],
      initial: "a0",
      systemLevel: true,
      detailLevel: 0,
      note: "a note",
    },
    {
      id: "b",
      entity: "ground",
      kind: "property",
      states: [
        { id: "b0", label: "B0" },
        { id: "b1", label: "B1" },
        { id: "b2", label: "B2" },
      ],
      initial: "b0",
      systemLevel: false,
      detailLevel: 0,
      note: null,
    },
  ],
  transitions: [
    {
      id: "t_ab",
      subject: "sky",
      verb: "moves",
      roles: {},
      when: [{ dimension: "a", test: "changedTo", state: "a1" }],
      effects: [{ dimension: "b", state: "b1" }],
      detailLevel: 0,
      note: null,
    },
    {
      id: "t_eq",
      subject: "ground",
      verb: "holds",
      roles: {},
      when: [{ dimension: "b", test: "is", state: "b0" }],
      effects: [{ dimension: "b", state: "b0" }],
      detailLevel: 0,
      note: null,
    },
  ],
  disruptions: [
    { id: "kick", atStep: 0, label: "kick", effects: [{ dimension: "a", state: "a1" }] },
  ],
  episodes: [
    {
      id: "ep",
      label: "Episode",
      overview: "Overview.",
      equilibriumTransitions: ["t_eq"],
      causalDisruption: "kick",
      expectedThreadDimensions: ["a", "b"],
    },
  ],
  layout: { a: { x: 100, y: 50 } },
};

export const toyThread: ThreadPayload = {
  rootCause: "kick",
  orderedDimensionPath: ["a", "b"],
  events: [
    { step: 0, dimension: "a", fromState: "a0", toState: "a1", causeKind: "disruption", causeId: "kick" },
    { step: 1, dimension: "b", fromState: "b0", toState: "b1", causeKind: "transition", causeId: "t_ab" },
  ],
  links: [
    {
      from: { step: 0, dimension: "a", fromState: "a0", toState: "a1", causeKind: "disruption", causeId: "kick" },
      to: { step: 1, dimension: "b", fromState: "b0", toState: "b1", causeKind: "transition", causeId: "t_ab" },
      viaTransition: "t_ab",
      classification: "causal",
      loopClosure: false,
    },
  ],
};

export const toyHighlight: HighlightPayload = {
  equilibriumTransitionIds: ["t_eq"],
  causalLinkEdges: [["a", "b"]],
  grayedStateIds: ["a.a0", "b.b2"],
  highlightedTransitionIds: ["t_eq", "t_ab"],
};
