// Payload shapes of the HTTP API this client consumes.

export interface StatePayload {
  id: string;
  label: string;
}

export interface DimensionPayload {
  id: string;
  entity: string;
  kind: string;
  states: StatePayload[];
  initial: string;
  systemLevel: boolean;
  detailLevel: number;
  note: string | null;
}

export interface ConditionPayload {
  dimension: string;
  test: string;
  state: string | null;
}

export interface EffectPayload {
  dimension: string;
  state: string;
}

export interface TransitionPayload {
  id: string;
  subject: string;
  verb: string;
  roles: Record<string, string>;
  when: ConditionPayload[];
  effects: EffectPayload[];
  detailLevel: number;
  note: string | null;
}

export interface ModelPayload {
  name: string;
  regions: { id: string; label: string }[];
  entities: { id: string; label: string; region: string }[];
  dimensions: DimensionPayload[];
  transitions: TransitionPayload[];
  disruptions: { id: string; atStep: number; label: string; effects: EffectPayload[] }[];
  episodes: EpisodePayload[];
  layout: Record<string, { x: number; y: number }>;
}

export interface EpisodePayload {
  id: string;
  label: string;
  overview: string;
  equilibriumTransitions: string[];
  causalDisruption: string;
  expectedThreadDimensions: string[];
}

export interface EpisodeSummary {
  id: string;
  label: string;
  overview: string;
}

export interface EventPayload {
  step: number;
  dimension: string;
  fromState: string;
  toState: string;
  causeKind: string;
  causeId: string;
}

export interface LinkPayload {
  from: EventPayload;
  to: EventPayload;
  viaTransition: string;
  classification: string | null;
  loopClosure: boolean;
}

export interface ThreadPayload {
  rootCause: string;
  orderedDimensionPath: string[];
  events: EventPayload[];
  links: LinkPayload[];
}

export interface HighlightPayload {
  equilibriumTransitionIds: string[];
  causalLinkEdges: [string, string][];
  grayedStateIds: string[];
  highlightedTransitionIds: string[];
}

export interface ThreadResponse {
  thread: ThreadPayload;
  highlight: HighlightPayload;
  feedbackLoops: {
    cycle: string[];
    polarity: string;
    terminationCondition: ConditionPayload | null;
  }[];
  report: {
    equilibriumVerified: boolean;
    threadPathMatches: boolean;
    diffs: string[];
  };
}

export interface NarrativeStepPayload {
  ordinal: number;
  text: string;
  propositionIds: string[];
  detailLevel: number;
}

export interface NarrativeResponse {
  episodeId: string;
  overview: string;
  steps: NarrativeStepPayload[];
}

export interface DimensionInfoPayload {
  id: string;
  entity: string;
  kind: string;
  note: string | null;
  states: StatePayload[];
}

export interface SessionPayload {
  sessionId: string;
  viewedPropositions: string[];
  cursor: [string, number] | null;
}
