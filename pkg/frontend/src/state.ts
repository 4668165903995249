/** UI view state and its pure reducers. The step cursor is always clamped
 * to the selected thread's bounds; everything else is plain bookkeeping.
 */

export interface ViewState {
  selectedEpisode: string | null;
  stepCursor: number;
  detailLevel: number;
  sessionId: string | null;
  openInfoBox: string | null;
}

export const initialViewState: ViewState = {
  selectedEpisode: null,
  stepCursor: 0,
  detailLevel: 0,
  sessionId: null,
  openInfoBox: null,
};

export function selectEpisode(state: ViewState, episodeId: string | null): ViewState {
  if (episodeId === state.selectedEpisode) return state;
  return { ...state, selectedEpisode: episodeId, stepCursor: 0, openInfoBox: null };
}

export type StepDirection = "next" | "prev";

/** Move the cursor one step; clamps at both bounds. `stepCount` is the
 * number of narrative steps of the selected thread. */
export function stepThrough(
  state: ViewState,
  direction: StepDirection,
  stepCount: number,
): ViewState {
  if (state.selectedEpisode === null || stepCount <= 0) return state;
  const delta = direction === "next" ? 1 : -1;
  const cursor = Math.min(Math.max(state.stepCursor + delta, 0), stepCount - 1);
  return cursor === state.stepCursor ? state : { ...state, stepCursor: cursor };
}

export function clampCursor(state: ViewState, stepCount: number): ViewState {
  const cursor = Math.min(Math.max(state.stepCursor, 0), Math.max(stepCount - 1, 0));
  return cursor === state.stepCursor ? state : { ...state, stepCursor: cursor };
}

export function setDetailLevel(state: ViewState, level: number): ViewState {
  const detailLevel = Math.max(0, Math.floor(level));
  return { ...state, detailLevel, stepCursor: 0 };
}

export function attachSession(state: ViewState, sessionId: string): ViewState {
  return { ...state, sessionId };
}

export function openInfoBox(state: ViewState, dimensionId: string): ViewState {
  return { ...state, openInfoBox: dimensionId };
}

export function closeInfoBox(state: ViewState): ViewState {
  return { ...state, openInfoBox: null };
}
