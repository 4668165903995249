/** Browser wiring: fetches through ApiClient, keeps one ViewState, and
 * re-renders via the pure functions in render.ts. Fig-1-style arrangement:
 * episode widget top-right, step/detail controls lower-right.
 */

import { ApiClient } from "./api.js";
import {
  applyHighlight,
  applyStepEmphasis,
  errorBanner,
  infoBox,
  layoutPanel,
  narrativePane,
} from "./render.js";
import {
  ViewState,
  closeInfoBox,
  initialViewState,
  openInfoBox,
  selectEpisode,
  setDetailLevel,
  stepThrough,
} from "./state.js";
import type { ModelPayload, NarrativeResponse, ThreadResponse } from "./types.js";

export async function mount(root: HTMLElement, api: ApiClient): Promise<void> {
  const doc = root.ownerDocument;
  let state: ViewState = initialViewState;
  let model: ModelPayload;
  let panel: HTMLElement;
  let thread: ThreadResponse | null = null;
  let narrative: NarrativeResponse | null = null;

  try {
    model = await api.getModel();
    const session = await api.createSession();
    state = { ...state, sessionId: session.sessionId };
  } catch (err) {
    root.replaceChildren(errorBanner(doc, `cannot reach server: ${String(err)}`));
    return;
  }

  const episodes = await api.getEpisodes();
  panel = layoutPanel(doc, model);

  const sidebar = doc.createElement("div");
  sidebar.className = "sidebar";

  const picker = doc.createElement("select");
  picker.className = "episode-picker";
  picker.append(new Option("— no episode —", ""));
  for (const episode of episodes) picker.append(new Option(episode.label, episode.id));

  const controls = doc.createElement("div");
  controls.className = "controls";
  const prev = doc.createElement("button");
  prev.textContent = "prev";
  const next = doc.createElement("button");
  next.textContent = "next";
  const level = doc.createElement("input");
  level.type = "number";
  level.min = "0";
  level.value = "0";
  controls.append(prev, next, level);

  const narrativeHost = doc.createElement("div");
  narrativeHost.className = "narrative-host";
  const infoHost = doc.createElement("div");
  infoHost.className = "info-host";

  sidebar.append(picker, controls, narrativeHost, infoHost);
  root.replaceChildren(panel, sidebar);

  async function recordStepView(): Promise<void> {
    const step = narrative?.steps[state.stepCursor];
    if (state.sessionId && step && step.propositionIds.length) {
      await api.recordViews(state.sessionId, step.propositionIds);
    }
  }

  async function refresh(): Promise<void> {
    if (!state.selectedEpisode) {
      thread = null;
      narrative = null;
      applyHighlight(panel, null);
      narrativeHost.replaceChildren();
      return;
    }
    try {
      thread = await api.getThread(state.selectedEpisode);
      narrative = await api.getNarrative(
        state.selectedEpisode,
        state.detailLevel,
        state.sessionId ?? undefined,
      );
    } catch (err) {
      narrativeHost.replaceChildren(errorBanner(doc, String(err)));
      return;
    }
    applyHighlight(panel, thread.highlight, thread.thread);
    applyStepEmphasis(panel, thread.thread, state.stepCursor);
    narrativeHost.replaceChildren(narrativePane(doc, narrative.steps, state.stepCursor));
    await recordStepView();
  }

  picker.addEventListener("change", () => {
    state = selectEpisode(state, picker.value || null);
    void refresh();
  });

  const move = (direction: "next" | "prev") => {
    state = stepThrough(state, direction, narrative?.steps.length ?? 0);
    if (thread && narrative) {
      applyStepEmphasis(panel, thread.thread, state.stepCursor);
      narrativeHost.replaceChildren(narrativePane(doc, narrative.steps, state.stepCursor));
      void recordStepView();
    }
  };
  next.addEventListener("click", () => move("next"));
  prev.addEventListener("click", () => move("prev"));

  level.addEventListener("change", () => {
    state = setDetailLevel(state, Number(level.value));
    void refresh();
  });

  panel.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (!target.classList.contains("dim-label")) return;
    const dimension = target.closest<HTMLElement>("[data-dimension]")?.dataset.dimension;
    if (!dimension) return;
    state = openInfoBox(state, dimension);
    void (async () => {
      const info = await api.getDimensionInfo(dimension);
      const box = infoBox(doc, info);
      const close = doc.createElement("button");
      close.textContent = "close";
      close.addEventListener("click", () => {
        state = closeInfoBox(state);
        infoHost.replaceChildren();
      });
      box.appendChild(close);
      infoHost.replaceChildren(box);
      if (state.sessionId) await api.recordViews(state.sessionId, [dimension]);
    })();
  });
}

declare global {
  interface Window {
    CT_API_BASE?: string;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const base = window.CT_API_BASE ?? "http://127.0.0.1:8000";
  void mount(document.getElementById("app") as HTMLElement, new ApiClient(base));
}
