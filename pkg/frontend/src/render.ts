/** Pure DOM rendering. Every function takes a Document so the same code
 * runs in the browser and in DOM-emulating tests. The server computes all
 * causal logic (highlights, gray sets, narratives); this layer only
 * projects payloads onto elements.
 */

import type {
  DimensionInfoPayload,
  HighlightPayload,
  ModelPayload,
  NarrativeStepPayload,
  ThreadPayload,
} from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

interface Point {
  x: number;
  y: number;
}

/** Position for a dimension: the model's manual layout hint when present,
 * otherwise a grid slot derived from declaration order. */
function dimensionPosition(model: ModelPayload, dimensionId: string, index: number): Point {
  const hint = model.layout[dimensionId];
  if (hint) return { x: hint.x, y: hint.y };
  return { x: 80 + (index % 4) * 180, y: 60 + Math.floor(index / 4) * 90 };
}

/** Main panel: one band per region (globals first by declaration order),
 * each dimension as a labeled row of state chips, plus an SVG layer with
 * one curve per transition condition->effect dimension pair. */
export function layoutPanel(doc: Document, model: ModelPayload): HTMLElement {
  const panel = doc.createElement("div");
  panel.className = "panel";

  const regionOf = new Map(model.entities.map((e) => [e.id, e.region]));
  for (const region of model.regions) {
    const band = doc.createElement("section");
    band.className = "region-band";
    band.dataset.region = region.id;

    const title = doc.createElement("h2");
    title.textContent = region.label;
    band.appendChild(title);

    model.dimensions.forEach((dim) => {
      if (regionOf.get(dim.entity) !== region.id) return;
      const row = doc.createElement("div");
      row.className = "dimension";
      row.dataset.dimension = dim.id;

      const label = doc.createElement("button");
      label.className = "dim-label";
      label.type = "button";
      label.textContent = dim.id;
      row.appendChild(label);

      for (const state of dim.states) {
        const chip = doc.createElement("span");
        chip.className = "chip";
        chip.dataset.state = `${dim.id}.${state.id}`;
        chip.textContent = state.label;
        row.appendChild(chip);
      }
      band.appendChild(row);
    });
    panel.appendChild(band);
  }

  panel.appendChild(linkLayer(doc, model));
  return panel;
}

function linkLayer(doc: Document, model: ModelPayload): SVGSVGElement {
  const svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
  svg.setAttribute("class", "links");
  const order = new Map(model.dimensions.map((d, i) => [d.id, i]));

  for (const transition of model.transitions) {
    const sources = new Set(transition.when.map((c) => c.dimension));
    for (const effect of transition.effects) {
      for (const source of sources) {
        const from = dimensionPosition(model, source, order.get(source) ?? 0);
        const to = dimensionPosition(model, effect.dimension, order.get(effect.dimension) ?? 0);
        const midX = (from.x + to.x) / 2;
        const path = doc.createElementNS(SVG_NS, "path");
        path.setAttribute("class", "link");
        path.setAttribute(
          "d",
          `M ${from.x} ${from.y} C ${midX} ${from.y}, ${midX} ${to.y}, ${to.x} ${to.y}`,
        );
        path.dataset.transition = transition.id;
        path.dataset.edge = `${source}->${effect.dimension}`;
        svg.appendChild(path);
      }
    }
  }
  return svg;
}

/** Apply (or with null, clear) an episode highlight: equilibrium links red,
 * causal links green and numbered in thread order, every state outside the
 * highlight grayed, and the thread's realized states emphasized. The sets
 * come verbatim from the server payload. */
export function applyHighlight(
  panel: HTMLElement,
  highlight: HighlightPayload | null,
  thread: ThreadPayload | null = null,
): void {
  for (const el of Array.from(panel.querySelectorAll(".grayed, .red, .green, .emphasized"))) {
    el.classList.remove("grayed", "red", "green", "emphasized");
    el.removeAttribute("data-order");
  }
  if (!highlight) return;

  for (const stateId of highlight.grayedStateIds) {
    panel.querySelector(`[data-state="${stateId}"]`)?.classList.add("grayed");
  }

  const equilibrium = new Set(highlight.equilibriumTransitionIds);
  for (const path of Array.from(panel.querySelectorAll<SVGPathElement>("path.link"))) {
    if (equilibrium.has(path.dataset.transition ?? "")) path.classList.add("red");
  }

  highlight.causalLinkEdges.forEach(([from, to], index) => {
    for (const path of Array.from(
      panel.querySelectorAll<SVGPathElement>(`path.link[data-edge="${from}->${to}"]`),
    )) {
      if (path.classList.contains("red")) continue;
      path.classList.add("green");
      path.setAttribute("data-order", String(index));
    }
  });

  if (thread) {
    for (const event of thread.events) {
      panel
        .querySelector(`[data-state="${event.dimension}.${event.toState}"]`)
        ?.classList.add("emphasized");
    }
  }
}

/** Pulse the link for the narrative step under the cursor. */
export function applyStepEmphasis(
  panel: HTMLElement,
  thread: ThreadPayload,
  cursor: number,
): void {
  for (const el of Array.from(panel.querySelectorAll(".pulse"))) el.classList.remove("pulse");
  const link = thread.links[cursor];
  if (!link) return;
  const edge = `${link.from.dimension}->${link.to.dimension}`;
  panel
    .querySelector(`path.link[data-edge="${edge}"][data-transition="${link.viaTransition}"]`)
    ?.classList.add("pulse");
}

/** Dimension info popup; dimensions without a note get a placeholder. */
export function infoBox(doc: Document, info: DimensionInfoPayload): HTMLElement {
  const box = doc.createElement("aside");
  box.className = "info-box";
  box.dataset.dimension = info.id;

  const title = doc.createElement("h3");
  title.textContent = info.id;
  box.appendChild(title);

  const note = doc.createElement("p");
  note.className = "note";
  note.textContent = info.note ?? "no further detail";
  box.appendChild(note);
  return box;
}

/** Narrative pane with the cursor's step marked as current. */
export function narrativePane(
  doc: Document,
  steps: NarrativeStepPayload[],
  cursor: number,
): HTMLElement {
  const pane = doc.createElement("ol");
  pane.className = "narrative";
  steps.forEach((step, index) => {
    const item = doc.createElement("li");
    item.textContent = step.text;
    item.dataset.ordinal = String(step.ordinal);
    if (index === cursor) item.classList.add("current");
    pane.appendChild(item);
  });
  return pane;
}

/** Error banner shown instead of a partial panel on fetch failure. */
export function errorBanner(doc: Document, message: string): HTMLElement {
  const banner = doc.createElement("div");
  banner.className = "error-banner";
  banner.setAttribute("role", "alert");
  banner.textContent = message;
  return banner;
}
