/** Client-local view state and its pure transitions.
 *
 * All interaction state (layer collapse, indicator selection) lives here and
 * never touches the record; transitions return new state objects so renders
 * stay referentially transparent and easy to test.
 */

import type { Dag } from "./types.js";

export interface ViewState {
  /** Layers collapsed *at*: layer k in this set hides all layers > k. */
  collapsedLayers: ReadonlySet<number>;
  /** Indicator whose supporting nodes are highlighted, if any. */
  selectedIndicator: string | null;
}

export function initialView(): ViewState {
  return { collapsedLayers: new Set(), selectedIndicator: null };
}

export function layersOf(dag: Dag): number[] {
  const layers = new Set(dag.nodes.map((n) => n.layer));
  return [...layers].sort((a, b) => a - b);
}

/** Collapse at layer k (no-op if k is not a layer of the DAG). */
export function collapseLayer(view: ViewState, dag: Dag, k: number): ViewState {
  if (!layersOf(dag).includes(k)) return view;
  const collapsed = new Set(view.collapsedLayers);
  collapsed.add(k);
  return { ...view, collapsedLayers: collapsed };
}

/** Expand a previously collapsed layer (no-op if it was not collapsed). */
export function expandLayer(view: ViewState, k: number): ViewState {
  if (!view.collapsedLayers.has(k)) return view;
  const collapsed = new Set(view.collapsedLayers);
  collapsed.delete(k);
  return { ...view, collapsedLayers: collapsed };
}

export function toggleLayer(view: ViewState, dag: Dag, k: number): ViewState {
  return view.collapsedLayers.has(k)
    ? expandLayer(view, k)
    : collapseLayer(view, dag, k);
}

/** Select an indicator, or clear the selection by re-selecting it. */
export function selectIndicator(view: ViewState, id: string | null): ViewState {
  const next = view.selectedIndicator === id ? null : id;
  return { ...view, selectedIndicator: next };
}

/** First layer whose descendants are hidden, or null when fully expanded. */
export function collapseCutoff(view: ViewState): number | null {
  if (view.collapsedLayers.size === 0) return null;
  return Math.min(...view.collapsedLayers);
}

/** Drop state that refers to layers absent from a newly loaded DAG. */
export function reconcileView(view: ViewState, dag: Dag): ViewState {
  const present = new Set(layersOf(dag));
  const collapsed = new Set([...view.collapsedLayers].filter((k) => present.has(k)));
  return { ...view, collapsedLayers: collapsed };
}
