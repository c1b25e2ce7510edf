/** Pure HTML renderers for the analyst panes.
 *
 * Every function here maps (record, view) to a markup string with no DOM or
 * network access, and every displayed number, direction, and badge is read
 * verbatim from the record — the UI computes no impacts or metrics of its
 * own. Purity keeps the renderers fixture-diffable in plain node.
 */

import type { Direction, EpisodeRecord, Impact, Metrics } from "./types.js";
import { collapseCutoff, layersOf, type ViewState } from "./state.js";

export const DIRECTION_GLYPHS: Record<Direction, string> = {
  increase: "↑",
  decrease: "↓",
  ambiguous: "~",
};

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

/** Node ids supporting the selected indicator, or null when nothing is selected. */
function highlightSet(record: EpisodeRecord, view: ViewState): Set<string> | null {
  if (view.selectedIndicator === null) return null;
  const impact = (record.impacts ?? []).find(
    (i) => i.indicator_id === view.selectedIndicator,
  );
  return new Set(impact?.supporting_nodes ?? []);
}

/** Layered band view of the consequence DAG (status must be ok). */
export function renderDag(record: EpisodeRecord, view: ViewState): string {
  const dag = record.dag;
  if (!dag) throw new Error(`record ${record.episode_id} has no DAG`);
  const cutoff = collapseCutoff(view);
  const highlighted = highlightSet(record, view);
  const bands: string[] = [];
  for (const layer of layersOf(dag)) {
    if (cutoff !== null && layer > cutoff) continue;
    const nodes = dag.nodes
      .filter((n) => n.layer === layer)
      .map((n) => {
        const cls =
          highlighted === null
            ? "node"
            : highlighted.has(n.node_id)
              ? "node highlighted"
              : "node dimmed";
        const parents = n.parents.length
          ? `<span class="parents">&larr; ${n.parents.map(escapeHtml).join(", ")}</span>`
          : "";
        return (
          `<div class="${cls}" data-node-id="${escapeHtml(n.node_id)}">` +
          `<span class="node-id">${escapeHtml(n.node_id)}</span>` +
          `<span class="node-text">${escapeHtml(n.text)}</span>${parents}</div>`
        );
      })
      .join("");
    const collapsedHere = cutoff === layer;
    const hiddenCount = collapsedHere
      ? dag.nodes.filter((n) => n.layer > layer).length
      : 0;
    const badge = collapsedHere
      ? `<span class="collapse-badge">${hiddenCount} hidden in deeper layers</span>`
      : "";
    const action = collapsedHere ? "expand" : "collapse";
    bands.push(
      `<div class="band" data-layer="${layer}">` +
        `<div class="band-header">Layer ${layer}` +
        `<button class="layer-toggle" data-layer="${layer}">${action}</button>` +
        `${badge}</div><div class="band-nodes">${nodes}</div></div>`,
    );
  }
  return `<div class="dag">${bands.join("")}</div>`;
}

function impactRow(impact: Impact, selected: boolean): string {
  const badge = impact.affected
    ? '<span class="badge affected">affected</span>'
    : '<span class="badge">&mdash;</span>';
  const glyph = impact.direction
    ? `<span class="direction" title="${impact.direction}">` +
      `${DIRECTION_GLYPHS[impact.direction]}</span>`
    : '<span class="direction"></span>';
  const nodes = (impact.supporting_nodes ?? [])
    .map(
      (id) =>
        `<button class="node-link" data-node-id="${escapeHtml(id)}">` +
        `${escapeHtml(id)}</button>`,
    )
    .join(" ");
  const cls = selected ? "indicator selected" : "indicator";
  return (
    `<tr class="${cls}" data-indicator-id="${escapeHtml(impact.indicator_id)}">` +
    `<td>${escapeHtml(impact.indicator_id)}</td><td>${badge}</td>` +
    `<td>${glyph}</td><td>${nodes}</td></tr>`
  );
}

/** One row per vocabulary indicator: badge, direction glyph, node links. */
export function renderIndicators(record: EpisodeRecord, view: ViewState): string {
  const rows = (record.impacts ?? [])
    .map((i) => impactRow(i, i.indicator_id === view.selectedIndicator))
    .join("");
  return (
    '<table class="indicators"><thead><tr>' +
    "<th>Indicator</th><th>Affected</th><th>Direction</th><th>Supporting nodes</th>" +
    `</tr></thead><tbody>${rows}</tbody></table>`
  );
}

const METRIC_LABELS: [keyof Metrics, string][] = [
  ["coverage", "Expected-indicator coverage score"],
  ["discovery", "Overlooked-indicator discovery rate"],
  ["focus_ratio", "Model–government focus ratio"],
];

/** The three per-episode measures, or a note when annotations are missing. */
export function renderMetrics(record: EpisodeRecord): string {
  const metrics = record.metrics;
  if (!metrics) throw new Error(`record ${record.episode_id} has no metrics`);
  if (METRIC_LABELS.every(([key]) => metrics[key] === null)) {
    return '<p class="metrics-note">annotations not provided</p>';
  }
  const rows = METRIC_LABELS.map(([key, label]) => {
    const value = metrics[key];
    const shown = value === null ? "n/a" : value.toFixed(3);
    return `<tr><td>${label}</td><td class="value">${shown}</td></tr>`;
  }).join("");
  return `<table class="metrics"><tbody>${rows}</tbody></table>`;
}

/** Failure banner for failed jobs / error records. */
export function renderFailure(message: string): string {
  return `<div class="banner failure">${escapeHtml(message)}</div>`;
}
