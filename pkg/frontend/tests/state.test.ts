import { describe, expect, it } from "vitest";

import { renderDag } from "../src/render.js";
import {
  collapseCutoff,
  collapseLayer,
  expandLayer,
  initialView,
  layersOf,
  reconcileView,
  selectIndicator,
  toggleLayer,
} from "../src/state.js";
import { baselineRecord, goldenRecord } from "./fixtures.js";

describe("collapse and expand", () => {
  const record = goldenRecord();
  const dag = record.dag!;

  it("collapse-then-expand is an involution on the rendered view", () => {
    for (const layer of layersOf(dag)) {
      const before = initialView();
      const after = expandLayer(collapseLayer(before, dag, layer), layer);
      expect(renderDag(record, after)).toBe(renderDag(record, before));
      expect([...after.collapsedLayers]).toEqual([...before.collapsedLayers]);
    }
  });

  it("toggle twice is also an involution", () => {
    const view = initialView();
    const twice = toggleLayer(toggleLayer(view, dag, 1), dag, 1);
    expect(renderDag(record, twice)).toBe(renderDag(record, view));
  });

  it("collapsing layer k hides deeper layers and shows a count badge", () => {
    const collapsed = collapseLayer(initialView(), dag, 1);
    const html = renderDag(record, collapsed);
    const hidden = dag.nodes.filter((n) => n.layer > 1).length;
    expect(html).toContain(`${hidden} hidden in deeper layers`);
    expect(html).not.toContain('data-layer="2"');
    expect(html).toContain('data-layer="1"');
  });

  it("collapsing a layer absent from the DAG is a no-op", () => {
    const view = initialView();
    expect(collapseLayer(view, dag, 99)).toBe(view);
  });

  it("cutoff is the shallowest collapsed layer", () => {
    let view = collapseLayer(initialView(), dag, 2);
    view = collapseLayer(view, dag, 1);
    expect(collapseCutoff(view)).toBe(1);
    expect(collapseCutoff(expandLayer(view, 1))).toBe(2);
  });

  it("state transitions never mutate the record", () => {
    const frozen = JSON.stringify(record);
    let view = initialView();
    for (const layer of layersOf(dag)) view = toggleLayer(view, dag, layer);
    view = selectIndicator(view, record.impacts![0].indicator_id);
    renderDag(record, view);
    expect(JSON.stringify(record)).toBe(frozen);
  });
});

describe("selection and reconciliation", () => {
  it("re-selecting the same indicator clears the selection", () => {
    const once = selectIndicator(initialView(), "gdp_growth");
    expect(once.selectedIndicator).toBe("gdp_growth");
    expect(selectIndicator(once, "gdp_growth").selectedIndicator).toBeNull();
  });

  it("loading a shallower DAG drops collapse state for missing layers", () => {
    const deep = goldenRecord().dag!;
    const shallow = baselineRecord().dag!;
    const view = collapseLayer(collapseLayer(initialView(), deep, 2), deep, 0);
    const reconciled = reconcileView(view, shallow);
    expect([...reconciled.collapsedLayers]).toEqual([0]);
  });
});
