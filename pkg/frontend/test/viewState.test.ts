import { describe, expect, it } from "vitest";
import {
  initialViewState,
  markerPickClick,
  pan,
  screenToWorld,
  setMode,
  setSelection,
  worldToScreen,
  zoomAt,
} from "../src/viewState.js";

describe("viewport transforms", () => {
  it("world/screen round trip", () => {
    let state = initialViewState();
    state = pan(state, 30, -12);
    state = zoomAt(state, 2.5, [40, 40]);
    const world: [number, number] = [3.7, -1.2];
    const back = screenToWorld(state.viewport, worldToScreen(state.viewport, world));
    expect(back[0]).toBeCloseTo(world[0], 9);
    expect(back[1]).toBeCloseTo(world[1], 9);
  });

  it("zoomAt keeps the anchor screen point fixed", () => {
    const state = initialViewState();
    const anchor: [number, number] = [17, 23];
    const worldAtAnchor = screenToWorld(state.viewport, anchor);
    const zoomed = zoomAt(state, 3, anchor);
    const after = worldToScreen(zoomed.viewport, worldAtAnchor);
    expect(after[0]).toBeCloseTo(anchor[0], 9);
    expect(after[1]).toBeCloseTo(anchor[1], 9);
  });

  it("pan moves world content by the screen delta", () => {
    const state = initialViewState();
    const before = worldToScreen(state.viewport, [1, 1]);
    const panned = pan(state, 10, 5);
    const after = worldToScreen(panned.viewport, [1, 1]);
    expect(after[0] - before[0]).toBeCloseTo(10, 9);
    expect(after[1] - before[1]).toBeCloseTo(5, 9);
  });
});

describe("marker-pick mode", () => {
  it("alternates exemplar node then target node into pairs", () => {
    let state = setMode(initialViewState(), "marker-pick");
    state = markerPickClick(state, "s1");
    expect(state.pendingSource).toBe("s1");
    expect(state.pendingMarkers).toEqual([]);
    state = markerPickClick(state, "t4");
    expect(state.pendingSource).toBeNull();
    expect(state.pendingMarkers).toEqual([{ source: "s1", target: "t4" }]);
    state = markerPickClick(state, "s2");
    state = markerPickClick(state, "t9");
    expect(state.pendingMarkers).toHaveLength(2);
  });

  it("clicks outside marker-pick mode are ignored", () => {
    const state = markerPickClick(initialViewState(), "s1");
    expect(state.pendingSource).toBeNull();
    expect(state.pendingMarkers).toEqual([]);
  });
});

describe("selection", () => {
  it("setSelection replaces the set and leaves the old state untouched", () => {
    const a = initialViewState();
    const b = setSelection(a, ["x", "y"]);
    expect(b.selection).toEqual(new Set(["x", "y"]));
    expect(a.selection.size).toBe(0);
  });
});
