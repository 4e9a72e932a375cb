import type { Point } from "./types.js";

export type Mode = "explore" | "lasso" | "drag" | "marker-pick";

export interface Viewport {
  /** world -> screen: screen = (world - center) * zoom + screenOrigin */
  centerX: number;
  centerY: number;
  zoom: number;
  screenOriginX: number;
  screenOriginY: number;
}

export interface MarkerPair {
  source: string;
  target: string;
}

/**
 * Pure UI state: viewport transform, current selection, interaction mode and
 * the half-built marker pair while in marker-pick mode. All updates return a
 * new state object so rendering stays a pure function of its inputs.
 */
export interface ViewState {
  viewport: Viewport;
  selection: Set<string>;
  mode: Mode;
  pendingMarkers: MarkerPair[];
  /** exemplar node clicked first in marker-pick, awaiting its target mate */
  pendingSource: string | null;
}

export function initialViewState(): ViewState {
  return {
    viewport: { centerX: 0, centerY: 0, zoom: 1, screenOriginX: 0, screenOriginY: 0 },
    selection: new Set(),
    mode: "explore",
    pendingMarkers: [],
    pendingSource: null,
  };
}

export function worldToScreen(v: Viewport, p: Point): Point {
  return [
    (p[0] - v.centerX) * v.zoom + v.screenOriginX,
    (p[1] - v.centerY) * v.zoom + v.screenOriginY,
  ];
}

export function screenToWorld(v: Viewport, p: Point): Point {
  return [
    (p[0] - v.screenOriginX) / v.zoom + v.centerX,
    (p[1] - v.screenOriginY) / v.zoom + v.centerY,
  ];
}

export function pan(state: ViewState, dxScreen: number, dyScreen: number): ViewState {
  const v = state.viewport;
  return {
    ...state,
    viewport: {
      ...v,
      centerX: v.centerX - dxScreen / v.zoom,
      centerY: v.centerY - dyScreen / v.zoom,
    },
  };
}

/** Zoom about a fixed screen point: that point maps to the same world point. */
export function zoomAt(state: ViewState, factor: number, screenPoint: Point): ViewState {
  const v = state.viewport;
  const anchor = screenToWorld(v, screenPoint);
  const zoom = v.zoom * factor;
  return {
    ...state,
    viewport: {
      ...v,
      zoom,
      centerX: anchor[0] - (screenPoint[0] - v.screenOriginX) / zoom,
      centerY: anchor[1] - (screenPoint[1] - v.screenOriginY) / zoom,
    },
  };
}

export function setMode(state: ViewState, mode: Mode): ViewState {
  return { ...state, mode, pendingSource: mode === "marker-pick" ? state.pendingSource : null };
}

export function setSelection(state: ViewState, ids: Iterable<string>): ViewState {
  return { ...state, selection: new Set(ids) };
}

/**
 * Marker-pick click: exemplar node first, then its target mate; a completed
 * pair is appended and the rubber band resets.
 */
export function markerPickClick(state: ViewState, nodeId: string): ViewState {
  if (state.mode !== "marker-pick") return state;
  if (state.pendingSource === null) {
    return { ...state, pendingSource: nodeId };
  }
  return {
    ...state,
    pendingMarkers: [...state.pendingMarkers, { source: state.pendingSource, target: nodeId }],
    pendingSource: null,
  };
}
