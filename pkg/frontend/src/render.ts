import type { GraphJson, Point } from "./types.js";
import { worldToScreen, type ViewState } from "./viewState.js";
import type { PastePreview } from "./editor.js";

/**
 * Canvas rendering as data: a deterministic draw-command list computed purely
 * from (ViewState, graph, overlays). The actual canvas binding just replays
 * the list, so identical inputs are pixel-stable by construction.
 */
export type DrawCommand =
  | { kind: "edge"; from: Point; to: Point; emphasis: "normal" | "selected" | "preview" }
  | { kind: "node"; id: string; at: Point; emphasis: "normal" | "selected" | "preview" }
  | { kind: "rubber-band"; from: Point; to: Point }
  | { kind: "lasso"; points: Point[] };

export interface RenderInput {
  view: ViewState;
  graph: GraphJson;
  preview?: PastePreview | null;
  lassoPath?: readonly Point[];
}

export function render(input: RenderInput): DrawCommand[] {
  const { view, graph } = input;
  const commands: DrawCommand[] = [];
  const positions = new Map<string, Point>();
  for (const node of graph.nodes) positions.set(node.id, [node.x, node.y]);
  const previewPositions = new Map<string, Point>();
  if (input.preview) {
    for (const [id, p] of Object.entries(input.preview.positions)) {
      previewPositions.set(id, p);
    }
  }

  const place = (id: string): { at: Point; emphasis: "normal" | "selected" | "preview" } => {
    const overlay = previewPositions.get(id);
    if (overlay) return { at: worldToScreen(view.viewport, overlay), emphasis: "preview" };
    const base = positions.get(id);
    if (!base) throw new Error(`unknown node ${id}`);
    return {
      at: worldToScreen(view.viewport, base),
      emphasis: view.selection.has(id) ? "selected" : "normal",
    };
  };

  for (const edge of graph.edges) {
    const a = place(edge.source);
    const b = place(edge.target);
    const emphasis =
      a.emphasis === "preview" || b.emphasis === "preview"
        ? "preview"
        : a.emphasis === "selected" && b.emphasis === "selected"
          ? "selected"
          : "normal";
    commands.push({ kind: "edge", from: a.at, to: b.at, emphasis });
  }
  for (const node of graph.nodes) {
    const placed = place(node.id);
    commands.push({ kind: "node", id: node.id, at: placed.at, emphasis: placed.emphasis });
  }

  if (view.mode === "marker-pick" && view.pendingSource !== null) {
    const anchor = positions.get(view.pendingSource);
    if (anchor) {
      const from = worldToScreen(view.viewport, anchor);
      commands.push({ kind: "rubber-band", from, to: from });
    }
  }
  if (input.lassoPath && input.lassoPath.length >= 2) {
    commands.push({
      kind: "lasso",
      points: input.lassoPath.map((p) => worldToScreen(view.viewport, p)),
    });
  }
  return commands;
}
