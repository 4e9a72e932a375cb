import type { GraphNode, Point } from "./types.js";

/**
 * Even-odd point-in-polygon test (pnpoly crossing parity): walk the edges and
 * flip containment each time the horizontal ray to +infinity crosses one.
 * Points exactly on an edge are treated as outside ("strictly inside").
 */
export function pointInPolygon(p: Point, polygon: readonly Point[]): boolean {
  const [x, y] = p;
  let inside = false;
  const n = polygon.length;
  for (let i = 0, j = n - 1; i < n; j = i++) {
    const [xi, yi] = polygon[i];
    const [xj, yj] = polygon[j];
    // on the segment (collinear and within its box): not strictly inside
    const cross = (xj - xi) * (y - yi) - (yj - yi) * (x - xi);
    if (
      cross === 0 &&
      x >= Math.min(xi, xj) &&
      x <= Math.max(xi, xj) &&
      y >= Math.min(yi, yj) &&
      y <= Math.max(yi, yj)
    ) {
      return false;
    }
    if (yi > y !== yj > y) {
      const xCross = ((xj - xi) * (y - yi)) / (yj - yi) + xi;
      if (x < xCross) inside = !inside;
    }
  }
  return inside;
}

/**
 * Lasso selection: ids of the nodes strictly inside the closed polygon under
 * the even-odd rule. Degenerate polygons (< 3 points) select nothing.
 */
export function lassoSelect(
  nodes: readonly GraphNode[],
  polygon: readonly Point[],
): Set<string> {
  const selected = new Set<string>();
  if (polygon.length < 3) return selected;
  for (const node of nodes) {
    if (pointInPolygon([node.x, node.y], polygon)) selected.add(node.id);
  }
  return selected;
}

/** Clamp a world position into rectangular bounds; flags whether it moved. */
export function clampToBounds(
  p: Point,
  bounds: { minX: number; minY: number; maxX: number; maxY: number },
): { point: Point; clamped: boolean } {
  const x = Math.min(Math.max(p[0], bounds.minX), bounds.maxX);
  const y = Math.min(Math.max(p[1], bounds.minY), bounds.maxY);
  return { point: [x, y], clamped: x !== p[0] || y !== p[1] };
}
