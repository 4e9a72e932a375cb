/** Shared wire and domain types mirroring the session service's JSON. */

export interface GraphNode {
  id: string;
  x: number;
  y: number;
}

export interface GraphEdge {
  source: string;
  target: string;
}

export interface GraphJson {
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface TargetSuggestion {
  nodes: string[];
  similarity: number;
}

export interface HistoryEntry {
  target_index: number;
  before: Record<string, [number, number]>;
  after: Record<string, [number, number]>;
}

export interface SessionSnapshot {
  id: string;
  revision: number;
  graph: GraphJson | null;
  exemplar: string[] | null;
  exemplar_before: Record<string, [number, number]>;
  working_positions: Record<string, [number, number]>;
  targets: TargetSuggestion[];
  clipboard: unknown;
  history: HistoryEntry[];
}

export type Point = readonly [number, number];
