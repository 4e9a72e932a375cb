import type { GraphJson, SessionSnapshot, TargetSuggestion } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

/**
 * Thin typed client for the session service. The fetch implementation is
 * injectable so tests can count calls or replay recorded responses. Each
 * request can carry an AbortSignal; callers cancel in-flight requests when a
 * newer user action supersedes them.
 */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    signal?: AbortSignal,
  ): Promise<T> {
    const res = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body !== undefined ? { "Content-Type": "application/json" } : undefined,
      body: body !== undefined ? JSON.stringify(body) : undefined,
      signal,
    });
    const payload = await res.json();
    if (!res.ok) {
      throw new ApiError(res.status, String(payload?.detail ?? "unknown error"));
    }
    return payload as T;
  }

  createSession(): Promise<{ id: string; revision: number }> {
    return this.request("POST", "/sessions");
  }

  loadGraph(sid: string, graph: GraphJson, revision?: number) {
    return this.request<{ revision: number; nodes: number; edges: number }>(
      "POST",
      `/sessions/${sid}/graph`,
      { graph, revision },
    );
  }

  setExemplar(sid: string, nodes: string[], revision?: number) {
    return this.request<{ revision: number; nodes: string[] }>(
      "POST",
      `/sessions/${sid}/exemplar`,
      { nodes, revision },
    );
  }

  retrieve(sid: string, opts: { k?: number; epsilon?: number } = {}, signal?: AbortSignal) {
    return this.request<{ revision: number; targets: TargetSuggestion[] }>(
      "POST",
      `/sessions/${sid}/retrieve`,
      opts,
      signal,
    );
  }

  moveExemplarNodes(
    sid: string,
    positions: Record<string, [number, number]>,
    revision?: number,
  ) {
    return this.request<{ revision: number }>(
      "POST",
      `/sessions/${sid}/exemplar/positions`,
      { positions, revision },
    );
  }

  copy(sid: string, revision?: number) {
    return this.request<{ revision: number; modified: boolean }>(
      "POST",
      `/sessions/${sid}/copy`,
      { revision },
    );
  }

  paste(sid: string, targetIndex: number, signal?: AbortSignal) {
    return this.request<{
      revision: number;
      proposal: Record<string, [number, number]>;
      report: Record<string, unknown>;
    }>("POST", `/sessions/${sid}/paste/${targetIndex}`, {}, signal);
  }

  commit(sid: string) {
    return this.request<{ revision: number; graph: GraphJson; history_length: number }>(
      "POST",
      `/sessions/${sid}/commit`,
      {},
    );
  }

  undo(sid: string) {
    return this.request<{ revision: number; graph: GraphJson }>(
      "POST",
      `/sessions/${sid}/undo`,
      {},
    );
  }

  snapshot(sid: string): Promise<SessionSnapshot> {
    return this.request("GET", `/sessions/${sid}`);
  }
}
