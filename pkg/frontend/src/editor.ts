import type { ApiClient } from "./api.js";
import { clampToBounds } from "./geometry.js";
import { debounce } from "./debounce.js";
import type { GraphJson, HistoryEntry, Point, TargetSuggestion } from "./types.js";

export interface WorldBounds {
  minX: number;
  minY: number;
  maxX: number;
  maxY: number;
}

export interface PastePreview {
  targetIndex: number;
  positions: Record<string, [number, number]>;
}

const DRAG_SYNC_DELAY_MS = 150;

/**
 * Editor session store: the canvas-side copy of the service session. Local
 * position edits apply immediately and sync to the service debounced; the
 * format-painter flow is copy -> paste (preview overlay) -> accept/reject.
 * Accepting replaces the local graph with the service-committed layout, so
 * the canvas always equals the committed state after accept.
 */
export class EditorStore {
  graph: GraphJson | null = null;
  revision = 0;
  exemplar: string[] = [];
  exemplarModified = false;
  workingPositions: Record<string, [number, number]> = {};
  targets: TargetSuggestion[] = [];
  clipboardFilled = false;
  preview: PastePreview | null = null;
  history: HistoryEntry[] = [];
  lastDragClamped = false;
  syncedDragCount = 0;

  private sessionId: string | null = null;
  private readonly positionSync = debounce((positions: Record<string, [number, number]>) => {
    void this.pushPositions(positions);
  }, DRAG_SYNC_DELAY_MS);
  private pendingPositions: Record<string, [number, number]> = {};
  private retrieveAbort: AbortController | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly bounds: WorldBounds = { minX: -1e6, minY: -1e6, maxX: 1e6, maxY: 1e6 },
  ) {}

  get session(): string {
    if (this.sessionId === null) throw new Error("no session open");
    return this.sessionId;
  }

  async open(graph: GraphJson): Promise<void> {
    const created = await this.api.createSession();
    this.sessionId = created.id;
    const loaded = await this.api.loadGraph(created.id, graph, created.revision);
    this.graph = graph;
    this.revision = loaded.revision;
  }

  nodePosition(id: string): Point {
    const local = this.workingPositions[id];
    if (local) return local;
    const node = this.graph?.nodes.find((n) => n.id === id);
    if (!node) throw new Error(`unknown node ${id}`);
    return [node.x, node.y];
  }

  async selectExemplar(nodes: string[]): Promise<void> {
    const res = await this.api.setExemplar(this.session, nodes, this.revision);
    this.revision = res.revision;
    this.exemplar = res.nodes;
    this.exemplarModified = false;
    this.workingPositions = {};
    this.clipboardFilled = false;
    this.preview = null;
  }

  /** Gallery order is exactly the service's similarity ranking. */
  async retrieveTargets(opts: { k?: number; epsilon?: number } = {}): Promise<TargetSuggestion[]> {
    this.retrieveAbort?.abort();
    this.retrieveAbort = new AbortController();
    const res = await this.api.retrieve(this.session, opts, this.retrieveAbort.signal);
    this.revision = res.revision;
    this.targets = res.targets;
    return res.targets;
  }

  /**
   * Drag an exemplar node: immediate local update (clamped to world bounds),
   * debounced sync of the accumulated positions to the service.
   */
  dragNode(id: string, to: Point): void {
    if (!this.exemplar.includes(id)) throw new Error(`node ${id} not in exemplar`);
    const { point, clamped } = clampToBounds(to, this.bounds);
    this.lastDragClamped = clamped;
    this.workingPositions[id] = [point[0], point[1]];
    this.exemplarModified = true;
    this.pendingPositions[id] = [point[0], point[1]];
    this.positionSync.call({ ...this.pendingPositions });
  }

  /** Drag release: push the pending positions without waiting out the delay. */
  releaseDrag(): void {
    this.positionSync.flush();
  }

  private async pushPositions(positions: Record<string, [number, number]>): Promise<void> {
    this.pendingPositions = {};
    const res = await this.api.moveExemplarNodes(this.session, positions, this.revision);
    this.revision = res.revision;
    this.syncedDragCount += 1;
  }

  /** Copy is a no-op (and paste stays disabled) without a real modification. */
  get canCopy(): boolean {
    return this.exemplarModified;
  }

  get canPaste(): boolean {
    return this.clipboardFilled;
  }

  async copyModification(): Promise<void> {
    if (!this.canCopy) throw new Error("exemplar has no modification to copy");
    this.positionSync.flush();
    const res = await this.api.copy(this.session, this.revision);
    this.revision = res.revision;
    this.clipboardFilled = res.modified;
  }

  async pasteOnTarget(targetIndex: number): Promise<PastePreview> {
    if (!this.canPaste) throw new Error("clipboard is empty");
    const res = await this.api.paste(this.session, targetIndex);
    this.preview = { targetIndex, positions: res.proposal };
    return this.preview;
  }

  /** Reject: drop the overlay, canvas untouched. */
  rejectPreview(): void {
    this.preview = null;
  }

  /** Accept: commit on the service and adopt the merged layout wholesale. */
  async acceptPreview(): Promise<void> {
    if (this.preview === null) throw new Error("no preview to accept");
    const res = await this.api.commit(this.session);
    this.revision = res.revision;
    this.graph = res.graph;
    this.preview = null;
    await this.refreshHistory();
  }

  async undo(): Promise<void> {
    const res = await this.api.undo(this.session);
    this.revision = res.revision;
    this.graph = res.graph;
    await this.refreshHistory();
  }

  private async refreshHistory(): Promise<void> {
    const snap = await this.api.snapshot(this.session);
    this.history = snap.history;
  }

  /** History view entries, most recent first. */
  historyView(): HistoryEntry[] {
    return [...this.history].reverse();
  }
}
