// Client-side session state. The store only ever reflects acknowledged
// server state: every mutation awaits the call and then re-fetches the
// session document, so a failed call leaves the view untouched (no
// optimistic rendering) and raises a dismissible banner instead.

import { ApiClient } from "./api.js";
import type {
  AgentDoc,
  LayoutRequest,
  RecordDoc,
  ScriptDoc,
  SessionDocument,
  SimilarResult,
} from "./types.js";

export interface ViewState {
  sessionId: string | null;
  doc: SessionDocument | null;
  agents: Record<string, AgentDoc>;
  records: RecordDoc[];
  cursor: number;
  selectedFragment: number | null;
  banner: string | null;
}

export type Listener = (state: ViewState) => void;

function emptyState(): ViewState {
  return {
    sessionId: null,
    doc: null,
    agents: {},
    records: [],
    cursor: 0,
    selectedFragment: null,
    banner: null,
  };
}

export class SessionStore {
  state: ViewState = emptyState();
  private listeners: Listener[] = [];

  constructor(private api: ApiClient) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  private fail(err: unknown): never {
    this.state = { ...this.state, banner: err instanceof Error ? err.message : String(err) };
    this.emit();
    throw err;
  }

  dismissBanner(): void {
    this.state = { ...this.state, banner: null };
    this.emit();
  }

  selectFragment(fragmentId: number | null): void {
    this.state = { ...this.state, selectedFragment: fragmentId };
    this.emit();
  }

  async init(): Promise<string> {
    try {
      const sessionId = await this.api.createSession();
      this.state = { ...this.state, sessionId };
      await this.refresh();
      return sessionId;
    } catch (err) {
      this.fail(err);
    }
  }

  async attach(sessionId: string): Promise<void> {
    this.state = { ...this.state, sessionId };
    await this.refresh();
  }

  /** Re-fetch the session document; the view mirrors exactly what came back. */
  async refresh(): Promise<void> {
    const sessionId = this.requireSession();
    const doc = await this.api.getDocument(sessionId);
    const evaluation = doc.evaluation;
    this.state = {
      ...this.state,
      doc,
      agents: evaluation ? evaluation.agents : {},
      records: evaluation ? evaluation.records : [],
      cursor: evaluation ? evaluation.cursor : 0,
    };
    if (
      this.state.selectedFragment !== null &&
      !doc.pending.some((f) => f.id === this.state.selectedFragment)
    ) {
      this.state = { ...this.state, selectedFragment: null };
    }
    this.emit();
  }

  requireSession(): string {
    if (!this.state.sessionId) throw new Error("no session yet");
    return this.state.sessionId;
  }

  async submitPrompt(template: string, seed: string, seedGroup?: string): Promise<void> {
    try {
      await this.api.submitPrompt(this.requireSession(), template, seed, seedGroup);
      await this.refresh();
    } catch (err) {
      this.fail(err);
    }
  }

  async assignFragment(fragmentId: number, nodeName: string): Promise<void> {
    try {
      await this.api.assignFragment(this.requireSession(), fragmentId, nodeName);
      await this.refresh();
    } catch (err) {
      this.fail(err);
    }
  }

  async runLayout(params: LayoutRequest = {}): Promise<void> {
    try {
      await this.api.runLayout(this.requireSession(), params);
      await this.refresh();
    } catch (err) {
      this.fail(err);
    }
  }

  async findClosest(text: string, k: number): Promise<SimilarResult[]> {
    try {
      return await this.api.similar(this.requireSession(), text, k);
    } catch (err) {
      this.fail(err);
    }
  }

  async loadScript(script: ScriptDoc): Promise<void> {
    try {
      await this.api.putScript(this.requireSession(), script);
      await this.refresh();
    } catch (err) {
      this.fail(err);
    }
  }

  async step(direction: "advance" | "reverse" | "reset"): Promise<void> {
    try {
      await this.api.step(this.requireSession(), direction);
      await this.refresh();
    } catch (err) {
      this.fail(err);
    }
  }

  /** Poll the animation frame; read-only, so no document refresh. */
  async pollFrame(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) return;
    const frame = await this.api.frame(sessionId);
    this.state = {
      ...this.state,
      agents: frame.agents,
      records: frame.records,
      cursor: frame.cursor,
    };
    this.emit();
  }

  scriptLength(): number {
    return this.state.doc?.script?.steps.length ?? 0;
  }
}
