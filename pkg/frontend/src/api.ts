// Typed client for the map-service HTTP API. The fetch function is
// injectable so tests can run against a recorded transport.

import type {
  FragmentDoc,
  FrameResponse,
  LayoutRequest,
  ScriptDoc,
  SessionDocument,
  SimilarResult,
  StepOutcome,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export class ApiClient {
  private fetchFn: FetchLike;

  constructor(public baseUrl = "", fetchFn?: FetchLike) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const payload = await response.json();
        if (payload && typeof payload.detail === "string") detail = payload.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  async createSession(): Promise<string> {
    const out = await this.request<{ session_id: string }>("POST", "/sessions");
    return out.session_id;
  }

  getDocument(sessionId: string): Promise<SessionDocument> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  putDocument(sessionId: string, doc: SessionDocument): Promise<SessionDocument> {
    return this.request("PUT", `/sessions/${sessionId}`, doc);
  }

  async submitPrompt(
    sessionId: string,
    template: string,
    seed: string,
    seedGroup?: string,
  ): Promise<FragmentDoc[]> {
    const out = await this.request<{ pending: FragmentDoc[] }>(
      "POST",
      `/sessions/${sessionId}/prompt`,
      { template, seed, seed_group: seedGroup ?? null },
    );
    return out.pending;
  }

  assignFragment(
    sessionId: string,
    fragmentId: number,
    nodeName: string,
  ): Promise<{ ok: boolean; node_id: number }> {
    return this.request("POST", `/sessions/${sessionId}/fragments/${fragmentId}/assign`, {
      node_name: nodeName,
    });
  }

  runLayout(sessionId: string, params: LayoutRequest = {}): Promise<{
    positions: Record<string, [number, number]>;
    iterations: number;
  }> {
    return this.request("POST", `/sessions/${sessionId}/layout`, params);
  }

  async similar(sessionId: string, text: string, k: number): Promise<SimilarResult[]> {
    const out = await this.request<{ results: SimilarResult[] }>(
      "POST",
      `/sessions/${sessionId}/similar`,
      { text, k },
    );
    return out.results;
  }

  async putScript(sessionId: string, script: ScriptDoc): Promise<number> {
    const out = await this.request<{ steps: number }>(
      "PUT",
      `/sessions/${sessionId}/script`,
      script,
    );
    return out.steps;
  }

  step(sessionId: string, direction: "advance" | "reverse" | "reset"): Promise<StepOutcome> {
    return this.request("POST", `/sessions/${sessionId}/script/step`, { direction });
  }

  frame(sessionId: string): Promise<FrameResponse> {
    return this.request("GET", `/sessions/${sessionId}/frame`);
  }

  trajectoryCsvUrl(sessionId: string): string {
    return `${this.baseUrl}/sessions/${sessionId}/trajectory.csv`;
  }

  exportGmlUrl(sessionId: string): string {
    return `${this.baseUrl}/sessions/${sessionId}/export.gml`;
  }
}
