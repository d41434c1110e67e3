import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionStore } from "../src/state.js";
import type { SessionDocument } from "../src/types.js";
import { MockService, emptyDocument } from "./mock_service.js";


function storeWith(service: MockService): SessionStore {
  return new SessionStore(new ApiClient("", service.fetch));
}

function withNode(doc: SessionDocument): SessionDocument {
  doc.graph.nodes.push({
    id: 0,
    name: "masculine",
    group: "masculine",
    query_count: 1,
    position: null,
    topics: [],
  });
  doc.pending.push({ id: 1, text: "If in doubt, empty your magazine.", prompt: "p", seed_node: 0 });
  return doc;
}

describe("SessionStore", () => {
  it("mirrors the server document after every acknowledged mutation", async () => {
    const service = new MockService();
    const doc = emptyDocument("s1");
    service.on("POST", "/sessions", () => [201, { session_id: "s1" }]);
    service.on("GET", "/sessions/s1", () => [200, doc]);
    service.on("POST", "/sessions/s1/prompt", () => {
      withNode(doc);
      return [200, { pending: doc.pending }];
    });

    const store = storeWith(service);
    await store.init();
    expect(store.state.doc).toEqual(emptyDocument("s1"));

    await store.submitPrompt("t {}", "seed", "masculine");
    // the state reflects the re-fetched document, not a local guess
    expect(store.state.doc?.pending).toHaveLength(1);
    expect(store.state.doc?.graph.nodes[0].name).toBe("masculine");
    const methods = service.calls.map((c) => `${c.method} ${c.path}`);
    expect(methods).toEqual([
      "POST /sessions",
      "GET /sessions/s1",
      "POST /sessions/s1/prompt",
      "GET /sessions/s1",
    ]);
  });

  it("keeps state unchanged and raises a banner when a call fails", async () => {
    const service = new MockService();
    const doc = emptyDocument("s1");
    service.on("POST", "/sessions", () => [201, { session_id: "s1" }]);
    service.on("GET", "/sessions/s1", () => [200, doc]);
    service.on("POST", "/sessions/s1/prompt", () => [
      502,
      { detail: "generation backend failed after retries: down" },
    ]);

    const store = storeWith(service);
    await store.init();
    const before = store.state.doc;
    await expect(store.submitPrompt("t {}", "seed")).rejects.toThrow();
    expect(store.state.doc).toEqual(before);
    expect(store.state.banner).toContain("generation backend failed");
    store.dismissBanner();
    expect(store.state.banner).toBeNull();
  });

  it("clears the fragment selection once the fragment is assigned away", async () => {
    const service = new MockService();
    const doc = withNode(emptyDocument("s1"));
    service.on("POST", "/sessions", () => [201, { session_id: "s1" }]);
    service.on("GET", "/sessions/s1", () => [200, doc]);
    service.on("POST", /\/sessions\/s1\/fragments\/1\/assign$/, () => {
      doc.pending = [];
      return [200, { ok: true, node_id: 1 }];
    });

    const store = storeWith(service);
    await store.init();
    store.selectFragment(1);
    expect(store.state.selectedFragment).toBe(1);
    await store.assignFragment(1, "kill the enemy");
    expect(store.state.selectedFragment).toBeNull();
  });

  it("pollFrame updates agents and records without refetching the document", async () => {
    const service = new MockService();
    const doc = emptyDocument("s1");
    service.on("POST", "/sessions", () => [201, { session_id: "s1" }]);
    service.on("GET", "/sessions/s1", () => [200, doc]);
    service.on("GET", "/sessions/s1/frame", () => [
      200,
      {
        cursor: 2,
        agents: {
          SUBORDINATE: {
            role: "SUBORDINATE",
            position: [1, 2],
            speed: 100,
            target_node: 1,
            color: "#1f77b4",
          },
        },
        records: [
          {
            step_id: 1,
            role: "COMMANDER",
            match_similarity: 0.5,
            node: "careful",
            node_dist: 10,
            text_similarity: null,
          },
        ],
      },
    ]);

    const store = storeWith(service);
    await store.init();
    const docCalls = () =>
      service.calls.filter((c) => c.method === "GET" && c.path === "/sessions/s1").length;
    const beforeDocCalls = docCalls();
    await store.pollFrame();
    expect(store.state.cursor).toBe(2);
    expect(store.state.agents.SUBORDINATE.position).toEqual([1, 2]);
    expect(store.state.records).toHaveLength(1);
    expect(docCalls()).toBe(beforeDocCalls);
  });

  it("notifies subscribers on every state change", async () => {
    const service = new MockService();
    service.on("POST", "/sessions", () => [201, { session_id: "s1" }]);
    service.on("GET", "/sessions/s1", () => [200, emptyDocument("s1")]);
    const store = storeWith(service);
    const seen: number[] = [];
    store.subscribe(() => seen.push(1));
    await store.init();
    store.selectFragment(null);
    expect(seen.length).toBeGreaterThanOrEqual(2);
  });
});
