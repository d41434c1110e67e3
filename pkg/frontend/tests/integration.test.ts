// End-to-end: drive the real map service (spawned uvicorn, fixture backend)
// through the UI's API client, store, and renderers.

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { ApiClient } from "../src/api.js";
import { SessionStore } from "../src/state.js";
import { EDGE_COLOR, NODE_FILL, mapTransform, renderMap, renderChart, DIST_COLOR } from "../src/render.js";
import type { ScriptDoc, SessionDocument } from "../src/types.js";
import { FakeCtx } from "./fake_ctx.js";

const FIXTURES = new URL("../../src/nnm/fixtures/", import.meta.url).pathname;
const ROE_TEMPLATE = "Here's a short list of military rules of engagement like '{}':";
const ROE_SEED = "It is better to overreact than underreact";
const MAXIM = "If in doubt, empty your magazine.";
const VIEW = { width: 640, height: 480 };

const port = 8600 + Math.floor(Math.random() * 1000);
const base = `http://127.0.0.1:${port}`;
let server: ChildProcess;

async function waitForServer(timeoutMs = 20000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${base}/sessions/probe`);
      if (response.status === 404) return;
    } catch {
      // not listening yet
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error("map service did not come up in time");
}

beforeAll(async () => {
  const dataDir = mkdtempSync(join(tmpdir(), "nnm-ui-test-"));
  server = spawn(
    "python3",
    [
      "-m", "nnm.cli", "serve",
      "--addr", `127.0.0.1:${port}`,
      "--data-dir", dataDir,
      "--backend", `fixture:${join(FIXTURES, "roe_backend.tsv")}`,
    ],
    { stdio: "ignore" },
  );
  await waitForServer();
}, 30000);

afterAll(() => {
  server?.kill();
});

describe("against the live service", () => {
  it("builder flow: prompt, assign, layout; the new node and its line render", async () => {
    const api = new ApiClient(base);
    const store = new SessionStore(api);
    const sid = await store.init();

    await store.submitPrompt(ROE_TEMPLATE, ROE_SEED, "masculine");
    expect(store.state.doc?.pending.map((f) => f.text)).toContain(MAXIM);
    const fragment = store.state.doc!.pending.find((f) => f.text === MAXIM)!;

    await store.assignFragment(fragment.id, "kill the enemy");
    await store.runLayout({ iterations: 150 });

    // the view mirrors the server document exactly
    expect(store.state.doc).toEqual(await api.getDocument(sid));

    const graph = store.state.doc!.graph;
    const names = graph.nodes.map((n) => n.name);
    expect(names).toEqual(["masculine", "kill the enemy"]);
    expect(graph.edges).toEqual([[0, 1]]);

    const ctx = new FakeCtx();
    renderMap(ctx, graph, store.state.agents, VIEW);
    expect(ctx.texts()).toContain("kill the enemy");
    const transform = mapTransform(graph, VIEW);
    const a = transform(graph.nodes[0].position!);
    const b = transform(graph.nodes[1].position!);
    const line = ctx.segments().find(
      (s) =>
        s.style === EDGE_COLOR &&
        Math.hypot(s.from[0] - a[0], s.from[1] - a[1]) < 1e-6 &&
        Math.hypot(s.to[0] - b[0], s.to[1] - b[1]) < 1e-6,
    );
    expect(line).toBeDefined();
    expect(ctx.circles("fill").filter((c) => c.style === NODE_FILL)).toHaveLength(2);
  }, 30000);

  it("viewer flow: advance moves the subordinate marker and appends a chart point", async () => {
    const api = new ApiClient(base);
    const store = new SessionStore(api);
    const sid = await store.init();

    // load the packaged demo map and scenario script through the API
    const mapDoc = JSON.parse(readFileSync(join(FIXTURES, "roe_map.json"), "utf-8"));
    const document: SessionDocument = {
      schema_version: 1,
      session_id: sid,
      graph: mapDoc,
      pending: [],
      next_fragment_id: 1,
      script: null,
      evaluation: null,
      updated_at: "T0",
    };
    await api.putDocument(sid, document);
    const script = JSON.parse(
      readFileSync(join(FIXTURES, "roe_script.json"), "utf-8"),
    ) as ScriptDoc;
    await store.attach(sid);
    await store.loadScript(script);
    expect(store.scriptLength()).toBe(8);

    await store.step("advance");
    expect(store.state.records).toHaveLength(1); // chart point appended
    await store.step("advance");
    expect(store.state.records).toHaveLength(2);
    expect(store.state.agents.SUBORDINATE).toBeDefined();

    // step 3 retargets the subordinate from "duty" to "careful": the wall
    // clock between polls moves the marker toward the new target
    await store.step("advance");
    await store.pollFrame();
    const before = store.state.agents.SUBORDINATE.position;
    await new Promise((resolve) => setTimeout(resolve, 80));
    await store.pollFrame();
    const after = store.state.agents.SUBORDINATE.position;
    const moved = Math.hypot(after[0] - before[0], after[1] - before[1]);
    expect(moved).toBeGreaterThan(0);

    const chart = new FakeCtx();
    renderChart(chart, store.state.records, { width: 640, height: 200 });
    expect(chart.circles("fill").filter((c) => c.style === DIST_COLOR)).toHaveLength(3);

    // the rendered model still mirrors GET /sessions/{id}
    const serverDoc = await api.getDocument(sid);
    expect(store.state.cursor).toBe(serverDoc.evaluation!.cursor);
    expect(store.state.records).toEqual(serverDoc.evaluation!.records);
  }, 30000);

  it("reset clears the agent markers", async () => {
    const api = new ApiClient(base);
    const store = new SessionStore(api);
    const sid = await store.init();
    const mapDoc = JSON.parse(readFileSync(join(FIXTURES, "roe_map.json"), "utf-8"));
    await api.putDocument(sid, {
      schema_version: 1,
      session_id: sid,
      graph: mapDoc,
      pending: [],
      next_fragment_id: 1,
      script: null,
      evaluation: null,
      updated_at: "T0",
    });
    const script = JSON.parse(
      readFileSync(join(FIXTURES, "roe_script.json"), "utf-8"),
    ) as ScriptDoc;
    await store.attach(sid);
    await store.loadScript(script);
    await store.step("advance");
    await store.step("advance");
    expect(Object.keys(store.state.agents)).not.toHaveLength(0);

    await store.step("reset");
    await store.pollFrame();
    expect(store.state.agents).toEqual({});
    expect(store.state.records).toEqual([]);

    const ctx = new FakeCtx();
    renderMap(ctx, store.state.doc!.graph, store.state.agents, VIEW);
    const markerColors = new Set(["#d62728", "#1f77b4"]);
    expect(ctx.circles("fill").some((c) => markerColors.has(c.style))).toBe(false);
  }, 30000);

  it("serves the trajectory CSV the chart is fed from", async () => {
    const api = new ApiClient(base);
    const store = new SessionStore(api);
    const sid = await store.init();
    const mapDoc = JSON.parse(readFileSync(join(FIXTURES, "roe_map.json"), "utf-8"));
    await api.putDocument(sid, {
      schema_version: 1,
      session_id: sid,
      graph: mapDoc,
      pending: [],
      next_fragment_id: 1,
      script: null,
      evaluation: null,
      updated_at: "T0",
    });
    await store.attach(sid);
    await store.loadScript(
      JSON.parse(readFileSync(join(FIXTURES, "roe_script.json"), "utf-8")),
    );
    for (let i = 0; i < 8; i++) await store.step("advance");
    const response = await fetch(api.trajectoryCsvUrl(sid));
    const lines = (await response.text()).trim().split("\n");
    expect(lines[0]).toBe("script_id,role,similarity,node,node_dist,text_similarity");
    expect(lines).toHaveLength(9);
    expect(lines[1].endsWith("NA")).toBe(true);
  }, 30000);
});
