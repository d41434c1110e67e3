import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { MockService, emptyDocument } from "./mock_service.js";


function client(service: MockService): ApiClient {
  return new ApiClient("", service.fetch);
}

describe("ApiClient", () => {
  it("creates sessions", async () => {
    const service = new MockService();
    service.on("POST", "/sessions", () => [201, { session_id: "abc" }]);
    expect(await client(service).createSession()).toBe("abc");
    expect(service.calls).toEqual([{ method: "POST", path: "/sessions", body: undefined }]);
  });

  it("fetches and replaces documents", async () => {
    const service = new MockService();
    const doc = emptyDocument("s1");
    service.on("GET", "/sessions/s1", () => [200, doc]);
    service.on("PUT", "/sessions/s1", (body) => [200, body]);
    const api = client(service);
    expect(await api.getDocument("s1")).toEqual(doc);
    expect(await api.putDocument("s1", doc)).toEqual(doc);
  });

  it("submits prompts with the seed group", async () => {
    const service = new MockService();
    service.on("POST", "/sessions/s1/prompt", (body) => [
      200,
      { pending: [{ id: 1, text: "x", prompt: "p", seed_node: 0 }] },
    ]);
    const pending = await client(service).submitPrompt("s1", "t {}", "seed", "masculine");
    expect(pending).toHaveLength(1);
    expect(service.calls[0].body).toEqual({
      template: "t {}",
      seed: "seed",
      seed_group: "masculine",
    });
  });

  it("assigns fragments and steps scripts", async () => {
    const service = new MockService();
    service.on("POST", "/sessions/s1/fragments/3/assign", (body) => [
      200,
      { ok: true, node_id: 7 },
    ]);
    service.on("POST", "/sessions/s1/script/step", (body) => [
      200,
      { cursor: 1, moved: true, record: null },
    ]);
    const api = client(service);
    expect(await api.assignFragment("s1", 3, "kill the enemy")).toEqual({
      ok: true,
      node_id: 7,
    });
    expect(await api.step("s1", "advance")).toEqual({ cursor: 1, moved: true, record: null });
    expect(service.calls[0].body).toEqual({ node_name: "kill the enemy" });
    expect(service.calls[1].body).toEqual({ direction: "advance" });
  });

  it("maps error payloads to ApiError with the server detail", async () => {
    const service = new MockService();
    service.on("GET", "/sessions/missing", () => [404, { detail: "unknown session missing" }]);
    const err = await client(service)
      .getDocument("missing")
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(404);
    expect((err as ApiError).detail).toBe("unknown session missing");
  });

  it("builds download urls", () => {
    const api = new ApiClient("http://x");
    expect(api.trajectoryCsvUrl("s")).toBe("http://x/sessions/s/trajectory.csv");
    expect(api.exportGmlUrl("s")).toBe("http://x/sessions/s/export.gml");
  });
});
