import { afterEach, describe, expect, test, vi } from "vitest";
import { ApiClient, ConflictError } from "../src/api.js";

type Captured = { url: string; init: RequestInit };

function mockFetch(status: number, body?: unknown): Captured {
  const captured: Captured = { url: "", init: {} };
  vi.stubGlobal("fetch", async (url: string, init: RequestInit) => {
    captured.url = url;
    captured.init = init;
    return new Response(body === undefined ? null : JSON.stringify(body), { status });
  });
  return captured;
}

afterEach(() => vi.unstubAllGlobals());

describe("ApiClient", () => {
  test("patchCells sends If-Match and the edit list", async () => {
    const captured = mockFetch(200, { generation: 4, changed: ["Calc!B2"] });
    const api = new ApiClient("");
    await api.patchCells([{ addr: "Calc!B2", content: { v: 12 } }], 3);
    expect(captured.url).toBe("/api/cells");
    expect(captured.init.method).toBe("PATCH");
    expect((captured.init.headers as Record<string, string>)["If-Match"]).toBe("3");
    expect(JSON.parse(captured.init.body as string)).toEqual([
      { addr: "Calc!B2", content: { v: 12 } },
    ]);
  });

  test("409 surfaces as ConflictError with the server generation", async () => {
    mockFetch(409, { error: "conflict", generation: 17 });
    const api = new ApiClient("");
    await expect(api.patchCells([], 3)).rejects.toThrowError(ConflictError);
    await api.patchCells([], 3).catch((err: ConflictError) => {
      expect(err.generation).toBe(17);
    });
  });

  test("pollReport passes the cursor and maps 204 to null", async () => {
    const captured = mockFetch(204);
    const api = new ApiClient("");
    const result = await api.pollReport(42);
    expect(captured.url).toBe("/api/report?after=42");
    expect(result).toBeNull();
  });

  test("flagFinding posts status, note and until", async () => {
    const captured = mockFetch(200, { ok: true, generation: 9 });
    const api = new ApiClient("");
    await api.flagFinding("abc123", "holdOff", { note: "later", until: 40 });
    expect(captured.url).toBe("/api/findings/abc123/flag");
    expect(JSON.parse(captured.init.body as string)).toEqual({
      status: "holdOff",
      note: "later",
      until: 40,
    });
  });

  test("runScenario URL-encodes the scenario name", async () => {
    const captured = mockFetch(200, { scenario: "a b", passed: true, problems: [], results: [] });
    const api = new ApiClient("");
    await api.runScenario("a b");
    expect(captured.url).toBe("/api/scenarios/a%20b/run");
  });
});
