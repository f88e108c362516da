import { describe, expect, test } from "vitest";
import type { Finding, Report } from "../src/api.js";
import { ReportStore } from "../src/state.js";

function finding(key: string, address: string, ruleId = "SG-R1-repeated-ref"): Finding {
  return {
    key,
    ruleId,
    severity: "fault-indicator",
    locations: [{ address }],
    message: `finding ${key}`,
    generation: 1,
  };
}

function report(generation: number, findings: Finding[], diff?: Report["diff"]): Report {
  return {
    generation,
    findings,
    suppressedCount: 0,
    diff: diff ?? { new: findings.map((f) => f.key), resolved: [], persisting: [] },
  };
}

describe("ReportStore", () => {
  test("accepts newer reports only", () => {
    const store = new ReportStore();
    expect(store.accept(report(5, [finding("a", "Calc!A1")]))).toBe(true);
    expect(store.accept(report(5, []))).toBe(false);
    expect(store.accept(report(4, []))).toBe(false);
    expect(store.generation()).toBe(5);
    expect(store.accept(report(6, []))).toBe(true);
    expect(store.generation()).toBe(6);
  });

  test("markers group findings by located cell", () => {
    const store = new ReportStore();
    store.accept(
      report(1, [
        finding("a", "Calc!K33"),
        finding("b", "Calc!K33", "SG-R6-neighbor-inconsistency"),
        finding("c", "Calc!J34"),
      ]),
    );
    const markers = store.markers();
    expect([...markers.keys()].sort()).toEqual(["Calc!J34", "Calc!K33"]);
    expect(markers.get("Calc!K33")).toHaveLength(2);
  });

  test("locations without an address do not produce markers", () => {
    const store = new ReportStore();
    const f = finding("a", "x");
    f.locations = [{ name: "scenario:foo" }];
    store.accept(report(1, [f]));
    expect(store.markers().size).toBe(0);
  });

  test("groups split by the report diff and keep resolved renderable", () => {
    const store = new ReportStore();
    const a = finding("a", "S!A1");
    const b = finding("b", "S!A2");
    const c = finding("c", "S!A3");
    store.accept(report(1, [a, b]));
    store.accept(
      report(2, [b, c], { new: ["c"], resolved: ["a"], persisting: ["b"] }),
    );
    const groups = store.groups();
    expect(groups.fresh.map((f) => f.key)).toEqual(["c"]);
    expect(groups.persisting.map((f) => f.key)).toEqual(["b"]);
    expect(groups.resolved.map((f) => f.key)).toEqual(["a"]); // from the previous report
  });
});
