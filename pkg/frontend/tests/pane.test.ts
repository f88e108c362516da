import { beforeEach, describe, expect, test, vi } from "vitest";
import type { ApiClient, Finding, Report } from "../src/api.js";
import { FindingsPane } from "../src/pane.js";
import { ReportStore } from "../src/state.js";

function finding(key: string, address: string): Finding {
  return {
    key,
    ruleId: "SG-R5-hidden-content",
    severity: "fault-indicator",
    locations: [{ address }],
    message: `message for ${key}`,
    generation: 1,
  };
}

function report(generation: number, findings: Finding[], diff: Report["diff"]): Report {
  return { generation, findings, suppressedCount: 0, diff };
}

describe("FindingsPane", () => {
  let root: HTMLElement;
  let store: ReportStore;
  let jumped: string[];
  let flagged: { key: string; status: string; options: unknown }[];
  let pane: FindingsPane;

  const api = {
    flagFinding: async (key: string, status: string, options: unknown) => {
      flagged.push({ key, status, options });
      return { ok: true, generation: 2 };
    },
  } as unknown as ApiClient;

  beforeEach(() => {
    document.body.innerHTML = '<aside id="pane"></aside>';
    root = document.getElementById("pane")!;
    store = new ReportStore();
    jumped = [];
    flagged = [];
    pane = new FindingsPane(root, api, {
      onJump: (addr) => jumped.push(addr),
      prompt: () => "a note",
    });
  });

  test("entries grouped new/persisting with resolved fading out", () => {
    store.accept(report(1, [finding("a", "Calc!K33"), finding("b", "Calc!J34")],
                         { new: ["a", "b"], resolved: [], persisting: [] }));
    pane.render(store);
    store.accept(report(2, [finding("b", "Calc!J34"), finding("c", "Calc!H25")],
                         { new: ["c"], resolved: ["a"], persisting: ["b"] }));
    pane.render(store);
    const sections = [...root.querySelectorAll(".pane-section h3")].map((el) => el.textContent);
    expect(sections).toEqual(["New (1)", "Persisting (1)", "Resolved (1)"]);
    expect(root.querySelector(".pane-section.resolved .finding")?.classList.contains("fading")).toBe(true);
  });

  test("clicking an entry jumps the grid to its cell", () => {
    store.accept(report(1, [finding("a", "Calc!K33")], { new: ["a"], resolved: [], persisting: [] }));
    pane.render(store);
    (root.querySelector(".finding") as HTMLElement).click();
    expect(jumped).toEqual(["Calc!K33"]);
    expect(root.querySelector(".finding")?.classList.contains("selected")).toBe(true);
  });

  test("selectByAddress highlights the matching entry (grid -> pane sync)", () => {
    store.accept(report(1, [finding("a", "Calc!K33"), finding("b", "Calc!J34")],
                         { new: ["a", "b"], resolved: [], persisting: [] }));
    pane.render(store);
    pane.selectByAddress("Calc!J34");
    const selected = root.querySelector(".finding.selected") as HTMLElement;
    expect(selected.dataset.key).toBe("b");
  });

  test("false-positive button posts the flag with a note", async () => {
    store.accept(report(1, [finding("a", "Calc!K33")], { new: ["a"], resolved: [], persisting: [] }));
    pane.render(store);
    (root.querySelector(".flag-falsePositive") as HTMLElement).click();
    await vi.waitFor(() => expect(flagged).toHaveLength(1));
    expect(flagged[0]).toEqual({ key: "a", status: "falsePositive", options: { note: "a note" } });
  });

  test("hold-off button asks for a generation and posts it", async () => {
    const answers = ["why", "25"];
    pane = new FindingsPane(root, api, {
      onJump: () => undefined,
      prompt: () => answers.shift() ?? null,
    });
    store.accept(report(1, [finding("a", "Calc!K33")], { new: ["a"], resolved: [], persisting: [] }));
    pane.render(store);
    (root.querySelector(".flag-holdOff") as HTMLElement).click();
    await vi.waitFor(() => expect(flagged).toHaveLength(1));
    expect(flagged[0]).toEqual({ key: "a", status: "holdOff", options: { note: "why", until: 25 } });
  });

  test("a flagged finding disappears once the next report omits it", () => {
    // No page reload: the same pane instance just re-renders from the
    // newer report, which no longer carries the flagged key.
    store.accept(report(1, [finding("a", "Calc!K33"), finding("b", "Calc!J34")],
                         { new: ["a", "b"], resolved: [], persisting: [] }));
    pane.render(store);
    expect(root.querySelectorAll(".finding")).toHaveLength(2);
    const withoutA = report(2, [finding("b", "Calc!J34")],
                            { new: [], resolved: ["a"], persisting: ["b"] });
    withoutA.suppressedCount = 1;
    store.accept(withoutA);
    pane.render(store);
    const keys = [...root.querySelectorAll(".pane-section.new .finding, .pane-section.persisting .finding")]
      .map((el) => (el as HTMLElement).dataset.key);
    expect(keys).toEqual(["b"]);
    expect(root.querySelector(".suppressed-note")?.textContent).toContain("1 finding(s) suppressed");
  });
});
