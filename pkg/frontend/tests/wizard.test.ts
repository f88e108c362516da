import { beforeEach, describe, expect, test, vi } from "vitest";
import type { ApiClient, ScenarioSpec } from "../src/api.js";
import { ScenarioWizard, parseScalar } from "../src/wizard.js";

describe("parseScalar", () => {
  test("numbers, booleans and text", () => {
    expect(parseScalar("12")).toBe(12);
    expect(parseScalar("1.5")).toBe(1.5);
    expect(parseScalar("true")).toBe(true);
    expect(parseScalar("FALSE")).toBe(false);
    expect(parseScalar("TarifA")).toBe("TarifA");
  });
});

describe("ScenarioWizard", () => {
  let root: HTMLElement;
  let masked: string[][];
  let roleCalls: { addr: string; role: string }[][];
  let created: ScenarioSpec[];
  let ran: string[];
  let wizard: ScenarioWizard;

  const grid = {
    setMaskedCells: (addrs: string[]) => masked.push(addrs),
    setRoleHighlights: () => undefined,
  };

  const api = {
    markRoles: async (markings: { addr: string; role: string }[]) => {
      roleCalls.push(markings);
      return markings.map((m, i) => `sg_${m.role.slice(0, 3)}_${i + 1}`);
    },
    createScenario: async (spec: ScenarioSpec) => {
      created.push(spec);
      return { name: spec.name, valid: true, issues: [] };
    },
    runScenario: async (name: string) => {
      ran.push(name);
      return {
        scenario: name,
        passed: false,
        problems: [],
        results: [
          {
            target: "sg_out_1", address: "Calc!C1", state: "fail" as const,
            actual: "31", expected: "= 28 (±1e-06)", reason: "got 31, off by 3",
          },
        ],
      };
    },
  } as unknown as ApiClient;

  beforeEach(() => {
    document.body.innerHTML = '<div id="wizard"></div>';
    root = document.getElementById("wizard")!;
    masked = [];
    roleCalls = [];
    created = [];
    ran = [];
    wizard = new ScenarioWizard(root, api, grid, () => undefined);
  });

  async function markAndAdvance() {
    wizard.open();
    wizard.handleCellClick("Calc!B2"); // role defaults to input
    (root.querySelector('input[value="output"]') as HTMLInputElement).click();
    (root.querySelector('input[value="output"]') as HTMLInputElement).dispatchEvent(new Event("change"));
    wizard.handleCellClick("Calc!C1");
    (root.querySelector(".wizard-next") as HTMLButtonElement).click();
    await vi.waitFor(() => expect(root.textContent).toContain("step 2"));
  }

  test("step 1 collects markings and posts roles", async () => {
    await markAndAdvance();
    expect(roleCalls).toEqual([
      [
        { addr: "Calc!B2", role: "input" },
        { addr: "Calc!C1", role: "output" },
      ],
    ]);
  });

  test("step 2 masks output cells until the scenario is saved", async () => {
    await markAndAdvance();
    expect(wizard.maskingOutputs).toBe(true);
    expect(masked.at(-1)).toEqual(["Calc!C1"]);

    const valueInput = root.querySelector('input[data-addr="Calc!B2"]') as HTMLInputElement;
    valueInput.value = "1";
    valueInput.dispatchEvent(new Event("input"));
    const expectInput = root.querySelector('input[data-expect="Calc!C1"]') as HTMLInputElement;
    expectInput.value = "28";
    expectInput.dispatchEvent(new Event("input"));
    const nameInput = root.querySelector("#wizard-scenario-name") as HTMLInputElement;
    nameInput.value = "first-run";
    (root.querySelector(".wizard-save") as HTMLButtonElement).click();
    await vi.waitFor(() => expect(root.textContent).toContain("step 3"));
    expect(masked.at(-1)).toEqual([]); // unmasked after saving
  });

  test("completing the wizard creates the scenario and shows its first run", async () => {
    await markAndAdvance();
    (root.querySelector('input[data-addr="Calc!B2"]') as HTMLInputElement).value = "1";
    root.querySelector('input[data-addr="Calc!B2"]')!.dispatchEvent(new Event("input"));
    const expectInput = root.querySelector('input[data-expect="Calc!C1"]') as HTMLInputElement;
    expectInput.value = "28";
    expectInput.dispatchEvent(new Event("input"));
    (root.querySelector("#wizard-scenario-name") as HTMLInputElement).value = "first-run";
    (root.querySelector(".wizard-save") as HTMLButtonElement).click();
    await vi.waitFor(() => expect(ran).toEqual(["first-run"]));

    expect(created).toHaveLength(1);
    expect(created[0].name).toBe("first-run");
    expect(created[0].inputs).toEqual({ sg_inp_1: 1 });
    expect(created[0].expectations).toEqual([
      { target: "sg_out_2", kind: "exact", value: 28, absTol: 1e-6 },
    ]);
    expect(root.textContent).toContain('FAILED its first run');
    expect(root.querySelector(".result-fail")?.textContent).toContain("off by 3");
  });

  test("interval expectations parse lo and hi", async () => {
    await markAndAdvance();
    const select = root.querySelector("select") as HTMLSelectElement;
    select.value = "interval";
    select.dispatchEvent(new Event("change"));
    const expectInput = root.querySelector('input[data-expect="Calc!C1"]') as HTMLInputElement;
    expectInput.value = "26";
    expectInput.dispatchEvent(new Event("input"));
    const hi = expectInput.nextElementSibling as HTMLInputElement;
    hi.value = "30";
    hi.dispatchEvent(new Event("input"));
    (root.querySelector('input[data-addr="Calc!B2"]') as HTMLInputElement).value = "1";
    root.querySelector('input[data-addr="Calc!B2"]')!.dispatchEvent(new Event("input"));
    (root.querySelector("#wizard-scenario-name") as HTMLInputElement).value = "iv";
    (root.querySelector(".wizard-save") as HTMLButtonElement).click();
    await vi.waitFor(() => expect(created).toHaveLength(1));
    expect(created[0].expectations).toEqual([
      { target: "sg_out_2", kind: "interval", lo: 26, hi: 30 },
    ]);
  });
});
