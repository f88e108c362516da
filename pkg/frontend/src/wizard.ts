/**
 * Three-step scenario wizard.
 *
 * 1. Click cells in the grid to mark them input / intermediate / output
 *    (color coded); the marks are posted as roles.
 * 2. Enter input values and expected values or [lo..hi] intervals.
 *    While this step is open the grid MASKS the current values of the
 *    output cells: expectations are supposed to come from outside the
 *    sheet, not from reading the possibly-wrong current result.
 * 3. Save the scenario and immediately show its first run verdict.
 */

import type { ApiClient, ExpectationSpec, Scalar, ScenarioRunResult } from "./api.js";

type Role = "input" | "intermediate" | "output";

interface Marking {
  addr: string;
  role: Role;
}

export interface WizardGrid {
  setMaskedCells(addresses: string[]): void;
  setRoleHighlights(roles: Map<string, string>): void;
}

export function parseScalar(raw: string): Scalar {
  const trimmed = raw.trim();
  if (/^(true|false)$/i.test(trimmed)) return trimmed.toLowerCase() === "true";
  const num = Number(trimmed);
  if (trimmed !== "" && !Number.isNaN(num)) return num;
  return raw;
}

export class ScenarioWizard {
  private step: 0 | 1 | 2 | 3 = 0; // 0 = closed
  private role: Role = "input";
  private markings: Marking[] = [];
  private names = new Map<string, string>(); // addr -> stable name
  private inputValues = new Map<string, string>();
  private expectations = new Map<string, { kind: string; a: string; b: string }>();
  private lastResult: ScenarioRunResult | null = null;
  private error = "";

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly grid: WizardGrid,
    private readonly onDone: () => void,
  ) {}

  get active(): boolean {
    return this.step > 0;
  }

  get maskingOutputs(): boolean {
    return this.step === 2;
  }

  open(): void {
    this.step = 1;
    this.markings = [];
    this.names.clear();
    this.inputValues.clear();
    this.expectations.clear();
    this.lastResult = null;
    this.error = "";
    this.render();
  }

  close(): void {
    this.step = 0;
    this.grid.setMaskedCells([]);
    this.grid.setRoleHighlights(new Map());
    this.render();
    this.onDone();
  }

  /** Grid clicks land here while step 1 is open. */
  handleCellClick(addr: string): boolean {
    if (this.step !== 1) return false;
    const existing = this.markings.findIndex((m) => m.addr === addr);
    if (existing >= 0) {
      this.markings.splice(existing, 1); // click again to unmark
    } else {
      this.markings.push({ addr, role: this.role });
    }
    this.syncRoleHighlights();
    this.render();
    return true;
  }

  private syncRoleHighlights(): void {
    this.grid.setRoleHighlights(new Map(this.markings.map((m) => [m.addr, m.role])));
  }

  private outputsAndIntermediates(): string[] {
    return this.markings.filter((m) => m.role !== "input").map((m) => m.addr);
  }

  private async toStep2(): Promise<void> {
    try {
      const names = await this.api.markRoles(
        this.markings.map((m) => ({ addr: m.addr, role: m.role })),
      );
      this.markings.forEach((m, i) => this.names.set(m.addr, names[i]));
      this.step = 2;
      // Hide current output values while expectations are typed in.
      this.grid.setMaskedCells(
        this.markings.filter((m) => m.role === "output").map((m) => m.addr),
      );
      this.error = "";
    } catch (err) {
      this.error = err instanceof Error ? err.message : String(err);
    }
    this.render();
  }

  private buildExpectations(): ExpectationSpec[] {
    const specs: ExpectationSpec[] = [];
    for (const marking of this.markings) {
      if (marking.role === "input") continue;
      const entry = this.expectations.get(marking.addr);
      const target = this.names.get(marking.addr);
      if (!entry || !target || entry.a.trim() === "") continue;
      if (entry.kind === "interval") {
        specs.push({ target, kind: "interval", lo: Number(entry.a), hi: Number(entry.b) });
      } else if (entry.kind === "text") {
        specs.push({ target, kind: "text", text: entry.a });
      } else {
        specs.push({ target, kind: "exact", value: Number(entry.a), absTol: 1e-6 });
      }
    }
    return specs;
  }

  private async save(nameInput: string): Promise<void> {
    try {
      const inputs: Record<string, Scalar | null> = {};
      for (const marking of this.markings) {
        if (marking.role !== "input") continue;
        const name = this.names.get(marking.addr);
        const raw = this.inputValues.get(marking.addr) ?? "";
        if (name) inputs[name] = parseScalar(raw);
      }
      await this.api.createScenario({
        name: nameInput,
        createdAt: new Date().toISOString(),
        allowFormulaOverride: false,
        inputs,
        expectations: this.buildExpectations(),
      });
      this.lastResult = await this.api.runScenario(nameInput);
      this.step = 3;
      this.grid.setMaskedCells([]); // expectations are in; unmask
      this.error = "";
    } catch (err) {
      this.error = err instanceof Error ? err.message : String(err);
    }
    this.render();
  }

  private render(): void {
    this.root.textContent = "";
    this.root.classList.toggle("open", this.step > 0);
    if (this.step === 0) return;

    const panel = document.createElement("div");
    panel.className = "wizard-panel";
    const title = document.createElement("h2");
    title.textContent = `New test scenario: step ${this.step} of 3`;
    panel.appendChild(title);

    if (this.error) {
      const err = document.createElement("div");
      err.className = "wizard-error";
      err.textContent = this.error;
      panel.appendChild(err);
    }

    if (this.step === 1) this.renderStep1(panel);
    if (this.step === 2) this.renderStep2(panel);
    if (this.step === 3) this.renderStep3(panel);

    const cancel = document.createElement("button");
    cancel.type = "button";
    cancel.className = "wizard-cancel";
    cancel.textContent = this.step === 3 ? "Close" : "Cancel";
    cancel.addEventListener("click", () => this.close());
    panel.appendChild(cancel);
    this.root.appendChild(panel);
  }

  private renderStep1(panel: HTMLElement): void {
    const hint = document.createElement("p");
    hint.textContent =
      "Pick a role, then click cells in the grid to mark them. Click a marked cell to unmark it.";
    panel.appendChild(hint);

    const roles = document.createElement("div");
    roles.className = "role-picker";
    for (const role of ["input", "intermediate", "output"] as Role[]) {
      const label = document.createElement("label");
      const radio = document.createElement("input");
      radio.type = "radio";
      radio.name = "wizard-role";
      radio.value = role;
      radio.checked = this.role === role;
      radio.addEventListener("change", () => {
        this.role = role;
      });
      label.appendChild(radio);
      label.append(` ${role}`);
      label.className = `role-${role}`;
      roles.appendChild(label);
    }
    panel.appendChild(roles);

    const list = document.createElement("ul");
    list.className = "marking-list";
    for (const marking of this.markings) {
      const item = document.createElement("li");
      item.textContent = `${marking.addr} (${marking.role})`;
      item.className = `role-${marking.role}`;
      list.appendChild(item);
    }
    panel.appendChild(list);

    const next = document.createElement("button");
    next.type = "button";
    next.className = "wizard-next";
    next.textContent = "Next: values";
    next.disabled =
      !this.markings.some((m) => m.role === "input") ||
      !this.markings.some((m) => m.role === "output");
    next.addEventListener("click", () => void this.toStep2());
    panel.appendChild(next);
  }

  private renderStep2(panel: HTMLElement): void {
    const hint = document.createElement("p");
    hint.textContent =
      "Enter the input values and the results you computed outside the spreadsheet. " +
      "Current output values are hidden until the scenario is saved.";
    panel.appendChild(hint);

    const table = document.createElement("table");
    table.className = "wizard-values";
    for (const marking of this.markings) {
      const row = table.insertRow();
      row.insertCell().textContent = marking.addr;
      row.insertCell().textContent = marking.role;
      const cell = row.insertCell();
      if (marking.role === "input") {
        const input = document.createElement("input");
        input.dataset.addr = marking.addr;
        input.placeholder = "value";
        input.value = this.inputValues.get(marking.addr) ?? "";
        input.addEventListener("input", () => this.inputValues.set(marking.addr, input.value));
        cell.appendChild(input);
      } else {
        cell.appendChild(this.expectationEditor(marking.addr));
      }
    }
    panel.appendChild(table);

    const nameLabel = document.createElement("label");
    nameLabel.textContent = "Scenario name: ";
    const nameInput = document.createElement("input");
    nameInput.id = "wizard-scenario-name";
    nameInput.placeholder = "e.g. regression-baseline";
    nameLabel.appendChild(nameInput);
    panel.appendChild(nameLabel);

    const save = document.createElement("button");
    save.type = "button";
    save.className = "wizard-save";
    save.textContent = "Save and run";
    save.addEventListener("click", () => {
      if (nameInput.value.trim() === "") {
        this.error = "the scenario needs a name";
        this.render();
        return;
      }
      void this.save(nameInput.value.trim());
    });
    panel.appendChild(save);
  }

  private expectationEditor(addr: string): HTMLElement {
    const wrap = document.createElement("span");
    const entry = this.expectations.get(addr) ?? { kind: "exact", a: "", b: "" };
    this.expectations.set(addr, entry);

    const kind = document.createElement("select");
    for (const option of ["exact", "interval", "text"]) {
      const el = document.createElement("option");
      el.value = option;
      el.textContent = option;
      el.selected = entry.kind === option;
      kind.appendChild(el);
    }
    const a = document.createElement("input");
    a.placeholder = "expected";
    a.value = entry.a;
    a.dataset.expect = addr;
    const b = document.createElement("input");
    b.placeholder = "hi";
    b.value = entry.b;
    b.style.display = entry.kind === "interval" ? "" : "none";

    kind.addEventListener("change", () => {
      entry.kind = kind.value;
      b.style.display = entry.kind === "interval" ? "" : "none";
      a.placeholder = entry.kind === "interval" ? "lo" : "expected";
    });
    a.addEventListener("input", () => (entry.a = a.value));
    b.addEventListener("input", () => (entry.b = b.value));

    wrap.appendChild(kind);
    wrap.appendChild(a);
    wrap.appendChild(b);
    return wrap;
  }

  private renderStep3(panel: HTMLElement): void {
    const result = this.lastResult;
    if (!result) return;
    const verdict = document.createElement("div");
    verdict.className = `wizard-verdict ${result.passed ? "passed" : "failed"}`;
    verdict.textContent = result.passed
      ? `Scenario "${result.scenario}" passed its first run.`
      : `Scenario "${result.scenario}" FAILED its first run.`;
    panel.appendChild(verdict);

    const list = document.createElement("ul");
    list.className = "wizard-results";
    for (const r of result.results) {
      const item = document.createElement("li");
      item.className = `result-${r.state}`;
      item.textContent = `${r.target} (${r.address ?? "?"}): ${r.state}` +
        (r.state === "pass" ? "" : `, expected ${r.expected}, ${r.reason}`);
      list.appendChild(item);
    }
    panel.appendChild(list);
    for (const problem of result.problems) {
      const p = document.createElement("div");
      p.className = "wizard-problem";
      p.textContent = problem;
      panel.appendChild(p);
    }
  }
}
