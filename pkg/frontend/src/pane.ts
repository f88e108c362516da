/**
 * Findings side pane, synchronized with the grid.
 *
 * Entries are grouped new / persisting; a resolved-since-last-report
 * section fades out. Each entry offers "False positive" (suppress
 * forever) and "Hold off" (suppress until a later generation), both
 * prompting for a note, and clicking an entry jumps the grid to the
 * first located cell.
 */

import type { ApiClient, Finding } from "./api.js";
import { escapeAttr } from "./grid.js";
import type { ReportStore } from "./state.js";

export interface PaneCallbacks {
  onJump(addr: string): void;
  /** Called after a flag was accepted by the server. */
  onFlagged?(key: string): void;
  prompt?(message: string, fallback: string): string | null;
}

export class FindingsPane {
  private selectedAddress: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly callbacks: PaneCallbacks,
  ) {}

  render(store: ReportStore): void {
    const report = store.current();
    this.root.textContent = "";
    const heading = document.createElement("div");
    heading.className = "pane-head";
    heading.textContent = report
      ? `Findings (generation ${report.generation})`
      : "Findings (waiting for first report)";
    this.root.appendChild(heading);
    if (!report) return;

    if (report.suppressedCount > 0) {
      const note = document.createElement("div");
      note.className = "suppressed-note";
      note.textContent = `${report.suppressedCount} finding(s) suppressed by flags`;
      this.root.appendChild(note);
    }

    const groups = store.groups();
    this.section("New", groups.fresh, "new");
    this.section("Persisting", groups.persisting, "persisting");
    if (groups.resolved.length > 0) {
      this.section("Resolved", groups.resolved, "resolved");
    }
    if (groups.fresh.length + groups.persisting.length === 0) {
      const empty = document.createElement("div");
      empty.className = "pane-empty";
      empty.textContent = "No findings.";
      this.root.appendChild(empty);
    }
    this.applySelection();
  }

  /** Grid -> pane direction of the selection sync. */
  selectByAddress(addr: string): void {
    this.selectedAddress = addr;
    this.applySelection();
  }

  private applySelection(): void {
    for (const el of this.root.querySelectorAll(".finding.selected")) {
      el.classList.remove("selected");
    }
    if (!this.selectedAddress) return;
    const match = this.root.querySelector(
      `.finding[data-addr="${escapeAttr(this.selectedAddress)}"]`,
    );
    match?.classList.add("selected");
    if (match && typeof (match as HTMLElement).scrollIntoView === "function") {
      (match as HTMLElement).scrollIntoView({ block: "nearest" });
    }
  }

  private section(title: string, findings: Finding[], kind: string): void {
    if (findings.length === 0 && kind !== "persisting") return;
    const wrap = document.createElement("section");
    wrap.className = `pane-section ${kind}`;
    const head = document.createElement("h3");
    head.textContent = `${title} (${findings.length})`;
    wrap.appendChild(head);
    for (const finding of findings) {
      wrap.appendChild(this.entry(finding, kind));
    }
    this.root.appendChild(wrap);
  }

  private entry(finding: Finding, kind: string): HTMLElement {
    const el = document.createElement("div");
    el.className = `finding severity-${finding.severity}${kind === "resolved" ? " fading" : ""}`;
    el.dataset.key = finding.key;
    const firstAddr = finding.locations.find((l) => l.address)?.address;
    if (firstAddr) el.dataset.addr = firstAddr;

    const head = document.createElement("div");
    head.className = "finding-head";
    const rule = document.createElement("span");
    rule.className = "rule-chip";
    rule.textContent = finding.ruleId;
    head.appendChild(rule);
    const where = document.createElement("span");
    where.className = "finding-where";
    where.textContent = finding.locations
      .map((l) => l.address ?? l.name ?? "?")
      .join(", ");
    head.appendChild(where);
    el.appendChild(head);

    const message = document.createElement("div");
    message.className = "finding-message";
    message.textContent = finding.message;
    el.appendChild(message);

    if (kind !== "resolved") {
      const actions = document.createElement("div");
      actions.className = "finding-actions";
      actions.appendChild(this.flagButton(finding, "falsePositive", "False positive"));
      actions.appendChild(this.flagButton(finding, "holdOff", "Hold off"));
      el.appendChild(actions);
    }

    if (firstAddr) {
      el.addEventListener("click", () => {
        this.selectedAddress = firstAddr;
        this.applySelection();
        this.callbacks.onJump(firstAddr);
      });
    }
    return el;
  }

  private flagButton(finding: Finding, status: "falsePositive" | "holdOff", label: string): HTMLElement {
    const button = document.createElement("button");
    button.type = "button";
    button.className = `flag-${status}`;
    button.textContent = label;
    button.addEventListener("click", async (event) => {
      event.stopPropagation();
      const ask = this.callbacks.prompt ?? ((msg: string, fb: string) => window.prompt(msg, fb));
      const note = ask(`Note for ${label.toLowerCase()} on ${finding.ruleId}:`, "");
      if (note === null) return;
      const options: { note: string; until?: number } = { note };
      if (status === "holdOff") {
        const until = ask("Suppress until generation:", String(finding.generation + 10));
        if (until === null) return;
        options.until = Number(until);
      }
      await this.api.flagFinding(finding.key, status, options);
      this.callbacks.onFlagged?.(finding.key);
    });
    return button;
  }
}
