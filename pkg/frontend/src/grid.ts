/**
 * Editable grid with finding markers.
 *
 * Renders one sheet at a time (tab strip above the table). Every cell
 * carries its full address in data-addr; findings put a severity-colored
 * marker icon in the corner; cells whose font color equals their fill
 * color get a visible "hidden content" overlay so the grid itself never
 * reproduces white-on-white blindness.
 */

import type { Finding, WorkbookResponse } from "./api.js";

const MIN_COLS = 8;
const MIN_ROWS = 12;
const MASK_TEXT = "•••";

export function columnLetters(col: number): string {
  let out = "";
  while (col > 0) {
    const rem = (col - 1) % 26;
    out = String.fromCharCode(65 + rem) + out;
    col = Math.floor((col - 1) / 26);
  }
  return out;
}

/** Escape a value for use inside a double-quoted attribute selector. */
export function escapeAttr(value: string): string {
  return value.replace(/\\/g, "\\\\").replace(/"/g, '\\"');
}

export function parseLocalRef(ref: string): { col: number; row: number } {
  const match = /^([A-Z]+)([0-9]+)$/.exec(ref);
  if (!match) throw new Error(`bad cell ref: ${ref}`);
  let col = 0;
  for (const ch of match[1]) col = col * 26 + (ch.charCodeAt(0) - 64);
  return { col, row: Number(match[2]) };
}

export interface GridCallbacks {
  onSelect(addr: string): void;
  onEdit(addr: string, rawText: string): void;
}

export class GridView {
  private data: WorkbookResponse | null = null;
  private markers = new Map<string, Finding[]>();
  private masked = new Set<string>();
  private roles = new Map<string, string>();
  private activeSheet = "";
  private selected: string | null = null;

  constructor(private readonly root: HTMLElement, private readonly callbacks: GridCallbacks) {}

  update(data: WorkbookResponse, markers: Map<string, Finding[]>): void {
    this.data = data;
    this.markers = markers;
    if (!data.workbook.sheets.some((s) => s.name === this.activeSheet)) {
      this.activeSheet = data.workbook.sheets[0]?.name ?? "";
    }
    this.render();
  }

  setMarkers(markers: Map<string, Finding[]>): void {
    this.markers = markers;
    this.render();
  }

  /** Addresses whose current values must not be shown (wizard step 2). */
  setMaskedCells(addresses: string[]): void {
    this.masked = new Set(addresses);
    this.render();
  }

  setRoleHighlights(roles: Map<string, string>): void {
    this.roles = roles;
    this.render();
  }

  showSheet(name: string): void {
    this.activeSheet = name;
    this.render();
  }

  /** Select a cell, switching sheets and scrolling when asked to. */
  selectCell(addr: string, scroll = false): void {
    const sheet = addr.includes("!") ? addr.slice(0, addr.lastIndexOf("!")) : this.activeSheet;
    const plainSheet = sheet.replace(/^'(.*)'$/, "$1");
    if (plainSheet !== this.activeSheet) {
      this.activeSheet = plainSheet;
      this.selected = addr;
      this.render();
    } else {
      this.selected = addr;
      this.applySelection();
    }
    if (scroll) {
      const cell = this.cellElement(addr);
      if (cell && typeof cell.scrollIntoView === "function") {
        cell.scrollIntoView({ block: "center", inline: "center" });
      }
    }
  }

  cellElement(addr: string): HTMLElement | null {
    return this.root.querySelector(`[data-addr="${escapeAttr(addr)}"]`);
  }

  private applySelection(): void {
    for (const el of this.root.querySelectorAll("td.selected")) {
      el.classList.remove("selected");
    }
    if (this.selected) {
      this.cellElement(this.selected)?.classList.add("selected");
    }
  }

  private render(): void {
    const data = this.data;
    this.root.textContent = "";
    if (!data) return;

    const tabs = document.createElement("div");
    tabs.className = "sheet-tabs";
    for (const sheet of data.workbook.sheets) {
      const tab = document.createElement("button");
      tab.type = "button";
      tab.className = "sheet-tab" + (sheet.name === this.activeSheet ? " active" : "");
      tab.textContent = sheet.name;
      tab.addEventListener("click", () => this.showSheet(sheet.name));
      tabs.appendChild(tab);
    }
    this.root.appendChild(tabs);

    const sheet = data.workbook.sheets.find((s) => s.name === this.activeSheet);
    if (!sheet) return;
    const values = data.values[sheet.name] ?? {};

    let maxCol = MIN_COLS;
    let maxRow = MIN_ROWS;
    for (const ref of [...Object.keys(sheet.cells), ...Object.keys(sheet.formats)]) {
      const { col, row } = parseLocalRef(ref);
      maxCol = Math.max(maxCol, col + 1);
      maxRow = Math.max(maxRow, row + 1);
    }

    const table = document.createElement("table");
    table.className = "grid";
    const head = table.insertRow();
    head.insertCell().className = "corner";
    for (let c = 1; c <= maxCol; c++) {
      const th = document.createElement("th");
      th.textContent = columnLetters(c);
      head.appendChild(th);
    }
    for (let r = 1; r <= maxRow; r++) {
      const tr = table.insertRow();
      const rowHead = document.createElement("th");
      rowHead.textContent = String(r);
      tr.appendChild(rowHead);
      for (let c = 1; c <= maxCol; c++) {
        tr.appendChild(this.buildCell(sheet.name, c, r, sheet, values));
      }
    }
    this.root.appendChild(table);
    this.applySelection();
  }

  private buildCell(
    sheetName: string,
    col: number,
    row: number,
    sheet: { cells: Record<string, { v?: unknown; f?: string }>; formats: Record<string, { font?: string; fill?: string }> },
    values: Record<string, string>,
  ): HTMLTableCellElement {
    const ref = columnLetters(col) + String(row);
    const addr = `${sheetName}!${ref}`;
    const td = document.createElement("td");
    td.dataset.addr = addr;

    const spec = sheet.cells[ref];
    const format = sheet.formats[ref];
    const text = document.createElement("span");
    text.className = "cell-text";
    text.textContent = this.masked.has(addr) ? MASK_TEXT : values[ref] ?? "";
    if (this.masked.has(addr)) td.classList.add("masked");
    td.appendChild(text);

    if (spec?.f) {
      td.classList.add("formula");
      td.title = spec.f;
    }
    if (format?.font && format.fill && format.font.toUpperCase() === format.fill.toUpperCase()) {
      // Deliberately visible: the sheet hides it, the inspector shows it.
      td.classList.add("hidden-content");
      const badge = document.createElement("span");
      badge.className = "hidden-badge";
      badge.textContent = "hidden";
      td.appendChild(badge);
    }
    const role = this.roles.get(addr);
    if (role) td.classList.add(`role-${role}`);

    const findings = this.markers.get(addr);
    if (findings && findings.length > 0) {
      const severity = findings.some((f) => f.severity === "fault-indicator")
        ? "fault-indicator"
        : "imperfection";
      const marker = document.createElement("span");
      marker.className = `marker severity-${severity}`;
      marker.title = findings.map((f) => `[${f.ruleId}] ${f.message}`).join("\n");
      marker.dataset.keys = findings.map((f) => f.key).join(",");
      marker.addEventListener("click", (event) => {
        event.stopPropagation();
        this.callbacks.onSelect(addr);
      });
      td.appendChild(marker);
    }

    td.addEventListener("click", () => {
      this.selected = addr;
      this.applySelection();
      this.callbacks.onSelect(addr);
    });
    td.addEventListener("dblclick", () => this.openEditor(td, addr, spec, values[ref] ?? ""));
    return td;
  }

  private openEditor(
    td: HTMLTableCellElement,
    addr: string,
    spec: { v?: unknown; f?: string } | undefined,
    displayed: string,
  ): void {
    if (td.querySelector("input")) return;
    const input = document.createElement("input");
    input.className = "cell-editor";
    input.value = spec?.f ?? (spec?.v !== undefined ? String(spec.v) : displayed);
    const commit = () => {
      input.remove();
      this.callbacks.onEdit(addr, input.value);
    };
    input.addEventListener("keydown", (event) => {
      if (event.key === "Enter") commit();
      if (event.key === "Escape") input.remove();
    });
    input.addEventListener("blur", () => input.remove());
    td.appendChild(input);
    input.focus();
    input.select();
  }
}
