import { beforeEach, describe, expect, test, vi } from "vitest";
import type { Finding, WorkbookResponse } from "../src/api.js";
import { GridView, columnLetters, parseLocalRef } from "../src/grid.js";

function workbook(): WorkbookResponse {
  return {
    generation: 3,
    workbook: {
      version: 1,
      sheets: [
        {
          name: "Calc",
          cells: {
            B2: { v: 1 },
            B3: { v: 2 },
            C1: { f: "=B2+B3+B3" },
            H25: { v: 4 },
          },
          formats: { H25: { font: "#FFFFFF", fill: "#FFFFFF" } },
        },
        { name: "Data", cells: { A1: { v: "x" } }, formats: {} },
      ],
      guardian: {},
    },
    values: { Calc: { B2: "1", B3: "2", C1: "5", H25: "4" }, Data: { A1: "x" } },
  };
}

function finding(key: string, address: string, severity: Finding["severity"] = "fault-indicator"): Finding {
  return { key, ruleId: "SG-R1-repeated-ref", severity, locations: [{ address }], message: key, generation: 3 };
}

describe("GridView", () => {
  let root: HTMLElement;
  let selected: string[];
  let edits: [string, string][];
  let grid: GridView;

  beforeEach(() => {
    document.body.innerHTML = '<div id="grid"></div>';
    root = document.getElementById("grid")!;
    selected = [];
    edits = [];
    grid = new GridView(root, {
      onSelect: (addr) => selected.push(addr),
      onEdit: (addr, raw) => edits.push([addr, raw]),
    });
  });

  test("markers appear on exactly the reported cells", () => {
    const markers = new Map([
      ["Calc!C1", [finding("a", "Calc!C1")]],
      ["Calc!B3", [finding("b", "Calc!B3", "imperfection")]],
    ]);
    grid.update(workbook(), markers);
    const markedCells = [...root.querySelectorAll("td .marker")].map(
      (el) => (el.parentElement as HTMLElement).dataset.addr,
    );
    expect(markedCells.sort()).toEqual(["Calc!B3", "Calc!C1"]);
    const fault = root.querySelector('[data-addr="Calc!C1"] .marker')!;
    expect(fault.className).toContain("severity-fault-indicator");
    const imperfection = root.querySelector('[data-addr="Calc!B3"] .marker')!;
    expect(imperfection.className).toContain("severity-imperfection");
  });

  test("hidden white-on-white cell gets a visible overlay badge", () => {
    grid.update(workbook(), new Map());
    const cell = root.querySelector('[data-addr="Calc!H25"]')!;
    expect(cell.classList.contains("hidden-content")).toBe(true);
    expect(cell.querySelector(".hidden-badge")?.textContent).toBe("hidden");
  });

  test("clicking a marker selects the cell for the pane sync", () => {
    grid.update(workbook(), new Map([["Calc!C1", [finding("a", "Calc!C1")]]]));
    (root.querySelector('[data-addr="Calc!C1"] .marker') as HTMLElement).click();
    expect(selected).toEqual(["Calc!C1"]);
  });

  test("selectCell switches sheets and highlights", () => {
    grid.update(workbook(), new Map());
    grid.selectCell("Data!A1", true);
    const cell = root.querySelector('[data-addr="Data!A1"]');
    expect(cell?.classList.contains("selected")).toBe(true);
    expect(root.querySelector(".sheet-tab.active")?.textContent).toBe("Data");
  });

  test("masked cells hide their values", () => {
    grid.update(workbook(), new Map());
    grid.setMaskedCells(["Calc!C1"]);
    const cell = root.querySelector('[data-addr="Calc!C1"]')!;
    expect(cell.querySelector(".cell-text")?.textContent).not.toContain("5");
    expect(cell.classList.contains("masked")).toBe(true);
    grid.setMaskedCells([]);
    expect(root.querySelector('[data-addr="Calc!C1"] .cell-text')?.textContent).toBe("5");
  });

  test("double-click opens an editor and Enter commits the edit", () => {
    grid.update(workbook(), new Map());
    const cell = root.querySelector('[data-addr="Calc!B2"]') as HTMLElement;
    cell.dispatchEvent(new MouseEvent("dblclick", { bubbles: true }));
    const input = cell.querySelector("input") as HTMLInputElement;
    expect(input.value).toBe("1");
    input.value = "42";
    input.dispatchEvent(new KeyboardEvent("keydown", { key: "Enter" }));
    expect(edits).toEqual([["Calc!B2", "42"]]);
  });

  test("column letter helpers round-trip", () => {
    expect(columnLetters(1)).toBe("A");
    expect(columnLetters(27)).toBe("AA");
    expect(parseLocalRef("AA7")).toEqual({ col: 27, row: 7 });
  });
});
