/**
 * Application bootstrap: one grid, one findings pane, one wizard, one
 * long-poll loop, all against the server's API. No client-side state
 * survives a reload; everything re-derives from server responses.
 */

import { ApiClient, ConflictError, type CellSpec } from "./api.js";
import { GridView } from "./grid.js";
import { FindingsPane } from "./pane.js";
import { startReportLoop } from "./poll.js";
import { ReportStore } from "./state.js";
import { ScenarioWizard, parseScalar } from "./wizard.js";

export function contentFromRaw(raw: string): CellSpec | null {
  const trimmed = raw.trim();
  if (trimmed === "") return null;
  if (trimmed.startsWith("=")) return { f: trimmed };
  const value = parseScalar(trimmed);
  return { v: value };
}

export function bootstrap(root: Document = document): void {
  const api = new ApiClient("");
  const store = new ReportStore();
  let generation = -1;

  const gridRoot = root.getElementById("grid")!;
  const paneRoot = root.getElementById("pane")!;
  const wizardRoot = root.getElementById("wizard")!;
  const statusEl = root.getElementById("status")!;

  const refreshWorkbook = async () => {
    const data = await api.getWorkbook();
    generation = data.generation;
    grid.update(data, store.markers());
    statusEl.textContent = `generation ${generation}`;
  };

  const grid: GridView = new GridView(gridRoot as HTMLElement, {
    onSelect(addr) {
      if (wizard.handleCellClick(addr)) return;
      pane.selectByAddress(addr);
    },
    async onEdit(addr, rawText) {
      const edit = [{ addr, content: contentFromRaw(rawText) }];
      try {
        await api.patchCells(edit, generation);
      } catch (err) {
        if (err instanceof ConflictError) {
          // Someone else wrote first: refetch, then retry against the
          // fresh generation.
          await refreshWorkbook();
          await api.patchCells(edit, generation);
        } else {
          statusEl.textContent = err instanceof Error ? err.message : String(err);
          return;
        }
      }
      await refreshWorkbook();
    },
  });

  const pane = new FindingsPane(paneRoot as HTMLElement, api, {
    onJump(addr) {
      grid.selectCell(addr, true);
    },
  });

  const wizard = new ScenarioWizard(wizardRoot as HTMLElement, api, grid, () => {
    void refreshWorkbook();
  });
  root.getElementById("new-scenario")?.addEventListener("click", () => wizard.open());

  startReportLoop(api, store, () => {
    pane.render(store);
    grid.setMarkers(store.markers());
  });

  void refreshWorkbook().then(() => pane.render(store));
}

declare const process: { env?: Record<string, string | undefined> } | undefined;

const underTest = typeof process !== "undefined" && process?.env?.VITEST !== undefined;
if (typeof window !== "undefined" && !underTest) {
  window.addEventListener("DOMContentLoaded", () => bootstrap());
}
