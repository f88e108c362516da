/**
 * Long-poll loop for live report updates.
 *
 * Each request carries the generation of the report currently shown, so
 * the server answers as soon as something newer exists (or 204 at its
 * timeout, after which we simply ask again). The store's accept() guard
 * keeps out-of-order responses from ever rendering an older report.
 */

import type { ApiClient } from "./api.js";
import type { ReportStore } from "./state.js";

const RETRY_DELAY_MS = 1000;

export interface ReportLoop {
  stop(): void;
}

export function startReportLoop(
  api: ApiClient,
  store: ReportStore,
  onUpdate: () => void,
): ReportLoop {
  let stopped = false;

  const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

  void (async () => {
    while (!stopped) {
      try {
        const report = await api.pollReport(store.generation());
        if (stopped) break;
        if (report !== null && store.accept(report)) {
          onUpdate();
        }
      } catch {
        await sleep(RETRY_DELAY_MS);
      }
    }
  })();

  return {
    stop() {
      stopped = true;
    },
  };
}
