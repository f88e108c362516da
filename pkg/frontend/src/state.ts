/**
 * Client-side report store.
 *
 * Guards the one invariant the UI must never break: a displayed report
 * is never replaced by an older one, no matter how long-poll responses
 * interleave. Also keeps the previous report's findings so entries
 * resolved since the last report can still be rendered while they fade.
 */

import type { Finding, Report } from "./api.js";

export interface FindingGroups {
  fresh: Finding[];
  persisting: Finding[];
  resolved: Finding[];
}

export class ReportStore {
  private report: Report | null = null;
  private previous = new Map<string, Finding>();

  generation(): number {
    return this.report?.generation ?? -1;
  }

  current(): Report | null {
    return this.report;
  }

  /** Returns true when the report is newer and was taken. */
  accept(report: Report): boolean {
    if (this.report !== null && report.generation <= this.report.generation) {
      return false;
    }
    this.previous = new Map((this.report?.findings ?? []).map((f) => [f.key, f]));
    this.report = report;
    return true;
  }

  /** Findings per cell address, the source of the grid's marker icons. */
  markers(): Map<string, Finding[]> {
    const map = new Map<string, Finding[]>();
    for (const finding of this.report?.findings ?? []) {
      for (const location of finding.locations) {
        if (!location.address) continue;
        const entry = map.get(location.address);
        if (entry) {
          entry.push(finding);
        } else {
          map.set(location.address, [finding]);
        }
      }
    }
    return map;
  }

  groups(): FindingGroups {
    const report = this.report;
    if (!report) {
      return { fresh: [], persisting: [], resolved: [] };
    }
    const fresh: Finding[] = [];
    const persisting: Finding[] = [];
    const newKeys = new Set(report.diff.new);
    for (const finding of report.findings) {
      (newKeys.has(finding.key) ? fresh : persisting).push(finding);
    }
    const resolved = report.diff.resolved
      .map((key) => this.previous.get(key))
      .filter((f): f is Finding => f !== undefined);
    return { fresh, persisting, resolved };
  }
}
