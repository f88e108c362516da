/**
 * Typed client for the inspection server's HTTP API.
 *
 * All state lives server-side; this wrapper only shapes requests and
 * decodes responses. A 409 (someone else edited first) surfaces as
 * ConflictError so callers can refetch and retry.
 */

export type Scalar = number | string | boolean;

export interface CellSpec {
  v?: Scalar;
  f?: string;
}

export interface CellFormat {
  font?: string;
  fill?: string;
}

export interface SheetData {
  name: string;
  cells: Record<string, CellSpec>;
  formats: Record<string, CellFormat>;
}

export interface WorkbookResponse {
  generation: number;
  workbook: {
    version: number;
    sheets: SheetData[];
    guardian: Record<string, unknown>;
  };
  /** Computed display text per sheet per cell, e.g. values["Calc"]["B2"] = "12". */
  values: Record<string, Record<string, string>>;
}

export interface FindingLocation {
  address?: string;
  name?: string;
}

export interface Finding {
  key: string;
  ruleId: string;
  severity: "fault-indicator" | "imperfection";
  locations: FindingLocation[];
  message: string;
  generation: number;
}

export interface Report {
  generation: number;
  findings: Finding[];
  suppressedCount: number;
  diff: { new: string[]; resolved: string[]; persisting: string[] };
}

export interface ExpectationSpec {
  target: string;
  kind: "exact" | "interval" | "text";
  value?: number;
  absTol?: number;
  lo?: number;
  hi?: number;
  text?: string;
}

export interface ScenarioSpec {
  name: string;
  createdAt: string;
  allowFormulaOverride: boolean;
  inputs: Record<string, Scalar | null>;
  expectations: ExpectationSpec[];
}

export interface ScenarioRunResult {
  scenario: string;
  passed: boolean;
  problems: string[];
  results: {
    target: string;
    address: string | null;
    state: "pass" | "fail" | "error";
    actual: string | null;
    expected: string;
    reason: string;
  }[];
}

export type CellEdit = { addr: string; content: CellSpec | null; format?: CellFormat };

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ConflictError extends ApiError {
  constructor(public generation: number) {
    super(409, `edit conflict: document is at generation ${generation}`);
  }
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    headers?: Record<string, string>,
  ): Promise<T | null> {
    const response = await fetch(this.base + path, {
      method,
      headers: { "Content-Type": "application/json", ...(headers ?? {}) },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (response.status === 204) {
      return null;
    }
    const data = await response.json().catch(() => ({}));
    if (response.status === 409) {
      throw new ConflictError((data as { generation?: number }).generation ?? -1);
    }
    if (!response.ok) {
      throw new ApiError(response.status, (data as { error?: string }).error ?? response.statusText);
    }
    return data as T;
  }

  getWorkbook(): Promise<WorkbookResponse> {
    return this.request<WorkbookResponse>("GET", "/api/workbook") as Promise<WorkbookResponse>;
  }

  patchCells(edits: CellEdit[], ifMatch?: number): Promise<{ generation: number; changed: string[] }> {
    const headers = ifMatch === undefined ? undefined : { "If-Match": String(ifMatch) };
    return this.request("PATCH", "/api/cells", edits, headers) as Promise<{
      generation: number;
      changed: string[];
    }>;
  }

  /** Long-polls; resolves null when the server timed out with 204. */
  pollReport(after: number): Promise<Report | null> {
    return this.request<Report>("GET", `/api/report?after=${after}`);
  }

  markRoles(markings: { addr: string; role: "input" | "intermediate" | "output" }[]): Promise<string[]> {
    return (
      this.request<{ names: string[] }>("POST", "/api/roles", markings) as Promise<{ names: string[] }>
    ).then((data) => data.names);
  }

  listScenarios(): Promise<ScenarioSpec[]> {
    return (
      this.request<{ scenarios: ScenarioSpec[] }>("GET", "/api/scenarios") as Promise<{
        scenarios: ScenarioSpec[];
      }>
    ).then((data) => data.scenarios);
  }

  createScenario(spec: ScenarioSpec): Promise<{ name: string; valid: boolean; issues: { code: string; message: string }[] }> {
    return this.request("POST", "/api/scenarios", spec) as Promise<{
      name: string;
      valid: boolean;
      issues: { code: string; message: string }[];
    }>;
  }

  runScenario(name: string): Promise<ScenarioRunResult> {
    return this.request("POST", `/api/scenarios/${encodeURIComponent(name)}/run`) as Promise<ScenarioRunResult>;
  }

  flagFinding(
    key: string,
    status: "falsePositive" | "holdOff",
    options: { note?: string; until?: number } = {},
  ): Promise<{ ok: boolean; generation: number }> {
    return this.request("POST", `/api/findings/${encodeURIComponent(key)}/flag`, {
      status,
      note: options.note ?? "",
      ...(options.until === undefined ? {} : { until: options.until }),
    }) as Promise<{ ok: boolean; generation: number }>;
  }
}
