// Typed client for the annotation service.  The service is the single
// source of truth; this client only validates documents on both sides
// of the wire and never caches labels.

import {
  AgreementResponseSchema,
  CreateSessionRequest,
  CreateSessionRequestSchema,
  CreateSessionResponseSchema,
  ErrorResponseSchema,
  HealthResponseSchema,
  MajorityExport,
  MajorityExportSchema,
  NextItemResponse,
  NextItemResponseSchema,
  PerAnnotatorExport,
  PerAnnotatorExportSchema,
  SessionSummary,
  SessionSummarySchema,
  SubmitLabelsRequest,
  SubmitLabelsRequestSchema,
  SubmitLabelsResponse,
  SubmitLabelsResponseSchema,
} from "./schemas.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`${status}: ${detail}`);
  }
}

async function parseFailure(response: Response): Promise<never> {
  let detail = response.statusText;
  try {
    const body = ErrorResponseSchema.safeParse(await response.json());
    if (body.success) detail = body.data.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, detail);
}

export class AnnotationApi {
  constructor(readonly baseUrl: string) {}

  private url(path: string, query?: Record<string, string>): string {
    const u = new URL(path, this.baseUrl);
    for (const [key, value] of Object.entries(query ?? {})) {
      u.searchParams.set(key, value);
    }
    return u.toString();
  }

  private async getJson<T>(path: string, query: Record<string, string>,
    parse: (raw: unknown) => T): Promise<T> {
    const response = await fetch(this.url(path, query));
    if (!response.ok) await parseFailure(response);
    return parse(await response.json());
  }

  async health(): Promise<boolean> {
    try {
      const response = await fetch(this.url("/health"));
      if (!response.ok) return false;
      return HealthResponseSchema.parse(await response.json()).status === "ok";
    } catch {
      return false;
    }
  }

  async createSession(request: CreateSessionRequest): Promise<string> {
    const body = CreateSessionRequestSchema.parse(request);
    const response = await fetch(this.url("/sessions"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) await parseFailure(response);
    return CreateSessionResponseSchema.parse(await response.json()).session_id;
  }

  async nextItem(sessionId: string, annotator: string): Promise<NextItemResponse> {
    return this.getJson(`/sessions/${sessionId}/next`, { annotator }, (raw) =>
      NextItemResponseSchema.parse(raw),
    );
  }

  async submitLabels(
    sessionId: string,
    itemId: number,
    request: SubmitLabelsRequest,
  ): Promise<SubmitLabelsResponse> {
    const body = SubmitLabelsRequestSchema.parse(request);
    const response = await fetch(
      this.url(`/sessions/${sessionId}/items/${itemId}/labels`),
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      },
    );
    if (!response.ok) await parseFailure(response);
    return SubmitLabelsResponseSchema.parse(await response.json());
  }

  async agreement(sessionId: string): Promise<number | null> {
    return this.getJson(`/sessions/${sessionId}/agreement`, {}, (raw) =>
      AgreementResponseSchema.parse(raw).alpha,
    );
  }

  async summary(sessionId: string): Promise<SessionSummary> {
    return this.getJson(`/sessions/${sessionId}`, {}, (raw) =>
      SessionSummarySchema.parse(raw),
    );
  }

  async exportMajority(sessionId: string): Promise<MajorityExport> {
    return this.getJson(
      `/sessions/${sessionId}/export`,
      { strategy: "majority_vote" },
      (raw) => MajorityExportSchema.parse(raw),
    );
  }

  async exportPerAnnotator(sessionId: string): Promise<PerAnnotatorExport> {
    return this.getJson(
      `/sessions/${sessionId}/export`,
      { strategy: "per_annotator" },
      (raw) => PerAnnotatorExportSchema.parse(raw),
    );
  }
}
