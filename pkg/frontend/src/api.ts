/** Thin typed fetch wrapper over the annotation service endpoints. */

import type { LabelAck, LabelEvent, NextUnit, SessionInfo, SliceProgress } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public errorCode: string,
    detail: string,
  ) {
    super(detail);
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let code = "HttpError";
  let detail = `${resp.status}`;
  try {
    const body = (await resp.json()) as { error?: string; detail?: string };
    code = body.error ?? code;
    detail = body.detail ?? detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(resp.status, code, detail);
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  sessionInfo(sessionId: string): Promise<SessionInfo> {
    return this.request(`/sessions/${sessionId}`);
  }

  nextUnit(sessionId: string, coder: string, passId: number): Promise<NextUnit> {
    return this.request(`/sessions/${sessionId}/next?coder=${encodeURIComponent(coder)}&pass=${passId}`);
  }

  postLabel(sessionId: string, event: LabelEvent): Promise<LabelAck> {
    return this.request(`/sessions/${sessionId}/labels`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(event),
    });
  }

  postNote(
    sessionId: string,
    note: { coder_id: string; pass_id: number; frame_index: number; track_id: string; note: string },
  ): Promise<LabelAck> {
    return this.request(`/sessions/${sessionId}/notes`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(note),
    });
  }

  progress(sessionId: string, coder: string, passId: number): Promise<Record<string, SliceProgress>> {
    return this.request(`/sessions/${sessionId}/progress?coder=${encodeURIComponent(coder)}&pass=${passId}`);
  }

  async exportCsv(sessionId: string, coder: string, passId: number): Promise<string> {
    const resp = await this.fetchImpl(
      `${this.baseUrl}/sessions/${sessionId}/export?coder=${encodeURIComponent(coder)}&pass=${passId}`,
    );
    if (!resp.ok) throw await parseError(resp);
    return resp.text();
  }

  frameUrl(sessionId: string, frameIndex: number): string {
    return `${this.baseUrl}/sessions/${sessionId}/frames/${frameIndex}`;
  }
}
