// Client for the session service. One request in flight at a time: the
// guard is what keeps the Translate button honest.

import type { TaggedPayload } from "./model.js";

export interface SessionInfo {
  id: string;
  hypothesis: string;
  latency_ms: number;
}

export interface SpanInfo {
  kind: "c" | "b";
  start: number;
  end: number;
}

export interface TurnReply {
  hypothesis: string;
  violation: boolean;
  latency_ms: number;
  spans: SpanInfo[] | null;
}

export interface SubmitReply {
  ec: number;
  success: boolean;
  consistency: number | null;
  at: number;
  rt_ms: number | null;
}

export interface CorpusPair {
  src: string;
  ref: string | null;
}

type FetchResponse = {
  status: number;
  json(): Promise<unknown>;
};

export type FetchLike = (url: string, init?: RequestInit) => Promise<FetchResponse>;

export class ApiError extends Error {
  constructor(public code: string, message: string) {
    super(message);
  }
}

export class RequestInFlightError extends Error {
  constructor() {
    super("a request is already in flight");
  }
}

export class ApiClient {
  private busy = false;

  constructor(
    private base = "",
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  get inFlight(): boolean {
    return this.busy;
  }

  private async call<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(this.base + path, init);
    const body = (await resp.json()) as any;
    if (resp.status >= 400) {
      const err = body?.error ?? {};
      throw new ApiError(err.code ?? "http_error", err.message ?? `HTTP ${resp.status}`);
    }
    return body as T;
  }

  private async guarded<T>(run: () => Promise<T>): Promise<T> {
    if (this.busy) {
      throw new RequestInFlightError();
    }
    this.busy = true;
    try {
      return await run();
    } finally {
      this.busy = false;
    }
  }

  createSession(source: string, reference?: string): Promise<SessionInfo> {
    return this.guarded(() =>
      this.call<SessionInfo>("/api/sessions", {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ source, reference: reference ?? null }),
      }),
    );
  }

  postTurn(sessionId: string, payload: TaggedPayload): Promise<TurnReply> {
    return this.guarded(() =>
      this.call<TurnReply>(`/api/sessions/${sessionId}/turns`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(payload),
      }),
    );
  }

  submit(sessionId: string, finalText: string, mtpeClicked: boolean): Promise<SubmitReply> {
    return this.guarded(() =>
      this.call<SubmitReply>(`/api/sessions/${sessionId}/submit`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ final_text: finalText, mtpe_clicked: mtpeClicked }),
      }),
    );
  }

  corpus(): Promise<{ pairs: CorpusPair[] }> {
    return this.call<{ pairs: CorpusPair[] }>("/api/corpus");
  }
}
