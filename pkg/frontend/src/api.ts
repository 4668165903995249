import type {
  DimensionInfoPayload,
  EpisodeSummary,
  ModelPayload,
  NarrativeResponse,
  SessionPayload,
  ThreadResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly elementId?: string,
  ) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client; all UI data flows through here. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let code = "http_error";
      let message = `${response.status} on ${path}`;
      let elementId: string | undefined;
      try {
        const body = await response.json();
        code = body.code ?? code;
        message = body.message ?? message;
        elementId = body.elementId;
      } catch {
        // non-JSON error body; keep the defaults
      }
      throw new ApiError(response.status, code, message, elementId);
    }
    return response.json() as Promise<T>;
  }

  getModel(): Promise<ModelPayload> {
    return this.request("/model");
  }

  getEpisodes(): Promise<EpisodeSummary[]> {
    return this.request("/episodes");
  }

  getThread(episodeId: string): Promise<ThreadResponse> {
    return this.request(`/episodes/${encodeURIComponent(episodeId)}/thread`);
  }

  getNarrative(
    episodeId: string,
    level: number,
    sessionId?: string,
  ): Promise<NarrativeResponse> {
    const params = new URLSearchParams({ level: String(level) });
    if (sessionId) params.set("session", sessionId);
    return this.request(
      `/episodes/${encodeURIComponent(episodeId)}/narrative?${params}`,
    );
  }

  getDimensionInfo(dimensionId: string): Promise<DimensionInfoPayload> {
    return this.request(`/dimensions/${encodeURIComponent(dimensionId)}/info`);
  }

  createSession(): Promise<SessionPayload> {
    return this.request("/sessions", { method: "POST" });
  }

  recordViews(sessionId: string, propositionIds: string[]): Promise<SessionPayload> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}/views`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ propositionIds }),
    });
  }

  getGraph(episodeId?: string): Promise<string> {
    const suffix = episodeId ? `?episode=${encodeURIComponent(episodeId)}` : "";
    return this.fetchFn(`${this.baseUrl}/export/graph${suffix}`).then((r) => {
      if (!r.ok) throw new ApiError(r.status, "http_error", `graph export failed`);
      return r.text();
    });
  }
}
