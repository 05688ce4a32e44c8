import type {
  GraphView,
  LeafView,
  OutcomeResponse,
  Recommendation,
  SessionMode,
  SessionView,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/**
 * Thin typed client for the /v1 API. The fetch implementation is
 * injectable so tests can point it at a local server or a recording.
 */
export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}/v1${path}`, init);
    } catch (cause) {
      throw new ApiError(0, "NETWORK", `cannot reach the service: ${cause}`);
    }
    if (!response.ok) {
      let code = "HTTP_ERROR";
      let message = response.statusText;
      try {
        const body = await response.json();
        if (typeof body.code === "string") code = body.code;
        if (typeof body.message === "string") message = body.message;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, code, message);
    }
    return response.json() as Promise<T>;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  health(): Promise<{ status: string }> {
    return this.request("/health");
  }

  graph(): Promise<GraphView> {
    return this.request("/graph");
  }

  parentLeaves(parentId: string): Promise<LeafView[]> {
    return this.request(`/graph/parents/${encodeURIComponent(parentId)}/leaves`);
  }

  createSession(desired: string, mode: SessionMode): Promise<SessionView> {
    return this.post("/sessions", { desired, mode });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}`);
  }

  submitAnswers(sessionId: string, leaf: string, answers: number[]): Promise<OutcomeResponse> {
    return this.post(`/sessions/${encodeURIComponent(sessionId)}/outcomes`, { leaf, answers });
  }

  recommendation(sessionId: string): Promise<Recommendation> {
    return this.request(`/sessions/${encodeURIComponent(sessionId)}/recommendation`);
  }
}
