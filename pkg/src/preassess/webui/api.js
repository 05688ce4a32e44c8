export class ApiError extends Error {
    status;
    code;
    constructor(status, code, message) {
        super(message);
        this.status = status;
        this.code = code;
        this.name = "ApiError";
    }
}
/**
 * Thin typed client for the /v1 API. The fetch implementation is
 * injectable so tests can point it at a local server or a recording.
 */
export class ApiClient {
    baseUrl;
    fetchImpl;
    constructor(baseUrl = "", fetchImpl = (input, init) => fetch(input, init)) {
        this.baseUrl = baseUrl;
        this.fetchImpl = fetchImpl;
    }
    async request(path, init) {
        let response;
        try {
            response = await this.fetchImpl(`${this.baseUrl}/v1${path}`, init);
        }
        catch (cause) {
            throw new ApiError(0, "NETWORK", `cannot reach the service: ${cause}`);
        }
        if (!response.ok) {
            let code = "HTTP_ERROR";
            let message = response.statusText;
            try {
                const body = await response.json();
                if (typeof body.code === "string")
                    code = body.code;
                if (typeof body.message === "string")
                    message = body.message;
            }
            catch {
                // non-JSON error body; keep the status text
            }
            throw new ApiError(response.status, code, message);
        }
        return response.json();
    }
    post(path, body) {
        return this.request(path, {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(body),
        });
    }
    health() {
        return this.request("/health");
    }
    graph() {
        return this.request("/graph");
    }
    parentLeaves(parentId) {
        return this.request(`/graph/parents/${encodeURIComponent(parentId)}/leaves`);
    }
    createSession(desired, mode) {
        return this.post("/sessions", { desired, mode });
    }
    getSession(sessionId) {
        return this.request(`/sessions/${encodeURIComponent(sessionId)}`);
    }
    submitAnswers(sessionId, leaf, answers) {
        return this.post(`/sessions/${encodeURIComponent(sessionId)}/outcomes`, { leaf, answers });
    }
    recommendation(sessionId) {
        return this.request(`/sessions/${encodeURIComponent(sessionId)}/recommendation`);
    }
}
