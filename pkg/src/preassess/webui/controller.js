import { ApiClient, ApiError } from "./api.js";
import { initialState, pendingEntry, reduce, } from "./state.js";
const RELOAD_PROMPT = "this session moved on elsewhere; reload to catch up";
/**
 * Drives the assessment loop against the API and feeds the pure state
 * machine. Knows nothing about the DOM; main.ts subscribes and renders.
 */
export class Console {
    api;
    state = initialState();
    listeners = [];
    pollAttempts;
    pollDelayMs;
    constructor(api, options = {}) {
        this.api = api;
        this.pollAttempts = options.pollAttempts ?? 40;
        this.pollDelayMs = options.pollDelayMs ?? 250;
    }
    get current() {
        return this.state;
    }
    subscribe(listener) {
        this.listeners.push(listener);
    }
    apply(event) {
        this.state = reduce(this.state, event);
        for (const listener of this.listeners)
            listener(this.state);
    }
    async loadGraph() {
        this.apply({ type: "busy" });
        try {
            const graph = await this.api.graph();
            this.apply({ type: "graph-loaded", graph });
        }
        catch (error) {
            this.apply({ type: "graph-failed", message: describe(error) });
        }
    }
    async chooseConcept(desired, mode) {
        this.apply({ type: "busy" });
        let session;
        try {
            session = await this.api.createSession(desired, mode);
            const quizzes = await this.quizzesFor(session);
            this.apply({ type: "session-loaded", session, quizzes });
        }
        catch (error) {
            this.apply({ type: "graph-failed", message: describe(error) });
            return;
        }
        if (session.status === "complete") {
            await this.pollRecommendation(session.id);
        }
    }
    /** Rebuild the view for a route, e.g. after a refresh or a pasted link. */
    async restore(route) {
        this.state = initialState();
        await this.loadGraph();
        if (route.kind !== "session" || this.state.banner !== null)
            return;
        try {
            const session = await this.api.getSession(route.id);
            const quizzes = await this.quizzesFor(session);
            this.apply({ type: "session-loaded", session, quizzes });
            if (session.status === "complete") {
                await this.pollRecommendation(session.id);
            }
        }
        catch (error) {
            this.apply({ type: "graph-failed", message: describe(error) });
        }
    }
    async submitAnswers(answers) {
        const session = this.state.session;
        if (!session)
            return;
        const entry = pendingEntry(session);
        if (!entry)
            return;
        this.apply({ type: "busy" });
        try {
            const result = await this.api.submitAnswers(session.id, entry.leaf, answers);
            this.apply({
                type: "outcome-recorded",
                session: result.session,
                grade: result.grade ?? null,
                recommendation: result.recommendation ?? null,
            });
        }
        catch (error) {
            if (error instanceof ApiError && error.status === 409) {
                this.apply({ type: "notice", message: RELOAD_PROMPT });
            }
            else {
                this.apply({ type: "notice", message: describe(error) });
            }
        }
    }
    /** Fresh direct-mode session over one parent from the summary view. */
    async reassess(parent) {
        this.apply({ type: "restart" });
        await this.chooseConcept(parent, "direct");
    }
    backToPicker() {
        this.apply({ type: "restart" });
    }
    async quizzesFor(session) {
        const parents = [...new Set(session.queue.map((entry) => entry.parent))];
        const quizzes = {};
        for (const parent of parents) {
            for (const leaf of await this.api.parentLeaves(parent)) {
                if (leaf.quiz)
                    quizzes[leaf.id] = leaf.quiz;
            }
        }
        return quizzes;
    }
    async pollRecommendation(sessionId) {
        for (let attempt = 0; attempt < this.pollAttempts; attempt++) {
            try {
                const recommendation = await this.api.recommendation(sessionId);
                this.apply({ type: "recommendation-loaded", recommendation });
                return;
            }
            catch (error) {
                const stillActive = error instanceof ApiError && error.code === "SESSION_NOT_COMPLETE";
                if (!stillActive) {
                    this.apply({ type: "notice", message: describe(error) });
                    return;
                }
            }
            await new Promise((resolve) => setTimeout(resolve, this.pollDelayMs));
        }
        this.apply({ type: "notice", message: "recommendation is taking too long; reload to retry" });
    }
}
function describe(error) {
    if (error instanceof ApiError)
        return error.message;
    return String(error);
}
