// Forward-only flow; summary loops back to the picker for re-assessment.
const TRANSITIONS = {
    "concept-picker": ["quiz", "summary"],
    quiz: ["summary"],
    summary: ["concept-picker"],
};
export function initialState() {
    return {
        view: "concept-picker",
        graph: null,
        session: null,
        quizzes: {},
        recommendation: null,
        lastGrade: null,
        notice: null,
        banner: null,
        busy: false,
    };
}
function moveTo(state, view) {
    if (view === state.view)
        return view;
    if (!TRANSITIONS[state.view].includes(view)) {
        throw new Error(`illegal view transition ${state.view} -> ${view}`);
    }
    return view;
}
export function reduce(state, event) {
    switch (event.type) {
        case "busy":
            return { ...state, busy: true };
        case "graph-loaded":
            return { ...state, graph: event.graph, banner: null, busy: false };
        case "graph-failed":
            return { ...state, banner: event.message, busy: false };
        case "session-loaded": {
            const view = moveTo(state, event.session.status === "complete" ? "summary" : "quiz");
            return {
                ...state,
                view,
                session: event.session,
                quizzes: event.quizzes,
                recommendation: null,
                lastGrade: null,
                notice: null,
                banner: null,
                busy: false,
            };
        }
        case "outcome-recorded": {
            const done = event.session.status === "complete";
            return {
                ...state,
                view: done ? moveTo(state, "summary") : state.view,
                session: event.session,
                recommendation: event.recommendation,
                lastGrade: event.grade,
                notice: null,
                busy: false,
            };
        }
        case "recommendation-loaded":
            if (state.view !== "summary") {
                throw new Error(`recommendation arrived in ${state.view} view`);
            }
            return { ...state, recommendation: event.recommendation, busy: false };
        case "notice":
            return { ...state, notice: event.message, busy: false };
        case "restart":
            return {
                ...initialState(),
                view: moveTo(state, "concept-picker"),
                graph: state.graph,
            };
    }
}
/** Next unanswered queue entry, in queue order. */
export function pendingEntry(session) {
    return session.queue.find((entry) => !(entry.leaf in session.outcomes)) ?? null;
}
/**
 * One letter per queue slot, mirroring the server's outcome labels:
 * "P", "F", or null while unanswered. Purely a projection, nothing is
 * computed from the letters.
 */
export function outcomeLetters(session) {
    return session.queue.map((entry) => {
        const label = session.outcomes[entry.leaf];
        return label ? label[0] ?? null : null;
    });
}
export function parseRoute(hash) {
    const match = /^#\/session\/([^/]+)/.exec(hash);
    if (match && match[1])
        return { kind: "session", id: decodeURIComponent(match[1]) };
    return { kind: "picker" };
}
export function routeFor(state) {
    if (state.session && state.view !== "concept-picker") {
        return `#/session/${encodeURIComponent(state.session.id)}`;
    }
    return "#/";
}
