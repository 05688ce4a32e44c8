import type {
  GraphView,
  QuizGradeView,
  QuizItem,
  Recommendation,
  SessionView,
} from "./types.js";

export type View = "concept-picker" | "quiz" | "summary";

// Forward-only flow; summary loops back to the picker for re-assessment.
const TRANSITIONS: Record<View, View[]> = {
  "concept-picker": ["quiz", "summary"],
  quiz: ["summary"],
  summary: ["concept-picker"],
};

export interface ConsoleState {
  view: View;
  graph: GraphView | null;
  session: SessionView | null;
  /** Quiz content per queued leaf, fetched alongside the session. */
  quizzes: Record<string, QuizItem[]>;
  recommendation: Recommendation | null;
  lastGrade: QuizGradeView | null;
  /** Inline, recoverable message (duplicate submit, conflict reload prompt). */
  notice: string | null;
  /** Blocking failure rendered as a banner with a retry action. */
  banner: string | null;
  busy: boolean;
}

export type ConsoleEvent =
  | { type: "busy" }
  | { type: "graph-loaded"; graph: GraphView }
  | { type: "graph-failed"; message: string }
  | {
      type: "session-loaded";
      session: SessionView;
      quizzes: Record<string, QuizItem[]>;
    }
  | {
      type: "outcome-recorded";
      session: SessionView;
      grade: QuizGradeView | null;
      recommendation: Recommendation | null;
    }
  | { type: "recommendation-loaded"; recommendation: Recommendation }
  | { type: "notice"; message: string }
  | { type: "restart" };

export function initialState(): ConsoleState {
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

function moveTo(state: ConsoleState, view: View): View {
  if (view === state.view) return view;
  if (!TRANSITIONS[state.view].includes(view)) {
    throw new Error(`illegal view transition ${state.view} -> ${view}`);
  }
  return view;
}

export function reduce(state: ConsoleState, event: ConsoleEvent): ConsoleState {
  switch (event.type) {
    case "busy":
      return { ...state, busy: true };

    case "graph-loaded":
      return { ...state, graph: event.graph, banner: null, busy: false };

    case "graph-failed":
      return { ...state, banner: event.message, busy: false };

    case "session-loaded": {
      const view = moveTo(
        state,
        event.session.status === "complete" ? "summary" : "quiz",
      );
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
export function pendingEntry(session: SessionView) {
  return session.queue.find((entry) => !(entry.leaf in session.outcomes)) ?? null;
}

/**
 * One letter per queue slot, mirroring the server's outcome labels:
 * "P", "F", or null while unanswered. Purely a projection, nothing is
 * computed from the letters.
 */
export function outcomeLetters(session: SessionView): (string | null)[] {
  return session.queue.map((entry) => {
    const label = session.outcomes[entry.leaf];
    return label ? label[0] ?? null : null;
  });
}

export type Route = { kind: "picker" } | { kind: "session"; id: string };

export function parseRoute(hash: string): Route {
  const match = /^#\/session\/([^/]+)/.exec(hash);
  if (match && match[1]) return { kind: "session", id: decodeURIComponent(match[1]) };
  return { kind: "picker" };
}

export function routeFor(state: ConsoleState): string {
  if (state.session && state.view !== "concept-picker") {
    return `#/session/${encodeURIComponent(state.session.id)}`;
  }
  return "#/";
}
