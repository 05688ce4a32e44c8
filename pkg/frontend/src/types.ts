/** Wire shapes of the /v1 JSON API. Field names match the server verbatim. */

export interface ParentNode {
  id: string;
  leaves: string[];
  prerequisites: string[];
  next_higher: string | null;
}

export interface GraphView {
  parents: ParentNode[];
  aliases: Record<string, string>;
}

export interface QuizItem {
  prompt: string;
  choices: string[];
}

export interface LeafView {
  id: string;
  quiz: QuizItem[] | null;
}

export type OutcomeLabel = "Pass" | "Fail";
export type SessionMode = "prerequisite" | "direct";

export interface QueueEntry {
  parent: string;
  leaf: string;
}

export interface SessionView {
  id: string;
  desired: string;
  mode: SessionMode;
  status: "active" | "complete";
  queue: QueueEntry[];
  outcomes: Record<string, OutcomeLabel>;
  answered: number;
  total: number;
  created_at: string;
  updated_at: string;
}

/**
 * Every weight the server sends arrives fully formatted: the exact
 * fraction, a float, a trimmed decimal string, and a percent string.
 * The console renders these strings as-is and never derives its own.
 */
export interface WeightPayload {
  exact: string;
  value: number;
  display: string;
  percent: string;
}

export interface ProgressRecommendation {
  kind: "progress";
  target: string | null;
  curriculum_complete: boolean;
}

export interface RelearnRecommendation {
  kind: "relearn";
  leaves: string[];
  weight: WeightPayload;
  per_parent: { parent: string; weight: WeightPayload }[];
}

export type Recommendation = ProgressRecommendation | RelearnRecommendation;

export interface QuizGradeView {
  leaf: string;
  outcome: OutcomeLabel;
  correct: boolean[];
}

export interface OutcomeResponse {
  session: SessionView;
  grade?: QuizGradeView;
  recommendation?: Recommendation;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}
