/** Wire types for the session API. The client renders these verbatim and
 * never derives anything the server did not send. */

export type Ranking = string[];

export interface QuestionView {
  id: string;
  kind: string;
  prompt: string;
  options: string[];
  points: number;
  attempts: "single" | "until-correct" | "three-reveal";
  screen: string;
  treatment: string;
  payload?: Record<string, unknown> | null;
  resolved: boolean;
  attempts_used: number;
}

export interface ScenarioView {
  id: string;
  rankings: Record<string, Ranking>;
  priorities: Record<string, Ranking>;
  values: Record<string, number>;
}

export interface ScreenSpec {
  id: string;
  kind: string;
  payload: Record<string, unknown>;
}

export interface ScreenBody {
  session: string;
  treatment: string;
  status: "active" | "completed";
  next_seq: number;
  screen: ScreenSpec;
}

export interface Feedback {
  correct: boolean | null;
  points: number;
  reveal: unknown;
  prize: string | null;
  earned: number | null;
  cumulative_earnings: number | null;
  advanced: boolean;
  completed: boolean;
}

export interface SubmitResult extends ScreenBody {
  feedback: Feedback | null;
}

export interface EndSummary {
  points_earned: number;
  points_max: number;
  bonus: number;
  round_earnings: number;
  total: number;
  currency: string;
}

/** Response payloads the client can post back. */
export type ResponsePayload =
  | { ack: true }
  | { ranking: Ranking }
  | { question: string; answer: unknown };

export const TREATMENTS = [
  "Trad-DA",
  "Menu-DA",
  "Menu-SP",
  "Textbook-SP",
  "Null",
] as const;

export const PRIZES = ["A", "B", "C", "D"] as const;
export const AGENTS = ["Y", "R", "S", "T"] as const;
export const UNPAIRED_ROW = "U.P.";
