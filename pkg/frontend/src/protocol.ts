// Wire protocol for /api/match/{id}/play. One JSON object per frame.

export interface WordEvent {
  type: "word";
  index: number;
  token: string;
}

export interface MachineBuzzEvent {
  type: "machine_buzz";
  position: number;
  guess: string;
}

export interface TopGuess {
  answer: string;
  prob: number;
}

export interface ResultEvent {
  type: "result";
  correct_answer: string;
  machine_points: number;
  human_points: number;
  top5: TopGuess[];
  resolution?: string;
}

export interface ScoreEvent {
  type: "score";
  human_total: number;
  machine_total: number;
  question_index: number;
  note?: string;
}

export interface FinishedEvent {
  type: "finished";
  human_score: number;
  machine_score: number;
  question_count: number;
}

export interface ErrorEvent {
  type: "error";
  message: string;
}

export type ServerEvent =
  | WordEvent
  | MachineBuzzEvent
  | ResultEvent
  | ScoreEvent
  | FinishedEvent
  | ErrorEvent;

export type ClientEvent =
  | { type: "buzz"; position: number }
  | { type: "answer"; text: string }
  | { type: "next" };

const SERVER_TYPES = new Set([
  "word",
  "machine_buzz",
  "result",
  "score",
  "finished",
  "error",
]);

/** Parse one frame; null means "malformed, log and ignore". */
export function parseServerEvent(raw: unknown): ServerEvent | null {
  if (typeof raw === "string") {
    try {
      raw = JSON.parse(raw);
    } catch {
      return null;
    }
  }
  if (typeof raw !== "object" || raw === null) return null;
  const candidate = raw as { type?: unknown };
  if (typeof candidate.type !== "string" || !SERVER_TYPES.has(candidate.type)) {
    return null;
  }
  if (candidate.type === "word") {
    const word = raw as Partial<WordEvent>;
    if (typeof word.index !== "number" || typeof word.token !== "string") return null;
  }
  return raw as ServerEvent;
}
