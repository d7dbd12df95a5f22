/** Payload shapes of the live-match service API (canonical card codes). */

export type CardCode = string; // e.g. "7d", "As", "Kh", "Jc"

export interface LegalMove {
  played: CardCode;
  captured: CardCode[];
}

export interface TeamScore {
  total: number;
  scope: number;
  cards: number;
  coins: number;
  settebello: boolean;
  primiera: number;
}

export interface ScorePayload {
  hand_team: TeamScore;
  deck_team: TeamScore;
}

export interface MatchView {
  match_id: string;
  status: "awaiting_human" | "ai_thinking" | "finished";
  match_number: number;
  human_seat: number;
  current_seat: number;
  turn_index: number;
  your_turn: boolean;
  hand: CardCode[];
  table: CardCode[];
  piles: { hand_team: CardCode[]; deck_team: CardCode[] };
  scope: { hand_team: CardCode[]; deck_team: CardCode[] };
  hand_sizes: number[];
  last_capturer: number | null;
  legal_moves: LegalMove[];
  capture_options: Record<CardCode, CardCode[][]>;
  game_score: { hand_team: number; deck_team: number; target: number | null };
  events_seen: number;
  score?: ScorePayload;
}

export interface MoveEvent {
  type: "move";
  seq: number;
  seat: number;
  played: CardCode;
  captured: CardCode[];
  scopa: boolean;
  /** end-of-match settlement: leftover table cards and receiving team */
  settled?: CardCode[];
  settled_team?: number;
}

export interface ScoreEvent {
  type: "score";
  seq: number;
  score: ScorePayload;
  game_score: number[];
}

export interface StatusEvent {
  type: "status";
  seq: number;
  status: string;
}

export interface NewMatchEvent {
  type: "new_match";
  seq: number;
  match_number: number;
  human_seat: number;
  game_score: number[];
}

export type MatchEvent = MoveEvent | ScoreEvent | StatusEvent | NewMatchEvent;

export interface CreatedMatch {
  match_id: string;
  token: string;
  human_seat: number;
  mode: string;
}

export interface MoveAck {
  accepted: boolean;
  status: string;
  turn_index: number;
}

export interface EventBatch {
  events: MatchEvent[];
  next: number;
  status: string;
}
