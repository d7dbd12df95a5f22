/** Client-side match state: the last fetched view plus the events that
 * arrived after it. All display state derives from those two inputs,
 * so the board is always rebuildable by refetching the view and
 * replaying the stream; no rules logic lives here, events carry
 * complete instructions. */

import type {
  CardCode,
  MatchEvent,
  MatchView,
  MoveEvent,
  ScorePayload,
} from "./types.js";

export interface DisplayState {
  status: string;
  yourTurn: boolean;
  humanSeat: number;
  currentSeat: number;
  hand: CardCode[];
  table: CardCode[];
  piles: [CardCode[], CardCode[]];
  scope: [CardCode[], CardCode[]];
  handSizes: number[];
  gameScore: { hand: number; deck: number; target: number | null };
  score: ScorePayload | null;
  log: MoveEvent[];
  scopaFlash: boolean;
  matchNumber: number;
}

export class ClientMatchModel {
  private view: MatchView | null = null;
  private pending: MatchEvent[] = [];
  lastSeq = -1;
  needsRefresh = false;

  loadView(view: MatchView): void {
    this.view = view;
    this.pending = [];
    this.lastSeq = view.events_seen - 1;
    this.needsRefresh = false;
  }

  get currentView(): MatchView | null {
    return this.view;
  }

  applyEvent(event: MatchEvent): void {
    if (event.seq <= this.lastSeq) {
      return; // already reflected in the view snapshot or applied
    }
    this.lastSeq = event.seq;
    this.pending.push(event);
    if (event.type === "new_match") {
      // a fresh deal: zones must come from a fresh view
      this.needsRefresh = true;
    }
  }

  /** Current board, derived from the snapshot plus pending events. */
  display(): DisplayState {
    if (this.view === null) {
      throw new Error("no view loaded");
    }
    const view = this.view;
    const hand = new Set(view.hand);
    const table = new Set(view.table);
    const piles: [Set<CardCode>, Set<CardCode>] = [
      new Set(view.piles.hand_team),
      new Set(view.piles.deck_team),
    ];
    const scope: [CardCode[], CardCode[]] = [
      [...view.scope.hand_team],
      [...view.scope.deck_team],
    ];
    const handSizes = [...view.hand_sizes];
    const log: MoveEvent[] = [];
    let score: ScorePayload | null = view.score ?? null;
    let status: string = view.status;
    let scopaFlash = false;
    let gameScore = {
      hand: view.game_score.hand_team,
      deck: view.game_score.deck_team,
      target: view.game_score.target,
    };

    for (const event of this.pending) {
      if (event.type === "move") {
        const team = event.seat % 2;
        if (event.seat === view.human_seat) {
          hand.delete(event.played);
        }
        handSizes[event.seat] = Math.max(0, handSizes[event.seat] - 1);
        if (event.captured.length > 0) {
          for (const code of event.captured) {
            table.delete(code);
            piles[team].add(code);
          }
          piles[team].add(event.played);
          if (event.scopa) {
            scope[team].push(event.played);
            scopaFlash = true;
          }
        } else {
          table.add(event.played);
        }
        if (event.settled && event.settled_team !== undefined) {
          for (const code of event.settled) {
            table.delete(code);
            piles[event.settled_team].add(code);
          }
        }
        log.push(event);
      } else if (event.type === "score") {
        score = event.score;
        gameScore = {
          hand: event.game_score[0],
          deck: event.game_score[1],
          target: gameScore.target,
        };
      } else if (event.type === "status") {
        status = event.status as DisplayState["status"];
      }
    }
    return {
      status,
      yourTurn: view.your_turn && this.pending.length === 0,
      humanSeat: view.human_seat,
      currentSeat: view.current_seat,
      hand: [...hand],
      table: [...table],
      piles: [[...piles[0]], [...piles[1]]],
      scope,
      handSizes,
      gameScore,
      score,
      log,
      scopaFlash,
      matchNumber: view.match_number,
    };
  }
}
