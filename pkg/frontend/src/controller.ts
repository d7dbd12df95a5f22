/** Orchestrates one match: fetch views, render, submit picked moves,
 * follow the event stream. UI-framework-free so tests can drive it
 * with a mocked service and synthesized DOM clicks. */

import { ApiError, type ServiceApi } from "./api.js";
import { ClientMatchModel } from "./model.js";
import { MovePicker } from "./picker.js";
import { renderTable } from "./view.js";
import type { CardCode, LegalMove } from "./types.js";

export class MatchController {
  model = new ClientMatchModel();
  picker: MovePicker;
  matchId = "";
  token = "";
  /** resolves when the in-flight submit + event-follow cycle is done */
  busy: Promise<void> = Promise.resolve();

  constructor(
    private api: ServiceApi,
    private board: HTMLElement,
    private pickerBox: HTMLElement,
  ) {
    this.picker = new MovePicker((move) => {
      this.busy = this.submit(move);
    });
  }

  async create(body: Record<string, unknown>): Promise<void> {
    const created = await this.api.createMatch(body);
    this.matchId = created.match_id;
    this.token = created.token;
    await this.refresh();
    await this.pump();
  }

  async refresh(): Promise<void> {
    this.model.loadView(await this.api.getView(this.matchId, this.token));
    this.paint();
  }

  paint(): void {
    renderTable(this.model.display(), this.board, {
      onCardClick: (card) => this.onCardClick(card),
    });
    this.picker.renderInto(this.pickerBox);
  }

  onCardClick(card: CardCode): void {
    const view = this.model.currentView;
    if (!view) {
      return;
    }
    this.picker.selectCard(view, card);
    this.picker.renderInto(this.pickerBox);
  }

  private async submit(move: LegalMove): Promise<void> {
    this.picker.renderInto(this.pickerBox);
    try {
      await this.api.submitMove(this.matchId, this.token, move);
    } catch (err) {
      if (err instanceof ApiError) {
        // rejected: refetch rather than desync
        await this.refresh();
        return;
      }
      throw err;
    }
    await this.pump();
  }

  async pump(): Promise<void> {
    for (;;) {
      const batch = await this.api.events(
        this.matchId,
        this.token,
        this.model.lastSeq,
        20,
      );
      for (const event of batch.events) {
        this.model.applyEvent(event);
      }
      if (this.model.needsRefresh) {
        await this.refresh();
      } else {
        this.paint();
      }
      if (batch.status === "finished" || batch.status === "awaiting_human") {
        await this.refresh();
        return;
      }
    }
  }
}
