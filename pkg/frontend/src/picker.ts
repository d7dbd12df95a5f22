/** Move selection flow. The only moves that can ever be submitted are
 * the ones the server enumerated in the current view: a card with no
 * capture options is a placement, one option asks for confirmation,
 * several open the combination picker. */

import type { LegalMove, MatchView } from "./types.js";
import { cardLabel } from "./cards.js";

export type SubmitFn = (move: LegalMove) => void;

export interface PickerState {
  card: string | null;
  options: string[][] | null;
}

export class MovePicker {
  state: PickerState = { card: null, options: null };

  constructor(private submit: SubmitFn) {}

  /** Handle a click on a hand card. Returns what the UI should do. */
  selectCard(view: MatchView, card: string): "submitted" | "confirm" | "pick" | "ignored" {
    if (!view.your_turn) {
      return "ignored";
    }
    const options = view.capture_options[card];
    if (options === undefined) {
      return "ignored"; // not a playable card per the server
    }
    if (options.length === 0) {
      this.state = { card: null, options: null };
      this.submit({ played: card, captured: [] });
      return "submitted";
    }
    this.state = { card, options };
    return options.length === 1 ? "confirm" : "pick";
  }

  /** Confirm the pending capture (single option or picked index). */
  choose(index: number): void {
    if (this.state.card === null || this.state.options === null) {
      throw new Error("nothing pending");
    }
    const option = this.state.options[index];
    if (option === undefined) {
      throw new Error(`no option ${index}`);
    }
    const move = { played: this.state.card, captured: option };
    this.state = { card: null, options: null };
    this.submit(move);
  }

  cancel(): void {
    this.state = { card: null, options: null };
  }

  /** Render the pending confirmation / combination picker. */
  renderInto(container: HTMLElement): void {
    container.textContent = "";
    if (this.state.card === null || this.state.options === null) {
      container.hidden = true;
      return;
    }
    container.hidden = false;
    const title = document.createElement("div");
    title.className = "picker-title";
    title.textContent =
      this.state.options.length === 1
        ? `Play ${cardLabel(this.state.card)} and capture:`
        : `Play ${cardLabel(this.state.card)} — choose a capture:`;
    container.appendChild(title);
    this.state.options.forEach((option, index) => {
      const button = document.createElement("button");
      button.className = "picker-option";
      button.dataset.index = String(index);
      button.textContent = option.map(cardLabel).join(" + ");
      button.addEventListener("click", () => this.choose(index));
      container.appendChild(button);
    });
    const cancel = document.createElement("button");
    cancel.className = "picker-cancel";
    cancel.textContent = "cancel";
    cancel.addEventListener("click", () => {
      this.cancel();
      this.renderInto(container);
    });
    container.appendChild(cancel);
  }
}
