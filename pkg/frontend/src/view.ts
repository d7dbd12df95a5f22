/** DOM rendering of the play table. Thin view over DisplayState: every
 * option shown comes from server payloads, opponents stay anonymous
 * ("Player N"), and re-rendering from a rebuilt model produces the
 * same board. */

import { cardColor, cardLabel, sortCodes } from "./cards.js";
import type { DisplayState } from "./model.js";
import type { CardCode, TeamScore } from "./types.js";

export interface RenderHandlers {
  onCardClick: (card: CardCode) => void;
}

function cardNode(code: CardCode, clickable: boolean,
                  handlers: RenderHandlers): HTMLElement {
  const el = document.createElement(clickable ? "button" : "span");
  el.className = `card ${cardColor(code)}${clickable ? " playable" : ""}`;
  (el as HTMLElement).dataset.card = code;
  el.textContent = cardLabel(code);
  if (clickable) {
    el.addEventListener("click", () => handlers.onCardClick(code));
  }
  return el;
}

function section(title: string, className: string): [HTMLElement, HTMLElement] {
  const wrap = document.createElement("section");
  wrap.className = className;
  const heading = document.createElement("h3");
  heading.textContent = title;
  wrap.appendChild(heading);
  const body = document.createElement("div");
  body.className = "body";
  wrap.appendChild(body);
  return [wrap, body];
}

export function renderTable(state: DisplayState, root: HTMLElement,
                            handlers: RenderHandlers): void {
  root.textContent = "";

  const status = document.createElement("div");
  status.className = "status-bar";
  status.dataset.status = state.status;
  status.textContent =
    state.status === "finished"
      ? "Match finished"
      : state.yourTurn
        ? "Your turn"
        : "Waiting for the other players...";
  if (state.scopaFlash) {
    const flash = document.createElement("span");
    flash.className = "scopa-flash";
    flash.textContent = " SCOPA!";
    status.appendChild(flash);
  }
  root.appendChild(status);

  const seats = document.createElement("div");
  seats.className = "seats";
  for (let seat = 0; seat < 4; seat += 1) {
    if (seat === state.humanSeat) {
      continue;
    }
    const badge = document.createElement("div");
    badge.className = "seat";
    badge.dataset.seat = String(seat);
    // opponents and teammate stay anonymous: identity is never shown
    badge.textContent = `Player ${seat} — ${state.handSizes[seat]} cards`;
    if (seat === state.currentSeat && state.status !== "finished") {
      badge.className += " thinking";
    }
    seats.appendChild(badge);
  }
  root.appendChild(seats);

  const [tableWrap, tableBody] = section("Table", "table-zone");
  for (const code of sortCodes(state.table)) {
    tableBody.appendChild(cardNode(code, false, handlers));
  }
  if (state.table.length === 0) {
    const empty = document.createElement("em");
    empty.textContent = "empty";
    tableBody.appendChild(empty);
  }
  root.appendChild(tableWrap);

  const [handWrap, handBody] = section(`Your hand (seat ${state.humanSeat})`, "hand-zone");
  for (const code of sortCodes(state.hand)) {
    handBody.appendChild(cardNode(code, state.yourTurn, handlers));
  }
  root.appendChild(handWrap);

  const [pilesWrap, pilesBody] = section("Captures", "piles-zone");
  (["hand team", "deck team"] as const).forEach((name, team) => {
    const row = document.createElement("div");
    row.className = "pile";
    row.dataset.team = String(team);
    const scope = state.scope[team].length;
    row.textContent =
      `${name}: ${state.piles[team].length} cards` +
      (scope ? `, ${scope} scop${scope === 1 ? "a" : "e"}` : "");
    pilesBody.appendChild(row);
  });
  root.appendChild(pilesWrap);

  const gs = document.createElement("div");
  gs.className = "game-score";
  gs.textContent =
    `Game score ${state.gameScore.hand}–${state.gameScore.deck}` +
    (state.gameScore.target ? ` (to ${state.gameScore.target})` : "");
  root.appendChild(gs);

  if (state.score) {
    const score = state.score;
    const [scoreWrap, scoreBody] = section("Match score", "score-panel");
    const rows: [string, (t: TeamScore) => string][] = [
      ["scope", (t) => String(t.scope)],
      ["cards", (t) => String(t.cards)],
      ["coins", (t) => String(t.coins)],
      ["settebello", (t) => (t.settebello ? "1" : "0")],
      ["primiera", (t) => String(t.primiera)],
      ["total", (t) => String(t.total)],
    ];
    const grid = document.createElement("table");
    const head = document.createElement("tr");
    head.innerHTML = "<th></th><th>hand team</th><th>deck team</th>";
    grid.appendChild(head);
    for (const [label, pick] of rows) {
      const tr = document.createElement("tr");
      tr.dataset.row = label;
      const th = document.createElement("th");
      th.textContent = label;
      tr.appendChild(th);
      for (const team of [score.hand_team, score.deck_team]) {
        const td = document.createElement("td");
        td.textContent = pick(team);
        tr.appendChild(td);
      }
      grid.appendChild(tr);
    }
    scoreBody.appendChild(grid);
    root.appendChild(scoreWrap);
  }

  const [logWrap, logBody] = section("Moves", "move-log");
  const list = document.createElement("ol");
  for (const event of state.log) {
    const li = document.createElement("li");
    const taken = event.captured.length
      ? ` takes ${event.captured.map(cardLabel).join(" ")}`
      : " placed";
    li.textContent =
      `Player ${event.seat}: ${cardLabel(event.played)}${taken}` +
      (event.scopa ? " (scopa)" : "");
    list.appendChild(li);
  }
  logBody.appendChild(list);
  root.appendChild(logWrap);
}
