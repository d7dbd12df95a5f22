/** Blind-mode payloads и the rendered UI never reveal which strategy
 * drives the other seats; opponents stay "Player N". */

import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import { ClientMatchModel } from "../src/model.js";
import { renderTable } from "../src/view.js";
import type { Fixture } from "./mock_service.js";

const here = dirname(fileURLToPath(import.meta.url));
const raw = readFileSync(join(here, "fixtures", "match_fixture.json"), "utf-8");
const fixture: Fixture = JSON.parse(raw);

describe("blind mode", () => {
  it("no payload in the recorded session carries a strategy identity", () => {
    expect(raw.includes('"strategy"')).toBe(false);
    for (const token of ['"greedy"', '"mcts"', '"ismcts"', "iters="]) {
      expect(raw.includes(token), token).toBe(false);
    }
  });

  it("renders opponents anonymously", () => {
    const model = new ClientMatchModel();
    model.loadView(structuredClone(fixture.steps[0].view));
    document.body.innerHTML = '<div id="board"></div>';
    const board = document.getElementById("board")!;
    renderTable(model.display(), board, { onCardClick: () => undefined });
    const seats = [...board.querySelectorAll(".seat")];
    expect(seats.length).toBe(3);
    for (const seat of seats) {
      expect(seat.textContent).toMatch(/^Player \d/);
    }
    const text = board.textContent ?? "";
    for (const name of ["greedy", "mcts", "ismcts", "chitarrella"]) {
      expect(text.toLowerCase().includes(name)).toBe(false);
    }
  });
});
