/** Display helpers for the card text codes. No rules knowledge here. */

import type { CardCode } from "./types.js";

const SUIT_GLYPHS: Record<string, string> = {
  d: "♦", // diamonds (coins)
  s: "♠", // spades (swords)
  h: "♥", // hearts (cups)
  c: "♣", // clubs (batons)
};

export function cardLabel(code: CardCode): string {
  return code[0] + (SUIT_GLYPHS[code[1]] ?? "?");
}

export function cardColor(code: CardCode): "red" | "black" {
  const suit = code[1];
  return suit === "d" || suit === "h" ? "red" : "black";
}

export function sortCodes(codes: CardCode[]): CardCode[] {
  const suits = "dshc";
  const ranks = "A234567JQK";
  return [...codes].sort(
    (a, b) =>
      suits.indexOf(a[1]) * 10 +
      ranks.indexOf(a[0]) -
      (suits.indexOf(b[1]) * 10 + ranks.indexOf(b[0])),
  );
}
