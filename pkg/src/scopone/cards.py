"""Card and deck primitives: the 40-card Italian deck, primiera values,
and reproducible dealing.

Card text encoding used by logs, fixtures and the service API:
``<rank><suit>`` with ranks ``A,2-7,J,Q,K`` and the French suit letters
``d,s,h,c`` (coins=diamonds, swords=spades, cups=hearts, batons=clubs).
``7d`` is the settebello.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable

from .rng import SplitMix64, mix64


class Suit(enum.IntEnum):
    COINS = 0   # diamonds
    SWORDS = 1  # spades
    CUPS = 2    # hearts
    BATONS = 3  # clubs


SUIT_LETTERS = "dshc"
RANK_SYMBOLS = ("A", "2", "3", "4", "5", "6", "7", "J", "Q", "K")

# Primiera value by rank (index rank-1): 7 is the best card of a suit,
# face cards are worth least.
PRIMIERA_VALUES = (16, 12, 13, 14, 15, 18, 21, 10, 10, 10)


@total_ordering
@dataclass(frozen=True, slots=True)
class Card:
    """One of the 40 cards. rank 1..10 (1=ace, 8=J, 9=Q, 10=K)."""

    rank: int
    suit: Suit

    def __post_init__(self) -> None:
        if not 1 <= self.rank <= 10:
            raise ValueError(f"rank out of range: {self.rank}")
        if not isinstance(self.suit, Suit):
            object.__setattr__(self, "suit", Suit(self.suit))

    @property
    def id(self) -> int:
        """Canonical index 0..39 (suit-major, then rank)."""
        return self.suit * 10 + self.rank - 1

    @classmethod
    def from_id(cls, card_id: int) -> "Card":
        return CARDS[card_id]

    def code(self) -> str:
        return RANK_SYMBOLS[self.rank - 1] + SUIT_LETTERS[self.suit]

    def __str__(self) -> str:
        return self.code()

    def __lt__(self, other: "Card") -> bool:
        return self.id < other.id


CARDS: tuple[Card, ...] = tuple(
    Card(rank, suit) for suit in Suit for rank in range(1, 11)
)
FULL_DECK: frozenset[Card] = frozenset(CARDS)
SETTEBELLO = Card(7, Suit.COINS)


def parse_card(text: str) -> Card:
    text = text.strip()
    if len(text) != 2 or text[0] not in RANK_SYMBOLS or text[1] not in SUIT_LETTERS:
        raise ValueError(f"bad card code: {text!r}")
    return Card(RANK_SYMBOLS.index(text[0]) + 1, Suit(SUIT_LETTERS.index(text[1])))


def parse_cards(text: str, sep: str = ",") -> tuple[Card, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(parse_card(tok) for tok in text.split(sep))


def format_cards(cards: Iterable[Card], sep: str = ",") -> str:
    return sep.join(c.code() for c in sorted(cards))


def primiera_value(card: Card) -> int:
    """Primiera point value of a card (7 -> 21, 6 -> 18, A -> 16, ...)."""
    return PRIMIERA_VALUES[card.rank - 1]


@dataclass(frozen=True, slots=True)
class Deck:
    """An ordered permutation of the full 40-card deck."""

    cards: tuple[Card, ...]

    def __post_init__(self) -> None:
        if len(self.cards) != 40 or set(self.cards) != FULL_DECK:
            raise ValueError("deck must be a permutation of the 40-card set")


@dataclass(frozen=True, slots=True)
class DealResult:
    """Hands and table produced by one (re)deal.

    ``hands[s]`` is seat s's nine cards in the order dealt; the table
    holds the four face-up cards. The table never contains three or
    more kings (such deals are repeated).
    """

    hands: tuple[tuple[Card, ...], ...]
    table: tuple[Card, ...]
    dealer_seat: int

    def __post_init__(self) -> None:
        dealt = [c for hand in self.hands for c in hand] + list(self.table)
        if len(self.hands) != 4 or any(len(h) != 9 for h in self.hands):
            raise ValueError("each of the 4 seats must receive 9 cards")
        if len(self.table) != 4:
            raise ValueError("table must receive 4 cards")
        if set(dealt) != FULL_DECK or len(dealt) != 40:
            raise ValueError("deal must partition the full deck")
        if sum(1 for c in self.table if c.rank == 10) >= 3:
            raise ValueError("table holds three or more kings")


def shuffled_deck(rng: SplitMix64) -> Deck:
    order = list(CARDS)
    rng.shuffle(order)
    return Deck(tuple(order))


def deal(rng_seed: int, dealer_seat: int = 3) -> DealResult:
    """Deterministically deal a match from a 64-bit seed.

    Shuffles with Fisher-Yates over a seeded SplitMix64 stream, deals
    three cards at a time counterclockwise starting from the eldest
    hand, placing two pairs face up on the table between rounds. A
    table with three (or four) kings forces a redeal, which consumes
    the next derived substream, so the result is a pure function of
    (seed, dealer_seat).
    """
    if not 0 <= dealer_seat <= 3:
        raise ValueError(f"bad seat: {dealer_seat}")
    seat_order = [(dealer_seat + 1 + i) % 4 for i in range(4)]
    attempt = 0
    while True:
        deck = shuffled_deck(SplitMix64(mix64(rng_seed, attempt)))
        it = iter(deck.cards)
        hands: list[list[Card]] = [[], [], [], []]
        table: list[Card] = []
        for round_no in range(3):
            for seat in seat_order:
                hands[seat].extend(next(it) for _ in range(3))
            if round_no < 2:
                table.extend(next(it) for _ in range(2))
        if sum(1 for c in table if c.rank == 10) < 3:
            return DealResult(
                hands=tuple(tuple(h) for h in hands),
                table=tuple(table),
                dealer_seat=dealer_seat,
            )
        attempt += 1
