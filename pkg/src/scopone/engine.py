"""Authoritative Scopone rules engine.

Legal-move generation, move application, scopa detection, end-of-match
settlement and scoring, all over immutable states. Seats are fixed
roles: seat 0 is the eldest hand, seat 3 the dealer; seats {0,2} form
the hand team (index 0) and {1,3} the deck team (index 1). A match is
exactly 36 moves.

The compiled kernels reimplement the hot subset of these rules over
bitmasks; this module is the readable reference the kernels are tested
against.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple, Optional

from .cards import Card, FULL_DECK, SETTEBELLO, Suit, DealResult, primiera_value

HAND_TEAM = 0
DECK_TEAM = 1
TEAM_NAMES = ("hand", "deck")


def team_of(seat: int) -> int:
    return seat & 1


class RulesError(Exception):
    """Base class for engine rule violations."""


class IllegalMoveError(RulesError):
    pass


class MatchOverError(RulesError):
    pass


class MatchNotOverError(RulesError):
    pass


class InvalidStateError(RulesError):
    pass


@dataclass(frozen=True, slots=True)
class Move:
    """A played card plus the (possibly empty) set of captured cards."""

    played: Card
    captured: frozenset[Card]

    def __post_init__(self) -> None:
        if not isinstance(self.captured, frozenset):
            object.__setattr__(self, "captured", frozenset(self.captured))

    @property
    def is_capture(self) -> bool:
        return bool(self.captured)

    def sort_key(self) -> tuple:
        """Canonical ordering key: (played card, captured cards)."""
        return (self.played.id, tuple(sorted(c.id for c in self.captured)))

    def __str__(self) -> str:
        if not self.captured:
            return self.played.code()
        taken = " ".join(c.code() for c in sorted(self.captured))
        return f"{self.played.code()} x {taken}"


class HistoryEntry(NamedTuple):
    seat: int
    table_before: frozenset[Card]
    move: Move


@dataclass(frozen=True, slots=True)
class MatchState:
    """Complete authoritative state of one match.

    Immutable: `apply_move` returns a new state, so states can be
    shared freely across parallel simulations and replays.
    """

    hands: tuple[frozenset[Card], ...]
    table: frozenset[Card]
    piles: tuple[frozenset[Card], frozenset[Card]]
    scope: tuple[tuple[Card, ...], tuple[Card, ...]]
    current_seat: int
    last_capturer: Optional[int]
    history: tuple[HistoryEntry, ...]
    turn_index: int

    @classmethod
    def from_deal(cls, deal: DealResult) -> "MatchState":
        if deal.dealer_seat != 3:
            raise InvalidStateError(
                "the engine plays with fixed roles (dealer at seat 3); "
                "rotate players between matches, not seats"
            )
        return cls(
            hands=tuple(frozenset(h) for h in deal.hands),
            table=frozenset(deal.table),
            piles=(frozenset(), frozenset()),
            scope=((), ()),
            current_seat=0,
            last_capturer=None,
            history=(),
            turn_index=0,
        )

    @property
    def is_over(self) -> bool:
        return self.turn_index >= 36

    def scopa_counts(self) -> tuple[int, int]:
        return (len(self.scope[0]), len(self.scope[1]))


@dataclass(frozen=True, slots=True)
class PlayerView:
    """What one seat may legitimately know: a pure projection of
    MatchState with the other hands removed.

    Captures are public (face up as they happen), so piles, scope and
    the full move history are visible; hand sizes follow from the
    history.
    """

    seat: int
    hand: frozenset[Card]
    table: frozenset[Card]
    piles: tuple[frozenset[Card], frozenset[Card]]
    scope: tuple[tuple[Card, ...], tuple[Card, ...]]
    hand_sizes: tuple[int, int, int, int]
    current_seat: int
    last_capturer: Optional[int]
    history: tuple[HistoryEntry, ...]
    turn_index: int

    @property
    def is_over(self) -> bool:
        return self.turn_index >= 36

    def unseen_cards(self) -> frozenset[Card]:
        """Cards hidden in the other three hands."""
        visible = self.hand | self.table | self.piles[0] | self.piles[1]
        return FULL_DECK - visible


def view_for(state: MatchState, seat: int) -> PlayerView:
    return PlayerView(
        seat=seat,
        hand=state.hands[seat],
        table=state.table,
        piles=state.piles,
        scope=state.scope,
        hand_sizes=tuple(len(h) for h in state.hands),
        current_seat=state.current_seat,
        last_capturer=state.last_capturer,
        history=state.history,
        turn_index=state.turn_index,
    )


@dataclass(frozen=True, slots=True)
class TeamScore:
    scopa_count: int
    cards_captured: int
    coins_captured: int
    has_settebello: bool
    primiera_sum: int
    total_points: int


@dataclass(frozen=True, slots=True)
class MatchScore:
    teams: tuple[TeamScore, TeamScore]

    @property
    def totals(self) -> tuple[int, int]:
        return (self.teams[0].total_points, self.teams[1].total_points)

    def winner(self) -> Optional[int]:
        """Winning team index, or None on a tie."""
        a, b = self.totals
        if a == b:
            return None
        return 0 if a > b else 1


def capture_combinations(played: Card, table: Iterable[Card]) -> list[frozenset[Card]]:
    """All capture options for `played` against `table`.

    A same-rank card on the table forces the capture of exactly that
    single card (one option per such card); only when no same-rank card
    is present do multi-card rank-sum combinations apply. Returns [] if
    the card cannot capture. Options come in canonical card order so
    callers can tie-break deterministically.
    """
    cards = sorted(table)
    singles = [c for c in cards if c.rank == played.rank]
    if singles:
        return [frozenset((c,)) for c in singles]
    combos: list[frozenset[Card]] = []
    chosen: list[Card] = []

    def search(i: int, remaining: int) -> None:
        if remaining == 0:
            if len(chosen) >= 2:
                combos.append(frozenset(chosen))
            return
        if i == len(cards) or remaining < 0:
            return
        card = cards[i]
        if card.rank <= remaining:
            chosen.append(card)
            search(i + 1, remaining - card.rank)
            chosen.pop()
        search(i + 1, remaining)

    search(0, played.rank)
    return combos


def legal_moves_for(hand: Iterable[Card], table: Iterable[Card]) -> list[Move]:
    """Legal moves for a hand against a table, in canonical order.

    For each hand card: one capture per combination if it can capture,
    otherwise a placement. Placing a card that has the ability to
    capture is not legal.
    """
    table = frozenset(table)
    moves: list[Move] = []
    for card in sorted(hand):
        options = capture_combinations(card, table)
        if options:
            moves.extend(Move(card, opt) for opt in options)
        else:
            moves.append(Move(card, frozenset()))
    return moves


def legal_moves(state: MatchState) -> list[Move]:
    if state.is_over:
        raise MatchOverError("match is over, no moves available")
    hand = state.hands[state.current_seat]
    if not hand:
        raise InvalidStateError(
            f"seat {state.current_seat} has an empty hand at turn {state.turn_index}"
        )
    return legal_moves_for(hand, state.table)


def apply_move(state: MatchState, move: Move) -> MatchState:
    """Apply one move, returning the successor state.

    A capture that empties the table before the last turn scores a
    scopa. The 36th move triggers the settlement: leftover table cards
    go to the team of the last capturer (and can never score scopa).
    """
    if move not in legal_moves(state):
        raise IllegalMoveError(f"move {move} is not legal here")
    seat = state.current_seat
    team = team_of(seat)
    hands = list(state.hands)
    hands[seat] = hands[seat] - {move.played}
    piles = list(state.piles)
    scope = list(state.scope)
    last_capturer = state.last_capturer
    if move.captured:
        table = state.table - move.captured
        piles[team] = piles[team] | move.captured | {move.played}
        last_capturer = seat
        if not table and state.turn_index < 35:
            scope[team] = scope[team] + (move.played,)
    else:
        table = state.table | {move.played}
    turn_index = state.turn_index + 1
    if turn_index == 36 and table and last_capturer is not None:
        piles[team_of(last_capturer)] = piles[team_of(last_capturer)] | table
        table = frozenset()
    return MatchState(
        hands=tuple(hands),
        table=table,
        piles=(piles[0], piles[1]),
        scope=(scope[0], scope[1]),
        current_seat=(seat + 1) % 4,
        last_capturer=last_capturer,
        history=state.history + (HistoryEntry(seat, state.table, move),),
        turn_index=turn_index,
    )


def _primiera(pile: frozenset[Card]) -> tuple[int, bool]:
    """(best-card-per-suit sum, team holds all four suits)."""
    best = [0, 0, 0, 0]
    seen = [False, False, False, False]
    for card in pile:
        seen[card.suit] = True
        value = primiera_value(card)
        if value > best[card.suit]:
            best[card.suit] = value
    return sum(best), all(seen)


def score_match(state: MatchState) -> MatchScore:
    """Settle the five scoring categories for a finished match.

    Cards, coins and primiera go to the strict majority / strictly
    higher side; ties assign no point. A team missing a suit entirely
    loses the primiera point to the opponents, unless both teams miss
    one, in which case nobody scores it.
    """
    if not state.is_over:
        raise MatchNotOverError(f"match not over (turn {state.turn_index})")
    counts = [len(p) for p in state.piles]
    coins = [sum(1 for c in p if c.suit == Suit.COINS) for p in state.piles]
    settebello = [SETTEBELLO in p for p in state.piles]
    prim_sum, prim_complete = zip(*(_primiera(p) for p in state.piles))

    points = [len(state.scope[0]), len(state.scope[1])]
    if counts[0] != counts[1]:
        points[counts[1] > counts[0]] += 1
    if coins[0] != coins[1]:
        points[coins[1] > coins[0]] += 1
    for team in (0, 1):
        if settebello[team]:
            points[team] += 1
    if prim_complete[0] and prim_complete[1]:
        if prim_sum[0] != prim_sum[1]:
            points[prim_sum[1] > prim_sum[0]] += 1
    elif prim_complete[0] or prim_complete[1]:
        points[int(prim_complete[1])] += 1

    teams = tuple(
        TeamScore(
            scopa_count=len(state.scope[t]),
            cards_captured=counts[t],
            coins_captured=coins[t],
            has_settebello=settebello[t],
            primiera_sum=prim_sum[t],
            total_points=points[t],
        )
        for t in (0, 1)
    )
    return MatchScore(teams=teams)


def replay(deal: DealResult, moves: Iterable[Move]) -> MatchState:
    """Re-run a recorded match; bit-for-bit deterministic."""
    state = MatchState.from_deal(deal)
    for move in moves:
        state = apply_move(state, move)
    return state
