"""Rule-based strategies: Greedy, Chitarrella-Saracino (CS) and
Cicuti-Guardamagna (CG).

All three are fair players: they decide from a PlayerView (plus the
card-guessing state for CS/CG) and never see hidden hands. Decisions
are deterministic; every tie anywhere is broken by the canonical
(played card, captured cards) ordering so that runs reproduce exactly.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Optional

from .cards import CARDS, Card, SETTEBELLO, Suit, primiera_value
from .engine import (
    HAND_TEAM,
    Move,
    PlayerView,
    legal_moves_for,
    team_of,
)
from .guessing import GuessState
from .rng import SplitMix64


def importance(card: Card) -> int:
    """Capture priority of a card.

    Primiera value times ten, a coin bonus, and a large extra for the
    settebello: realizes the ordering 7d above everything, coins above
    their rank-mates, and primiera order within a suit.
    """
    value = primiera_value(card) * 10
    if card.suit == Suit.COINS:
        value += 60
    if card == SETTEBELLO:
        value += 40
    return value


CARD_IMPORTANCE: dict[Card, int] = {c: importance(c) for c in CARDS}


def captured_importance(move: Move) -> int:
    return sum(CARD_IMPORTANCE[c] for c in move.captured)


def achievable_sums(cards: Iterable[Card]) -> set[int]:
    """Rank sums (1..10) reachable by nonempty subsets of `cards`."""
    bits = 1  # bit k set <=> some subset sums to k
    for card in cards:
        bits |= bits << card.rank
        bits &= (1 << 11) - 1
    return {s for s in range(1, 11) if bits >> s & 1}


def placement_is_safe(card: Card, table: frozenset[Card],
                      danger_ranks: set[int]) -> bool:
    """True if placing `card` leaves no combination a dangerous rank
    could capture (dangerous = possibly held by whoever worries us)."""
    return not (achievable_sums(table | {card}) & danger_ranks)


def _best_capture(pool: list[Move]) -> Move:
    return min(pool, key=lambda m: (-captured_importance(m), m.sort_key()))


def _greedy_capture_choice(captures: list[Move], table: frozenset[Card],
                           turn_index: int) -> Move:
    """Pick among capturing moves the way the beginner strategy does.

    Scopa is taken whenever available, with one exception: a non-scopa
    capture that banks the settebello outranks it. A sweep already
    containing the settebello can't be dominated, and sweeping the last
    turn is no scopa, so no preference applies there.
    """
    if turn_index < 35:
        scopas = [m for m in captures if m.captured == table]
        if scopas:
            if SETTEBELLO in table:
                return _best_capture(scopas)
            settebello_alts = [
                m for m in captures
                if m.captured != table
                and (m.played == SETTEBELLO or SETTEBELLO in m.captured)
            ]
            return _best_capture(settebello_alts or scopas)
    return _best_capture(captures)


def _greedy_placement_choice(placements: list[Move], table: frozenset[Card],
                             danger_ranks: set[int]) -> Move:
    """Least important card among the placements leaving nothing a
    dangerous rank could capture, or among all of them when no
    placement is that safe."""
    safe = [m for m in placements
            if placement_is_safe(m.played, table, danger_ranks)]
    pool = safe or placements
    return min(pool, key=lambda m: (CARD_IMPORTANCE[m.played], m.sort_key()))


def greedy_choose(view: PlayerView) -> Move:
    """Beginner strategy: capture the most important cards available,
    otherwise shed the least important card, preferring placements that
    leave nothing capturable by a card still in play."""
    moves = legal_moves_for(view.hand, view.table)
    captures = [m for m in moves if m.captured]
    if captures:
        return _greedy_capture_choice(captures, view.table, view.turn_index)
    danger_ranks = {c.rank for c in view.unseen_cards()}
    return _greedy_placement_choice(moves, view.table, danger_ranks)


# ---------------------------------------------------------------------------
# Chitarrella-Saracino
# ---------------------------------------------------------------------------

DEALER_TEAMMATE = 1


def _sevens_rule_move(view: PlayerView, captures: list[Move]) -> Optional[Move]:
    """Dealer's teammate must take a capturable seven, preferring the
    spariglio when holding at most one seven and the direct seven-on-
    seven capture otherwise."""
    if view.seat != DEALER_TEAMMATE:
        return None
    seven_caps = [m for m in captures if any(c.rank == 7 for c in m.captured)]
    if not seven_caps:
        return None
    held_sevens = sum(1 for c in view.hand if c.rank == 7)
    if held_sevens <= 1:
        pool = [m for m in seven_caps if len(m.captured) >= 2] or seven_caps
    else:
        pool = [
            m for m in seven_caps
            if m.played.rank == 7 and len(m.captured) == 1
        ] or seven_caps
    return _best_capture(pool)


def _teammate_double_signal(view: PlayerView) -> list[int]:
    """Ranks the teammate announced by placing a card an opponent then
    captured (most recent first): replying with our copy restarts the
    mulinello, because the remaining copies are all on our side."""
    teammate = (view.seat + 2) % 4
    signals: list[int] = []
    for i, entry in enumerate(view.history):
        if entry.seat != teammate or entry.move.captured:
            continue
        placed = entry.move.played
        for later in view.history[i + 1:]:
            if placed in later.move.captured:
                if team_of(later.seat) != team_of(view.seat):
                    signals.append(placed.rank)
                break
    signals.reverse()
    return signals


def _cs_decide(view: PlayerView, gs: GuessState,
               avoid_placing_ranks: frozenset[int] = frozenset()) -> tuple[Move, str]:
    moves = legal_moves_for(view.hand, view.table)
    if len(moves) == 1:
        return moves[0], "forced"
    captures = [m for m in moves if m.captured]

    move = _sevens_rule_move(view, captures)
    if move is not None:
        return move, "cs:sevens"

    if captures:
        return (
            _greedy_capture_choice(captures, view.table, view.turn_index),
            "cs:capture",
        )

    placements = moves
    allowed = [
        m for m in placements if m.played.rank not in avoid_placing_ranks
    ] or placements

    # Ranks the opponents may still hold, per the guessing system.
    opponent_ranks = set()
    for s in range(4):
        if s != view.seat and team_of(s) != team_of(view.seat):
            opponent_ranks |= {c.rank for c in gs.candidate_sets[s]}

    safe = [
        m for m in allowed
        if placement_is_safe(m.played, view.table, opponent_ranks)
    ]
    if safe:
        return (
            min(safe, key=lambda m: (m.played.rank, m.sort_key())),
            "cs:mulinello",
        )

    rank_counts = Counter(c.rank for c in view.hand)
    doubles = [m for m in allowed if rank_counts[m.played.rank] >= 2]
    if doubles:
        return (
            min(doubles, key=lambda m: (m.played.rank, m.sort_key())),
            "cs:double",
        )

    for rank in _teammate_double_signal(view):
        replies = [m for m in allowed if m.played.rank == rank]
        if replies:
            return min(replies, key=Move.sort_key), "cs:double-reply"

    if team_of(view.seat) == HAND_TEAM:
        pile_ranks = Counter(
            c.rank for c in (view.piles[0] | view.piles[1])
        )
        last_decoupled = [
            m for m in allowed if pile_ranks[m.played.rank] == 3
        ]
        if last_decoupled:
            return (
                min(
                    last_decoupled,
                    key=lambda m: (-m.played.rank, m.sort_key()),
                ),
                "cs:decouple",
            )

    danger_ranks = {c.rank for c in view.unseen_cards()}
    return (
        _greedy_placement_choice(allowed, view.table, danger_ranks),
        "cs:greedy",
    )


def cs_choose(view: PlayerView, gs: GuessState) -> Move:
    """Chitarrella-Saracino: expert rule list over the guessed hands."""
    return _cs_decide(view, gs)[0]


# ---------------------------------------------------------------------------
# Cicuti-Guardamagna
# ---------------------------------------------------------------------------


def _best_seven_move(pool: list[Move]) -> Move:
    # Captures first (best haul), keep the settebello in hand on ties.
    return min(
        pool,
        key=lambda m: (
            not m.captured,
            -captured_importance(m),
            m.played == SETTEBELLO,
            m.sort_key(),
        ),
    )


def _cg_decide(view: PlayerView, gs: GuessState) -> tuple[Move, str]:
    hand_sevens = [c for c in view.hand if c.rank == 7]
    has_settebello = SETTEBELLO in view.hand
    moves = legal_moves_for(view.hand, view.table)

    if len(hand_sevens) >= 3 and has_settebello:
        pool = [m for m in moves if m.played.rank == 7]
        return _best_seven_move(pool), "cg:three-sevens"

    pile_sevens = sum(
        1 for c in (view.piles[0] | view.piles[1]) if c.rank == 7
    )
    if len(hand_sevens) == 2 and has_settebello and pile_sevens == 2:
        if team_of(view.seat) == HAND_TEAM:
            target = SETTEBELLO
        else:
            target = next(c for c in hand_sevens if c != SETTEBELLO)
        pool = [m for m in moves if m.played == target]
        return _best_capture(pool) if pool[0].captured else pool[0], "cg:last-two-sevens"

    if len(hand_sevens) == 2 and not has_settebello:
        move, tag = _cs_decide(view, gs, avoid_placing_ranks=frozenset({7}))
        return move, tag + "+cg:delay-sevens"

    return _cs_decide(view, gs)


def cg_choose(view: PlayerView, gs: GuessState) -> Move:
    """Cicuti-Guardamagna: CS plus the dedicated seven-handling rules."""
    return _cg_decide(view, gs)[0]


# ---------------------------------------------------------------------------
# Baseline
# ---------------------------------------------------------------------------


def random_choose(view: PlayerView, rng: SplitMix64) -> Move:
    moves = legal_moves_for(view.hand, view.table)
    return moves[rng.below(len(moves))]
