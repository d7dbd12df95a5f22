import itertools

import pytest

from scopone.cards import CARDS, Card, FULL_DECK, Suit, primiera_value
from scopone.engine import (
    MatchState,
    Move,
    apply_move,
    legal_moves,
)
from scopone.rng import SplitMix64, mix64


# ---------------------------------------------------------------------------
# Independent oracles. These deliberately re-derive the rules from the
# rulebook text with no shared code paths, so the engine is checked
# against a second opinion rather than against itself.
# ---------------------------------------------------------------------------


def brute_force_moves(hand, table):
    """Exhaustive (card x table-subset) legal move generator.

    Tries every subset of the table for every hand card and keeps the
    ones the rules admit: same-rank single captures when a same-rank
    card is present, otherwise rank-sum captures, otherwise placement.
    """
    table = sorted(table)
    moves = []
    for card in sorted(hand):
        same_rank_present = any(t.rank == card.rank for t in table)
        captures = []
        for size in range(1, len(table) + 1):
            for combo in itertools.combinations(table, size):
                if same_rank_present:
                    ok = size == 1 and combo[0].rank == card.rank
                else:
                    ok = sum(c.rank for c in combo) == card.rank
                if ok:
                    captures.append(frozenset(combo))
        if captures:
            moves.extend(Move(card, c) for c in captures)
        else:
            moves.append(Move(card, frozenset()))
    return moves


def independent_score(pile0, pile1, scope0, scope1):
    """Recompute match totals from raw piles, independently of engine.score_match."""
    points = [scope0, scope1]
    piles = (pile0, pile1)
    if len(pile0) != len(pile1):
        points[0 if len(pile0) > len(pile1) else 1] += 1
    coins = [sum(1 for c in p if c.suit == Suit.COINS) for p in piles]
    if coins[0] != coins[1]:
        points[0 if coins[0] > coins[1] else 1] += 1
    for t in (0, 1):
        if any(c.rank == 7 and c.suit == Suit.COINS for c in piles[t]):
            points[t] += 1
    prims = []
    complete = []
    for p in piles:
        by_suit = {}
        for c in p:
            by_suit.setdefault(c.suit, []).append(primiera_value(c))
        prims.append(sum(max(v) for v in by_suit.values()))
        complete.append(len(by_suit) == 4)
    if complete[0] and complete[1]:
        if prims[0] != prims[1]:
            points[0 if prims[0] > prims[1] else 1] += 1
    elif complete[0]:
        points[0] += 1
    elif complete[1]:
        points[1] += 1
    return tuple(points)


def random_playout(state: MatchState, rng: SplitMix64) -> MatchState:
    while not state.is_over:
        moves = legal_moves(state)
        state = apply_move(state, moves[rng.below(len(moves))])
    return state


def random_midgame_state(seed: int, stop_after: int | None = None) -> MatchState:
    """A reachable state sampled by random play from a random deal."""
    from scopone.cards import deal

    rng = SplitMix64(mix64(seed, 0xABCD))
    state = MatchState.from_deal(deal(seed))
    if stop_after is None:
        stop_after = rng.below(36)
    for _ in range(stop_after):
        if state.is_over:
            break
        moves = legal_moves(state)
        state = apply_move(state, moves[rng.below(len(moves))])
    return state


def minimax_score_diff(state: MatchState):
    """Exhaustive game-tree value of a near-terminal state.

    Returns (value, optimal_moves) where value is team 0's final score
    minus team 1's under optimal play by both sides and optimal_moves
    are the acting seat's moves achieving it. Only tractable for a
    handful of remaining cards.
    """
    from scopone.engine import score_match

    if state.is_over:
        s = score_match(state).totals
        return s[0] - s[1], []
    team = state.current_seat & 1
    best_value = None
    best_moves = []
    for move in legal_moves(state):
        value, _ = minimax_score_diff(apply_move(state, move))
        keyed = value if team == 0 else -value
        best_keyed = None if best_value is None else (
            best_value if team == 0 else -best_value
        )
        if best_value is None or keyed > best_keyed:
            best_value = value
            best_moves = [move]
        elif value == best_value:
            best_moves.append(move)
    return best_value, best_moves


@pytest.fixture
def rng():
    return SplitMix64(20240817)
