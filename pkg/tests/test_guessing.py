import itertools
from collections import Counter

import pytest

from scopone.cards import Card, FULL_DECK, Suit, deal, parse_card
from scopone.engine import (
    MatchState,
    Move,
    apply_move,
    legal_moves,
    view_for,
)
from scopone.guessing import (
    GuessState,
    guess_for_view,
    init_guess,
    observe_move,
    plausible_hands,
)
from scopone.rng import SplitMix64

from conftest import random_midgame_state


def C(code):
    return parse_card(code)


def CS(*codes):
    return frozenset(parse_card(c) for c in codes)


def check_invariants(gs: GuessState):
    for s in gs.hidden_seats():
        assert gs.certain_sets[s] <= gs.candidate_sets[s] <= gs.unseen_pool
        assert len(gs.certain_sets[s]) <= gs.hand_sizes[s] <= len(gs.candidate_sets[s])
    assert gs.candidate_sets[gs.observer] == frozenset()


def test_init_fresh_deal_candidate_counts():
    state = MatchState.from_deal(deal(0))
    gs = init_guess(view_for(state, 0))
    assert len(gs.unseen_pool) == 27
    for s in (1, 2, 3):
        assert len(gs.candidate_sets[s]) == 27
        assert gs.certain_sets[s] == frozenset()
    check_invariants(gs)


def test_init_midgame_excludes_visible_cards():
    state = random_midgame_state(9, stop_after=17)
    for seat in range(4):
        gs = init_guess(view_for(state, seat))
        visible = state.hands[seat] | state.table | state.piles[0] | state.piles[1]
        for s in gs.hidden_seats():
            assert not (gs.candidate_sets[s] & visible)
        check_invariants(gs)


def test_played_card_removed_from_all_candidates():
    state = MatchState.from_deal(deal(4))
    gs = init_guess(view_for(state, 0))
    # observe whatever seat 0..3 plays for a few turns
    for _ in range(8):
        move = legal_moves(state)[0]
        seat, table_before = state.current_seat, state.table
        state = apply_move(state, move)
        gs = observe_move(gs, seat, table_before, move)
        for s in gs.hidden_seats():
            assert move.played not in gs.candidate_sets[s]
        check_invariants(gs)


def make_gs(observer, unseen, sizes):
    from scopone.guessing import _NO_REMOVALS, _derive

    cand, certain, dropped = _derive(observer, frozenset(unseen), tuple(sizes), _NO_REMOVALS)
    return GuessState(
        observer=observer,
        unseen_pool=frozenset(unseen),
        hand_sizes=tuple(sizes),
        candidate_sets=cand,
        certain_sets=certain,
        removals=_NO_REMOVALS,
        dropped_classes=dropped,
    )


def test_sweep_declined_inference():
    # Table sums to 7; the mover places a card without capturing, so all
    # unseen 7s leave the mover's candidate set.
    unseen = FULL_DECK - CS("3d", "4s", "2c") - {Card(r, Suit.CUPS) for r in range(1, 10)}
    gs = make_gs(0, unseen, (9, 9, 9, 9))
    table_before = CS("3d", "4s")
    move = Move(C("2c"), frozenset())
    gs2 = observe_move(gs, 1, table_before, move)
    sevens_unseen = {c for c in gs2.unseen_pool if c.rank == 7}
    assert sevens_unseen
    assert not (gs2.candidate_sets[1] & sevens_unseen)
    # other seats are unaffected by the mover-specific inference
    assert sevens_unseen <= gs2.candidate_sets[2]


def test_placement_inference_spares_duplicates_of_played_rank():
    # Mover places a 4 on a table containing a 4: impossible (forced
    # capture), so use a clean table. Placement removes capture-capable
    # cards except other 4s (double-card convention).
    table_before = CS("Kd", "Kh")  # rank 10: capturable only by kings
    unseen = FULL_DECK - table_before - CS("4c")
    gs = make_gs(0, unseen, (9, 9, 9, 9))
    move = Move(C("4c"), frozenset())
    gs2 = observe_move(gs, 3, table_before, move)
    kings_unseen = {c for c in gs2.unseen_pool if c.rank == 10}
    assert kings_unseen
    assert not (gs2.candidate_sets[3] & kings_unseen)
    fours_unseen = {c for c in gs2.unseen_pool if c.rank == 4}
    assert fours_unseen <= gs2.candidate_sets[3]


def test_coin_preference_inference():
    # 5c captures 5s while 5d is unseen: the mover would have used the
    # coin five, so drop it from their candidates.
    table_before = CS("5s")
    unseen = FULL_DECK - table_before - CS("5c")
    gs = make_gs(0, unseen, (9, 9, 9, 9))
    move = Move(C("5c"), CS("5s"))
    gs2 = observe_move(gs, 2, table_before, move)
    assert C("5d") not in gs2.candidate_sets[2]
    assert C("5d") in gs2.candidate_sets[1]


def test_no_coin_inference_when_playing_coin_or_multicapture():
    table_before = CS("5s")
    unseen = FULL_DECK - table_before - CS("5d")
    gs = make_gs(0, unseen, (9, 9, 9, 9))
    gs2 = observe_move(gs, 2, table_before, Move(C("5d"), CS("5s")))
    assert C("5c") in gs2.candidate_sets[2]


def test_seven_play_suppresses_placement_inference():
    # Playing a seven follows the seven conventions, so placement while
    # holding a capture-capable card must not be inferred.
    table_before = CS("Kd", "Kh")
    unseen = FULL_DECK - table_before - CS("7c")
    gs = make_gs(0, unseen, (9, 9, 9, 9))
    gs2 = observe_move(gs, 1, table_before, Move(C("7c"), frozenset()))
    kings_unseen = {c for c in gs2.unseen_pool if c.rank == 10}
    assert kings_unseen <= gs2.candidate_sets[1]


def test_observe_is_monotone_outside_repair():
    state = MatchState.from_deal(deal(21))
    gs = init_guess(view_for(state, 2))
    rng = SplitMix64(5)
    while not state.is_over:
        moves = legal_moves(state)
        move = moves[rng.below(len(moves))]
        seat, table_before = state.current_seat, state.table
        state = apply_move(state, move)
        prev = gs
        gs = observe_move(gs, seat, table_before, move)
        check_invariants(gs)
        if gs.dropped_classes == prev.dropped_classes:
            for s in gs.hidden_seats():
                assert gs.candidate_sets[s] <= prev.candidate_sets[s]


def test_guess_for_view_matches_incremental_tracking():
    state = MatchState.from_deal(deal(31))
    gs = init_guess(view_for(state, 1))
    rng = SplitMix64(77)
    for _ in range(20):
        moves = legal_moves(state)
        move = moves[rng.below(len(moves))]
        seat, table_before = state.current_seat, state.table
        state = apply_move(state, move)
        gs = observe_move(gs, seat, table_before, move)
    rebuilt = guess_for_view(view_for(state, 1))
    assert rebuilt.candidate_sets == gs.candidate_sets
    assert rebuilt.certain_sets == gs.certain_sets
    assert rebuilt.unseen_pool == gs.unseen_pool


# ---------------------------------------------------------------------------
# plausible_hands
# ---------------------------------------------------------------------------


def test_plausible_hands_unconstrained_partition():
    gs = make_gs(0, FULL_DECK - {Card(r, Suit.COINS) for r in range(1, 11)} - CS("2s", "3s", "4s"), (9, 9, 9, 9))
    sizes = {1: 9, 2: 9, 3: 9}
    rng = SplitMix64(3)
    hands = plausible_hands(gs, sizes, rng)
    assert sorted(hands) == [1, 2, 3]
    union = frozenset().union(*hands.values())
    assert union == gs.unseen_pool
    assert all(len(hands[s]) == sizes[s] for s in sizes)


def test_plausible_hands_respects_forced_seat():
    # Seat 1's candidates shrink to exactly its hand size: the sample
    # must always hand it exactly that set.
    unseen = CS("7d", "7s", "2c", "3c", "4c", "5c")
    gs = make_gs(
        0, unseen, (0, 2, 2, 2)
    )
    # carve candidates by hand: seat 1 may only hold 7d,7s
    cand = list(gs.candidate_sets)
    cand[1] = CS("7d", "7s")
    from scopone.guessing import _derive

    gs = GuessState(
        observer=0,
        unseen_pool=unseen,
        hand_sizes=(0, 2, 2, 2),
        candidate_sets=tuple(cand),
        certain_sets=(frozenset(), CS("7d", "7s"), frozenset(), frozenset()),
        removals=gs.removals,
        dropped_classes=gs.dropped_classes,
    )
    rng = SplitMix64(9)
    for _ in range(50):
        hands = plausible_hands(gs, {1: 2, 2: 2, 3: 2}, rng)
        assert hands[1] == CS("7d", "7s")


def test_plausible_hands_requires_consistent_sizes():
    gs = make_gs(0, CS("2c", "3c"), (0, 1, 1, 0))
    with pytest.raises(ValueError):
        plausible_hands(gs, {1: 2, 2: 2, 3: 2}, SplitMix64(1))


def test_plausible_hands_uniform_over_feasible_set():
    # Six unseen cards, three hidden seats with two each; seat 1 cannot
    # hold sevens. Compare empirical frequencies against the exhaustive
    # enumeration of feasible assignments.
    unseen = sorted(CS("7d", "7s", "2c", "3c", "4c", "5c"))
    sizes = {1: 2, 2: 2, 3: 2}
    base = make_gs(0, frozenset(unseen), (0, 2, 2, 2))
    cand = list(base.candidate_sets)
    cand[1] = frozenset(c for c in unseen if c.rank != 7)
    gs = GuessState(
        observer=0,
        unseen_pool=frozenset(unseen),
        hand_sizes=(0, 2, 2, 2),
        candidate_sets=tuple(cand),
        certain_sets=base.certain_sets,
        removals=base.removals,
        dropped_classes=base.dropped_classes,
    )

    feasible = []
    for h1 in itertools.combinations(unseen, 2):
        if any(c.rank == 7 for c in h1):
            continue
        remaining = [c for c in unseen if c not in h1]
        for h2 in itertools.combinations(remaining, 2):
            h3 = tuple(c for c in remaining if c not in h2)
            feasible.append((frozenset(h1), frozenset(h2), frozenset(h3)))
    expected = Counter()
    for h1, h2, h3 in feasible:
        for card in h1:
            expected[(1, card)] += 1
        for card in h2:
            expected[(2, card)] += 1
        for card in h3:
            expected[(3, card)] += 1

    rng = SplitMix64(123)
    n = 20000
    observed = Counter()
    for _ in range(n):
        hands = plausible_hands(gs, sizes, rng)
        for s, cards in hands.items():
            for card in cards:
                observed[(s, card)] += 1

    for key, count in expected.items():
        want = count / len(feasible)
        got = observed[key] / n
        assert abs(got - want) < 0.02, (key, got, want)
    # infeasible placements never sampled
    for card in unseen:
        if card.rank == 7:
            assert observed[(1, card)] == 0


def test_plausible_hands_fallback_on_infeasible_constraints(caplog):
    # Candidate sets that admit no assignment: all hidden seats restricted
    # to the same single card. Falls back to size-only sampling.
    unseen = CS("2c", "3c", "4c")
    base = make_gs(0, unseen, (0, 1, 1, 1))
    cand = [frozenset(), CS("2c"), CS("2c"), CS("2c")]
    gs = GuessState(
        observer=0,
        unseen_pool=unseen,
        hand_sizes=(0, 1, 1, 1),
        candidate_sets=tuple(cand),
        certain_sets=(frozenset(),) * 4,
        removals=base.removals,
        dropped_classes=base.dropped_classes,
    )
    hands = plausible_hands(gs, {1: 1, 2: 1, 3: 1}, SplitMix64(4))
    assert frozenset().union(*hands.values()) == unseen


def test_repair_ladder_restores_consistency():
    # Construct conflicting inferences: feed moves that would strip a
    # seat below its hand size and check the state survives with the
    # invariants intact (weakest classes dropped first).
    state = MatchState.from_deal(deal(8))
    gs = init_guess(view_for(state, 0))
    rng = SplitMix64(6)
    while not state.is_over:
        moves = legal_moves(state)
        move = moves[rng.below(len(moves))]
        seat, table_before = state.current_seat, state.table
        state = apply_move(state, move)
        gs = observe_move(gs, seat, table_before, move)
        check_invariants(gs)
