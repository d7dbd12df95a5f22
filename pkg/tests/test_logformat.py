import pytest

from scopone.cards import deal
from scopone.engine import MatchState, apply_move, legal_moves, score_match
from scopone.logformat import (
    format_match,
    format_move,
    parse_match,
    parse_score_line,
    verify_log,
)
from scopone.rng import SplitMix64

from conftest import random_playout


def play_random_match(seed):
    state = random_playout(MatchState.from_deal(deal(seed)), SplitMix64(seed ^ 0x55))
    return state


@pytest.mark.parametrize("seed", range(10))
def test_log_roundtrip_with_seeded_deal(seed):
    state = play_random_match(seed)
    text = format_match(deal(seed), state, seed=seed)
    log = parse_match(text)
    assert log.deal == deal(seed)
    assert [h.move for h in state.history] == list(log.moves)
    assert log.score is not None
    assert log.score.totals == score_match(state).totals
    assert verify_log(text).totals == log.score.totals


def test_log_roundtrip_with_explicit_deal():
    state = play_random_match(77)
    text = format_match(deal(77), state)
    assert "seed=" not in text.splitlines()[0]
    log = parse_match(text)
    # card order within a hand is not part of the contract, the multiset is
    assert [frozenset(h) for h in log.deal.hands] == [frozenset(h) for h in deal(77).hands]
    assert frozenset(log.deal.table) == frozenset(deal(77).table)
    assert log.deal_seed is None


def test_move_record_shape():
    state = play_random_match(3)
    lines = format_match(deal(3), state, seed=3).splitlines()
    assert lines[0] == "deal seed=3 dealer=3"
    assert len(lines) == 38  # deal + 36 moves + score
    assert lines[-1].startswith("score hand=")
    for line in lines[1:-1]:
        toks = line.split()
        assert toks[0] in "0123"
        assert len(toks) >= 2


def test_scopa_flag_matches_engine_count():
    state = play_random_match(11)
    lines = format_match(deal(11), state, seed=11).splitlines()
    flagged = sum(1 for ln in lines if ln.endswith(" scopa"))
    assert flagged == len(state.scope[0]) + len(state.scope[1])


def test_verify_log_rejects_tampered_score():
    state = play_random_match(5)
    text = format_match(deal(5), state, seed=5)
    hand, deckpts = parse_score_line([l for l in text.splitlines() if l.startswith("score")][0])
    bad = text.replace(f"score hand={hand}", f"score hand={hand + 1}")
    with pytest.raises(ValueError):
        verify_log(bad)
