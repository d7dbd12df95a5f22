import math

import pytest

from scopone.cards import deal
from scopone.engine import (
    MatchNotOverError,
    MatchState,
    Move,
    apply_move,
    legal_moves,
    score_match,
)
from scopone.kernels import pykernels as pk
from scopone.kernels import state_to_kernel
from scopone.mcts import (
    SearchConfig,
    SearchNode,
    mcts_choose,
    reward,
    simulate,
    uct_value,
)
from scopone.rng import SplitMix64, mix64

from conftest import minimax_score_diff, random_midgame_state, random_playout


def cfg(**kw):
    base = dict(iterations=200, uct_c=2.0, reward_fn="sd",
                sim_strategy="egs", epsilon=0.3, rng_seed=7)
    base.update(kw)
    return SearchConfig(**base)


# ---------------------------------------------------------------------------
# uct_value
# ---------------------------------------------------------------------------


def make_child(q0, q1, n, parent_seat=0, parent_n=10):
    parent = SearchNode(None, None, parent_seat, [])
    parent.n = parent_n
    child = SearchNode((0, 0), parent, (parent_seat + 1) % 4, [])
    child.n = n
    child.q0 = q0
    child.q1 = q1
    parent.children.append(child)
    return child


def test_uct_exploitation_only_at_zero_c():
    child = make_child(q0=3.0, q1=-3.0, n=2, parent_seat=0)
    assert uct_value(child, parent_visits=2, c=0.0) == pytest.approx(1.5)


def test_uct_closed_form_exploration():
    child = make_child(q0=0.0, q1=0.0, n=1, parent_seat=0)
    parent_n = int(round(math.e ** 2))
    # Q=0, N=1, parent N=e^2, c=1 -> sqrt(2*2/1) = 2
    value = uct_value(child, parent_visits=parent_n, c=1.0)
    assert value == pytest.approx(math.sqrt(2.0 * math.log(parent_n)), abs=1e-9)
    child_exact = make_child(q0=0.0, q1=0.0, n=1, parent_seat=0)
    assert pk.uct_value(0.0, 1, parent_n, 1.0) == value


def test_uct_uses_acting_team_component():
    # Same child stats, different parent seat: team 1 reads q1.
    child = make_child(q0=4.0, q1=-4.0, n=2, parent_seat=1)
    assert uct_value(child, parent_visits=4, c=0.0) == pytest.approx(-2.0)


def test_uct_argmax_matches_independent_evaluator():
    rng = SplitMix64(11)
    for _ in range(200):
        parent = SearchNode(None, None, rng.below(4), [])
        parent.n = 1
        children = []
        for _ in range(2 + rng.below(6)):
            child = SearchNode((0, 0), parent, 0, [])
            child.n = 1 + rng.below(50)
            child.q0 = rng.unit() * 20 - 10
            child.q1 = -child.q0
            parent.n += child.n
            parent.children.append(child)
            children.append(child)
        c = rng.unit() * 3
        # independent implementation of the selection formula
        team = parent.acting_seat & 1
        def independent(ch):
            mean = (ch.q0 if team == 0 else ch.q1) / ch.n
            return mean + c * math.sqrt(2 * math.log(parent.n) / ch.n)
        best_direct = max(children, key=independent)
        best_api = max(children, key=lambda ch: uct_value(ch, parent.n, c))
        assert best_direct is best_api


def test_uct_argmax_invariant_under_joint_scaling():
    rng = SplitMix64(13)
    for _ in range(100):
        parent = SearchNode(None, None, 0, [])
        parent.n = 1
        children = []
        for _ in range(4):
            ch = SearchNode((0, 0), parent, 1, [])
            ch.n = 1 + rng.below(30)
            ch.q0 = rng.unit() * 8 - 4
            ch.q1 = -ch.q0
            parent.n += ch.n
            parent.children.append(ch)
            children.append(ch)
        c = 0.5 + rng.unit()
        k = 3.7
        base = max(range(4), key=lambda i: uct_value(children[i], parent.n, c))
        for ch in children:
            ch.q0 *= k
            ch.q1 *= k
        scaled = max(range(4), key=lambda i: uct_value(children[i], parent.n, c * k))
        assert base == scaled


# ---------------------------------------------------------------------------
# reward
# ---------------------------------------------------------------------------


def finished(totals):
    # fabricate a terminal state with the desired totals via monkeypatch-free
    # construction: play a real random game and stop when totals match is
    # impractical; instead check reward() through score_match on real games
    # and check the vector math through pykernels directly.
    raise NotImplementedError


def test_reward_vectors_follow_scores():
    assert pk.reward_values(pk.REW_SD, 4, 1) == (3.0, -3.0)
    assert pk.reward_values(pk.REW_PWL, 2, 2) == (0.5, 0.5)
    assert pk.reward_values(pk.REW_WL, 0, 11) == (-1.0, 1.0)
    assert pk.reward_values(pk.REW_RS, 4, 1) == (4.0, 1.0)
    assert pk.reward_values(pk.REW_WL, 3, 3) == (0.0, 0.0)
    assert pk.reward_values(pk.REW_PWL, 5, 2) == (1.0, 0.0)


def test_reward_on_real_match_and_errors():
    state = random_playout(MatchState.from_deal(deal(5)), SplitMix64(1))
    s0, s1 = score_match(state).totals
    assert reward(state, "sd") == (float(s0 - s1), float(s1 - s0))
    assert reward(state, "rs") == (float(s0), float(s1))
    with pytest.raises(MatchNotOverError):
        reward(MatchState.from_deal(deal(5)), "sd")


def test_reward_sum_invariants_over_random_matches():
    for seed in range(20):
        state = random_playout(MatchState.from_deal(deal(seed)), SplitMix64(seed))
        sd = reward(state, "sd")
        wl = reward(state, "wl")
        pwl = reward(state, "pwl")
        rs = reward(state, "rs")
        assert sd[0] + sd[1] == 0
        assert wl[0] + wl[1] == 0 and all(v in (-1.0, 0.0, 1.0) for v in wl)
        assert pwl[0] + pwl[1] == 1 and all(v in (0.0, 0.5, 1.0) for v in pwl)
        assert rs[0] >= 0 and rs[1] >= 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def test_egs_zero_equals_gs_trajectory():
    state = random_midgame_state(4, stop_after=6)
    a = simulate(state, "egs", SplitMix64(100), epsilon=0.0)
    b = simulate(state, "gs", SplitMix64(100))
    assert a == b


def test_egs_one_matches_rs_distribution():
    # First-move frequencies of EGS(1.0) and RS agree (chi-square).
    from scipy.stats import chi2_contingency

    state = random_midgame_state(8, stop_after=5)
    kstate0 = state_to_kernel(state)
    n = 10000
    counts = {}
    for label, strat, eps in (("rs", pk.SIM_RS, 0.0), ("egs", pk.SIM_EGS, 1.0)):
        rng = SplitMix64(1234)
        for i in range(n):
            ks = list(kstate0)
            rec = []
            pk.playout(ks, strat, eps, rng, rec)
            key = rec[0]
            counts.setdefault(key, [0, 0])[0 if label == "rs" else 1] += 1
    table = [[v[0] for v in counts.values()], [v[1] for v in counts.values()]]
    _, p, _, _ = chi2_contingency(table)
    assert p > 0.01


def test_crs_single_option_card_taken():
    # When the drawn card has exactly one capture option, CRS plays it.
    state = random_midgame_state(12, stop_after=8)
    kstate = state_to_kernel(state)
    rng = SplitMix64(5)
    seat = kstate[pk.SEAT]
    hand_cards = pk.bits(kstate[pk.H0 + seat])
    # exercise the kernel picker directly across many draws
    for _ in range(50):
        card, cap = pk._crs_pick(kstate, rng)
        options = pk.capture_options(card, kstate[pk.TABLE])
        if len(options) == 1:
            assert cap == options[0]
        elif not options:
            assert cap == 0


def test_simulate_terminal_state_properties():
    state = random_midgame_state(3, stop_after=10)
    final = simulate(state, "crs", SplitMix64(77))
    assert final.is_over
    assert score_match(final)


# ---------------------------------------------------------------------------
# mcts_choose
# ---------------------------------------------------------------------------


def endgame_state(seed, cards_left=3):
    state = MatchState.from_deal(deal(seed))
    rng = SplitMix64(mix64(seed, 77))
    while state.turn_index < 36 - cards_left:
        moves = legal_moves(state)
        state = apply_move(state, moves[rng.below(len(moves))])
    return state


def test_single_legal_move_short_circuits():
    state = endgame_state(2, cards_left=1)
    moves = legal_moves(state)
    assert len(moves) >= 1
    if len(moves) == 1:
        assert mcts_choose(state, cfg()) == moves[0]
    # force a single-move situation regardless of the sampled endgame
    for seed in range(40):
        state = endgame_state(seed, cards_left=1)
        if len(legal_moves(state)) == 1:
            assert mcts_choose(state, cfg(iterations=1)) == legal_moves(state)[0]
            break
    else:
        pytest.skip("no single-move endgame sampled")


def test_one_iteration_returns_the_expanded_move():
    state = endgame_state(6, cards_left=4)
    move, tree = mcts_choose(state, cfg(iterations=1), collect_tree=True)
    assert len(tree.children) == 1
    assert tree.children[0].move == (move.played.id,
                                     sum(1 << c.id for c in move.captured))


def test_seeded_determinism():
    state = random_midgame_state(9, stop_after=20)
    a = mcts_choose(state, cfg(rng_seed=42))
    b = mcts_choose(state, cfg(rng_seed=42))
    c2 = mcts_choose(state, cfg(rng_seed=43))
    assert a == b
    assert isinstance(c2, Move)


def test_tree_consistency_invariants():
    state = random_midgame_state(14, stop_after=24)
    iters = 300
    _, root = mcts_choose(state, cfg(iterations=iters), collect_tree=True)

    def walk(node):
        yield node
        for ch in node.children:
            yield from walk(ch)

    assert root.n == iters
    for node in walk(root):
        child_sum = sum(ch.n for ch in node.children)
        assert child_sum <= node.n
        # every visit beyond the children's is a terminal pass or this
        # node's own expansion visit
        assert node.n - child_sum >= 0
        if node is not root:
            assert node.parent is not None
    # SD rewards: components sum to zero at every node
    for node in walk(root):
        assert node.q0 + node.q1 == pytest.approx(0.0, abs=1e-9)


def test_endgame_optimality_against_minimax():
    # Sampled few-card endgames with a uniquely optimal move (values are
    # integers, so unique means a full point of margin): the search must
    # find it nearly always. The full criterion runs in acceptance.
    found = checked = 0
    seed = 0
    while checked < 12 and seed < 200:
        seed += 1
        state = endgame_state(seed, cards_left=5)
        if state.is_over or len(legal_moves(state)) < 2:
            continue
        value, best_moves = minimax_score_diff(state)
        if len(best_moves) != 1:
            continue
        checked += 1
        hits = sum(
            1
            for k in range(10)
            if mcts_choose(state, cfg(iterations=200, rng_seed=k)) == best_moves[0]
        )
        found += hits
    assert checked == 12
    assert found / (checked * 10) >= 0.95
