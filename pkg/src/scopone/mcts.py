"""Monte Carlo tree search over full match states (the cheating player).

Selection uses UCT, expansion picks an untried move uniformly, rollouts
follow a pluggable simulation strategy, and the backpropagated reward
is a per-team vector of which selection reads the component of the team
acting at the parent node. The chosen move is the root child with the
most visits.

The search itself runs in the kernel backend (compiled when available);
`SearchNode` and the tree returned by ``collect_tree`` come from the
pure-Python twin, which is algorithm- and stream-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .engine import (
    MatchNotOverError,
    MatchState,
    Move,
    legal_moves,
    score_match,
    view_for,
)
from .guessing import GuessState
from .players import _greedy_capture_choice, greedy_choose
from .rng import SplitMix64, mix64
from . import kernels
from .kernels import pykernels
from .kernels.pykernels import (  # noqa: F401  (re-exported API)
    REW_CODES,
    SIM_CODES,
    SearchNode,
)

RewardVector = tuple[float, float]

REWARD_NAMES = ("rs", "sd", "wl", "pwl")
SIM_NAMES = ("rs", "crs", "gs", "egs")


@dataclass(frozen=True)
class SearchConfig:
    """Knobs shared by MCTS and ISMCTS players."""

    iterations: int = 1000
    uct_c: float = 2.0
    reward_fn: str = "sd"
    sim_strategy: str = "egs"
    epsilon: float = 0.3
    rng_seed: int = 0
    determinizator: str = "random"  # ismcts only: random | cgs

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.uct_c < 0:
            raise ValueError("uct_c must be >= 0")
        if self.reward_fn not in REWARD_NAMES:
            raise ValueError(f"unknown reward function: {self.reward_fn}")
        if self.sim_strategy not in SIM_NAMES:
            raise ValueError(f"unknown simulation strategy: {self.sim_strategy}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must be in [0, 1]")
        if self.determinizator not in ("random", "cgs"):
            raise ValueError(f"unknown determinizator: {self.determinizator}")

    def with_seed(self, seed: int) -> "SearchConfig":
        return replace(self, rng_seed=seed)


def reward(final_state: MatchState, fn: str) -> RewardVector:
    """Per-team reward vector of a finished match.

    rs: raw scores; sd: score differences (zero-sum); wl: +-1/0;
    pwl: 1/0 with 0.5 each on ties.
    """
    if not final_state.is_over:
        raise MatchNotOverError("reward needs a finished match")
    s0, s1 = score_match(final_state).totals
    return pykernels.reward_values(REW_CODES[fn], s0, s1)


def uct_value(child: SearchNode, parent_visits: int, c: float) -> float:
    """UCT of a visited child: Q/N + c*sqrt(2 ln N(parent) / N(child)).

    Q is the reward component of the team acting at the parent.
    Selection never scores unvisited children; expansion handles those.
    """
    team = child.parent.acting_seat & 1
    return pykernels.uct_value(child.q_for(team), child.n, parent_visits, c)


def simulate(state: MatchState, strategy: str, rng: SplitMix64,
             epsilon: float = 0.3) -> MatchState:
    """Engine-level reference rollout to a terminal state.

    Draws from the rng in exactly the order the kernel playout does, so
    trajectories are comparable across implementations: rs picks a
    uniform legal move; crs a uniform hand card with the greedy capture
    choice; gs is fully greedy; egs flips an epsilon coin per move.
    """
    code = SIM_CODES[strategy]
    while not state.is_over:
        seat = state.current_seat
        if code == pykernels.SIM_GS:
            move = greedy_choose(view_for(state, seat))
        elif code == pykernels.SIM_RS:
            moves = legal_moves(state)
            move = moves[rng.below(len(moves))]
        elif code == pykernels.SIM_EGS:
            if rng.unit() < epsilon:
                moves = legal_moves(state)
                move = moves[rng.below(len(moves))]
            else:
                move = greedy_choose(view_for(state, seat))
        else:  # crs
            hand = sorted(state.hands[seat])
            card = hand[rng.below(len(hand))]
            card_moves = [m for m in legal_moves(state) if m.played == card]
            if len(card_moves) == 1:
                move = card_moves[0]
            else:
                move = _greedy_capture_choice(
                    card_moves, state.table, state.turn_index
                )
        from .engine import apply_move

        state = apply_move(state, move)
    return state


def mcts_choose(state: MatchState, cfg: SearchConfig,
                collect_tree: bool = False):
    """Pick a move by UCT search over the full (cheating) state."""
    moves = legal_moves(state)
    if len(moves) == 1 and not collect_tree:
        return moves[0]
    kstate = kernels.state_to_kernel(state)
    rng = SplitMix64(cfg.rng_seed)
    result = kernels.impl.mcts_search(
        kstate,
        cfg.iterations,
        cfg.uct_c,
        REW_CODES[cfg.reward_fn],
        SIM_CODES[cfg.sim_strategy],
        cfg.epsilon,
        rng,
        collect_tree,
    )
    if collect_tree:
        card, cap, tree = result
        return kernels.pair_to_move(card, cap), tree
    card, cap = result
    return kernels.pair_to_move(card, cap)
