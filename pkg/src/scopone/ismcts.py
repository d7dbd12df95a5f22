"""Single-observer information-set MCTS (the fair search player).

One shared tree of information sets from the observer's point of view;
each iteration samples a determinization of the hidden hands and
restricts that pass to moves legal in it. Nodes carry an availability
count (how often their move was legal while the parent was visited) and
selection uses ISUCT, which reads it in the exploration term.

The determinization is either uniform over the information set
("random") or constrained by the card-guessing system ("cgs").
"""

from __future__ import annotations

from typing import Optional

from .cards import FULL_DECK
from .engine import InvalidStateError, MatchState, Move, PlayerView, legal_moves_for
from .guessing import GuessState, guess_for_view, plausible_hands
from .mcts import SearchConfig
from .players import greedy_choose  # noqa: F401  (re-export convenience)
from .rng import SplitMix64
from . import kernels
from .kernels import pykernels
from .kernels.pykernels import FULL, InfoSetNode  # noqa: F401


def isuct_value(child: InfoSetNode, c: float) -> float:
    """ISUCT of a visited child: Q/N + c*sqrt(ln N'(child) / N(child)).

    N' is the availability count. With N' == N this is UCT without the
    factor two in the exploration term.
    """
    team = child.parent.acting_seat & 1
    return pykernels.isuct_value(child.q_for(team), child.n, child.n_prime, c)


def determinize(view: PlayerView, kind: str, gs: Optional[GuessState],
                rng: SplitMix64) -> MatchState:
    """Sample one full state from the observer's information set.

    The observable projection always equals the view; hidden hands are
    a uniform feasible assignment ("random") or one drawn through the
    guessing system's constraints ("cgs").
    """
    if view.current_seat != view.seat:
        raise InvalidStateError("determinize expects the observer to move")
    sizes = {s: view.hand_sizes[s] for s in range(4) if s != view.seat}
    if kind == "cgs":
        if gs is None:
            raise ValueError("cgs determinization needs a GuessState")
        hidden = plausible_hands(gs, sizes, rng)
    elif kind == "random":
        unseen = sorted(view.unseen_cards())
        seats = sorted(sizes)
        masks = pykernels.determinize_hands(
            [c.id for c in unseen],
            seats,
            [sizes[s] for s in seats],
            [FULL] * len(seats),
            [0] * len(seats),
            rng,
        )
        hidden = {s: kernels.cards_of(m) for s, m in zip(seats, masks)}
    else:
        raise ValueError(f"unknown determinizator: {kind}")
    hands = tuple(
        view.hand if s == view.seat else frozenset(hidden[s]) for s in range(4)
    )
    return MatchState(
        hands=hands,
        table=view.table,
        piles=view.piles,
        scope=view.scope,
        current_seat=view.current_seat,
        last_capturer=view.last_capturer,
        history=view.history,
        turn_index=view.turn_index,
    )


def ismcts_choose(view: PlayerView, cfg: SearchConfig,
                  gs: Optional[GuessState] = None,
                  collect_tree: bool = False):
    """Pick a move for the observer by ISMCTS over its view.

    For the cgs determinizator the guess state is rebuilt from the
    view's history once per decision unless one is passed in.
    """
    moves = legal_moves_for(view.hand, view.table)
    if len(moves) == 1 and not collect_tree:
        return moves[0]
    cand_masks = [0, 0, 0, 0]
    cert_masks = [0, 0, 0, 0]
    if cfg.determinizator == "cgs":
        if gs is None:
            gs = guess_for_view(view)
        for s in range(4):
            if s != view.seat:
                cand_masks[s] = kernels.mask_of(gs.candidate_sets[s])
                cert_masks[s] = kernels.mask_of(gs.certain_sets[s])
    else:
        for s in range(4):
            if s != view.seat:
                cand_masks[s] = FULL
    rng = SplitMix64(cfg.rng_seed)
    result = kernels.impl.ismcts_search(
        view.seat,
        kernels.mask_of(view.hand),
        kernels.mask_of(view.table),
        (kernels.mask_of(view.piles[0]), kernels.mask_of(view.piles[1])),
        (len(view.scope[0]), len(view.scope[1])),
        -1 if view.last_capturer is None else view.last_capturer,
        view.turn_index,
        list(view.hand_sizes),
        cand_masks,
        cert_masks,
        cfg.iterations,
        cfg.uct_c,
        pykernels.REW_CODES[cfg.reward_fn],
        pykernels.SIM_CODES[cfg.sim_strategy],
        cfg.epsilon,
        rng,
        collect_tree,
    )
    if collect_tree:
        card, cap, tree = result
        return kernels.pair_to_move(card, cap), tree
    card, cap = result
    return kernels.pair_to_move(card, cap)
