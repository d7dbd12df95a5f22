"""Kernel backend selection and mask conversions.

The hot rules core exists twice: ``ckernels`` (Cython) and
``pykernels`` (pure Python). The compiled one is used when importable
unless ``SCOPONE_PURE=1`` forces the fallback. Both consume the same
SplitMix64 stream and agree move-for-move, which the test suite checks
directly; ``benchmarks/bench_kernels.py`` compares their speed.
"""

from __future__ import annotations

import os

from ..cards import Card
from ..engine import MatchState, Move
from . import pykernels

if os.environ.get("SCOPONE_PURE") == "1":
    impl = pykernels
    BACKEND = "python"
else:
    try:
        from . import ckernels as impl  # type: ignore[no-redef]

        BACKEND = "c"
    except ImportError:
        impl = pykernels
        BACKEND = "python"


def mask_of(cards) -> int:
    mask = 0
    for card in cards:
        mask |= 1 << card.id
    return mask


def cards_of(mask: int) -> frozenset[Card]:
    return frozenset(Card.from_id(b) for b in pykernels.bits(mask))


def move_to_pair(move: Move) -> tuple[int, int]:
    return move.played.id, mask_of(move.captured)


def pair_to_move(card: int, cap: int) -> Move:
    return Move(Card.from_id(card), cards_of(cap))


def state_to_kernel(state: MatchState) -> list:
    return pykernels.state_from(
        [mask_of(h) for h in state.hands],
        mask_of(state.table),
        (mask_of(state.piles[0]), mask_of(state.piles[1])),
        (len(state.scope[0]), len(state.scope[1])),
        state.current_seat,
        -1 if state.last_capturer is None else state.last_capturer,
        state.turn_index,
    )
