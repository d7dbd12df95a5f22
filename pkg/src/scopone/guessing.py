"""Card guessing: per-opponent estimates of who may hold which unseen card.

The tracker watches every move from one seat's point of view and
maintains, for each other seat, the set of unseen cards that seat may
still hold (``candidates``) and the cards it provably holds
(``certain``). Three negative-inference classes are applied, from
strongest to weakest:

  (a) sweep declined: the table summed to a capturable rank and the
      mover did not sweep it, so the mover lacks cards of that rank;
  (b) placement: a conventional player captures whenever it can, so a
      player who placed holds no card able to capture that table --
      except cards of the placed card's own rank (placing a "double
      card" is itself the convention, so duplicates are never inferable);
  (c) coin preference: capturing rank r with a non-coin card implies
      the mover lacks the coin card of rank r.

Classes (a) and (b) are suppressed when the move plays or captures a
seven: the dedicated seven conventions legitimately override both the
scopa and the always-capture conventions, and without the suppression
the tracker would contradict perfectly conventional play. When an
update leaves a seat with fewer candidates than cards in hand, repair
drops class (c), then (a), then (b) until the sets are consistent
again.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .cards import Card, Suit
from .engine import Move, PlayerView
from .rng import SplitMix64

logger = logging.getLogger(__name__)


def _achievable_rank_sums(cards) -> set[int]:
    bits = 1
    for card in cards:
        bits |= bits << card.rank
        bits &= (1 << 11) - 1
    return {s for s in range(1, 11) if bits >> s & 1}


CLASS_A, CLASS_B, CLASS_C = 0, 1, 2
_DROP_LADDER = (
    frozenset(),
    frozenset("c"),
    frozenset("ca"),
    frozenset("cab"),
)

Removals = tuple[tuple[frozenset[Card], frozenset[Card], frozenset[Card]], ...]

_EMPTY: frozenset[Card] = frozenset()
_NO_REMOVALS: Removals = ((_EMPTY,) * 3,) * 4


@dataclass(frozen=True, slots=True)
class GuessState:
    """Immutable snapshot of the guessing system's knowledge."""

    observer: int
    unseen_pool: frozenset[Card]
    hand_sizes: tuple[int, int, int, int]
    candidate_sets: tuple[frozenset[Card], ...]
    certain_sets: tuple[frozenset[Card], ...]
    removals: Removals
    dropped_classes: frozenset[str]

    def hidden_seats(self) -> tuple[int, ...]:
        return tuple(s for s in range(4) if s != self.observer)


def _derive(observer, unseen, sizes, removals, min_drop=frozenset()):
    """Compute candidate/certain sets, escalating dropped classes until
    every hidden seat keeps at least hand-size candidates."""
    for dropped in _DROP_LADDER:
        if not (min_drop <= dropped):
            continue
        enabled = [cls for cls, letter in ((CLASS_A, "a"), (CLASS_B, "b"), (CLASS_C, "c"))
                   if letter not in dropped]
        hidden = [s for s in range(4) if s != observer]
        cand = []
        for s in range(4):
            if s == observer or sizes[s] == 0:
                cand.append(set())
                continue
            removed = set()
            for cls in enabled:
                removed |= removals[s][cls]
            cand.append(set(unseen) - removed)
        certain = [set() for _ in range(4)]

        # Fixpoint with monotone directions (candidates only shrink,
        # certains only grow) so it must terminate; any contradiction
        # escalates to the next rung of the drop ladder.
        consistent = True
        changed = True
        while changed and consistent:
            changed = False
            for s in hidden:
                if len(cand[s]) == sizes[s] and not certain[s] >= cand[s]:
                    certain[s] |= cand[s]
                    changed = True
            for card in unseen:
                owners = [s for s in hidden if card in cand[s]]
                if not owners:
                    consistent = False
                    break
                if len(owners) == 1 and card not in certain[owners[0]]:
                    certain[owners[0]].add(card)
                    changed = True
            if not consistent:
                break
            for s in hidden:
                if not certain[s] <= cand[s] or len(certain[s]) > sizes[s]:
                    consistent = False
                    break
                if len(certain[s]) == sizes[s] and cand[s] != certain[s]:
                    cand[s] = set(certain[s])
                    changed = True
                for t in hidden:
                    if t != s and certain[s] & cand[t]:
                        cand[t] -= certain[s]
                        changed = True
        ok = consistent and all(
            len(certain[s]) <= sizes[s] <= len(cand[s])
            and certain[s] <= cand[s]
            for s in hidden
        ) and all(
            any(card in cand[s] for s in hidden) for card in unseen
        )
        if ok:
            return (
                tuple(frozenset(c) for c in cand),
                tuple(frozenset(c) for c in certain),
                dropped,
            )
    raise AssertionError("unreachable: dropping every class is always consistent")


def init_guess(view: PlayerView) -> GuessState:
    """Start tracking from a view: every unseen card is a candidate for
    every other seat, nothing is certain yet."""
    unseen = view.unseen_cards()
    sizes = tuple(view.hand_sizes)
    cand, certain, dropped = _derive(view.seat, unseen, sizes, _NO_REMOVALS)
    return GuessState(
        observer=view.seat,
        unseen_pool=unseen,
        hand_sizes=sizes,
        candidate_sets=cand,
        certain_sets=certain,
        removals=_NO_REMOVALS,
        dropped_classes=dropped,
    )


def observe_move(gs: GuessState, seat: int, table_before: frozenset[Card],
                 move: Move, classes: str = "abc") -> GuessState:
    """Fold one observed move into the guess state.

    The played card leaves the unseen pool; negative inferences apply
    to the mover only. Candidate sets never grow (monotone), except
    through the consistency repair ladder. `classes` selects which
    inference classes run (soundness experiments disable the heuristic
    coin class by passing "ab").
    """
    turn = 36 - sum(gs.hand_sizes)
    sizes = list(gs.hand_sizes)
    removals = [list(per_seat) for per_seat in gs.removals]
    unseen = gs.unseen_pool

    if seat == gs.observer:
        new_unseen = unseen
    else:
        new_unseen = unseen - {move.played}
        sevens_involved = move.played.rank == 7 or any(
            c.rank == 7 for c in move.captured
        )
        table_sum = sum(c.rank for c in table_before)
        swept = bool(move.captured) and move.captured == table_before
        # Sweeping on the very last turn scores no scopa, so declining
        # one there proves nothing.
        last_turn = turn >= 35

        if (
            "a" in classes
            and 0 < table_sum <= 10
            and not swept
            and not sevens_involved
            and not last_turn
        ):
            removals[seat][CLASS_A] = removals[seat][CLASS_A] | frozenset(
                c for c in new_unseen if c.rank == table_sum
            )
        if "b" in classes and not move.captured and move.played.rank != 7:
            # A rank can capture iff some table subset sums to it (a
            # same-rank table card is the singleton subset).
            capturable = _achievable_rank_sums(table_before)
            blockers = frozenset(
                c
                for c in new_unseen
                if c.rank != move.played.rank and c.rank in capturable
            )
            removals[seat][CLASS_B] = removals[seat][CLASS_B] | blockers
        if (
            "c" in classes
            and len(move.captured) == 1
            and next(iter(move.captured)).rank == move.played.rank
            and move.played.suit != Suit.COINS
        ):
            coin = Card(move.played.rank, Suit.COINS)
            if coin in new_unseen:
                removals[seat][CLASS_C] = removals[seat][CLASS_C] | frozenset((coin,))

    sizes[seat] = max(0, sizes[seat] - 1)
    removals_t: Removals = tuple(tuple(per_seat) for per_seat in removals)
    cand, certain, dropped = _derive(
        gs.observer, new_unseen, tuple(sizes), removals_t,
        min_drop=gs.dropped_classes,
    )
    return GuessState(
        observer=gs.observer,
        unseen_pool=new_unseen,
        hand_sizes=tuple(sizes),
        candidate_sets=cand,
        certain_sets=certain,
        removals=removals_t,
        dropped_classes=dropped,
    )


def guess_for_view(view: PlayerView) -> GuessState:
    """Rebuild the guess state for a live view by replaying its history."""
    own_played = frozenset(
        h.move.played for h in view.history if h.seat == view.seat
    )
    initial_table = view.history[0].table_before if view.history else view.table
    initial = PlayerView(
        seat=view.seat,
        hand=view.hand | own_played,
        table=initial_table,
        piles=(frozenset(), frozenset()),
        scope=((), ()),
        hand_sizes=(9, 9, 9, 9),
        current_seat=0,
        last_capturer=None,
        history=(),
        turn_index=0,
    )
    gs = init_guess(initial)
    for entry in view.history:
        gs = observe_move(gs, entry.seat, entry.table_before, entry.move)
    return gs


def plausible_hands(
    gs: GuessState,
    hand_sizes: dict[int, int],
    rng: SplitMix64,
    max_attempts: int = 200,
) -> dict[int, frozenset[Card]]:
    """Sample one hidden-hand assignment consistent with the guess state.

    Certain cards are pinned first; the rest is shuffled uniformly and
    rejected against the candidate sets, so accepted samples are
    uniform over the feasible assignments. After `max_attempts`
    rejections the candidate constraints are relaxed (sizes and certain
    cards are still honored) and the fallback is logged.
    """
    seats = sorted(hand_sizes)
    if sum(hand_sizes[s] for s in seats) != len(gs.unseen_pool):
        raise ValueError("hand sizes must partition the unseen pool")
    forced = {s: gs.certain_sets[s] for s in seats}
    if any(len(forced[s]) > hand_sizes[s] for s in seats):
        logger.debug("certain sets infeasible, sampling by sizes only")
        forced = {s: frozenset() for s in seats}
    rest = sorted(gs.unseen_pool - frozenset().union(*forced.values()))

    for attempt in range(max_attempts + 1):
        rng.shuffle(rest)
        relaxed = attempt == max_attempts
        idx = 0
        result = {}
        ok = True
        for s in seats:
            need = hand_sizes[s] - len(forced[s])
            taken = rest[idx:idx + need]
            idx += need
            if not relaxed and any(c not in gs.candidate_sets[s] for c in taken):
                ok = False
                break
            result[s] = forced[s] | frozenset(taken)
        if ok:
            if relaxed:
                logger.debug(
                    "plausible_hands fell back to size-only sampling after %d attempts",
                    max_attempts,
                )
            return result
    raise AssertionError("unreachable: relaxed attempt always succeeds")
