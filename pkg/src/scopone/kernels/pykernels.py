"""Pure-Python kernel: bitmask rules core, rollouts, and tree searches.

Cards are the integers 0..39 (suit-major: coins 0-9, swords 10-19, cups
20-29, batons 30-39) and card sets are 40-bit masks. This module is the
readable reference for the compiled twin in ``ckernels.pyx``: both
implement the same algorithms with the same SplitMix64 stream and the
same tie-breaking, so for a given seed they return identical moves.
Every random draw is therefore pinned: expansion picks, UCT ties,
rollout moves, epsilon tests and determinization shuffles all consume
the stream in a fixed order.

State layout (a plain mutable list): [hand0..hand3, table, pile0,
pile1, scope0, scope1, current_seat, last_capturer(-1 if none),
turn_index]. Teams are seat parity: team 0 = seats {0,2}.
"""

from __future__ import annotations

import math

from ..rng import SplitMix64

FULL = (1 << 40) - 1
SETTEBELLO = 6  # card id of 7 of coins
COINS_MASK = (1 << 10) - 1

H0, H1, H2, H3, TABLE, P0, P1, SC0, SC1, SEAT, LASTCAP, TURN = range(12)

RANK = [i % 10 + 1 for i in range(40)]
PRIM = [16, 12, 13, 14, 15, 18, 21, 10, 10, 10]
PRIM_OF = [PRIM[i % 10] for i in range(40)]
IMPORTANCE = [
    PRIM_OF[i] * 10 + (60 if i < 10 else 0) + (40 if i == SETTEBELLO else 0)
    for i in range(40)
]
RANK_MASK = [0] * 11
for _i in range(40):
    RANK_MASK[RANK[_i]] |= 1 << _i

# simulation strategies
SIM_RS, SIM_CRS, SIM_GS, SIM_EGS = 0, 1, 2, 3
# reward functions
REW_RS, REW_SD, REW_WL, REW_PWL = 0, 1, 2, 3

SIM_CODES = {"rs": SIM_RS, "crs": SIM_CRS, "gs": SIM_GS, "egs": SIM_EGS}
REW_CODES = {"rs": REW_RS, "sd": REW_SD, "wl": REW_WL, "pwl": REW_PWL}


def bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def capture_options(card: int, table: int) -> list[int]:
    """Capture masks for a card, canonical order; [] if it cannot capture."""
    singles = table & RANK_MASK[RANK[card]]
    if singles:
        return [1 << b for b in bits(singles)]
    target = RANK[card]
    table_cards = bits(table)
    options: list[int] = []

    def search(i: int, remaining: int, chosen: int, count: int) -> None:
        if remaining == 0:
            if count >= 2:
                options.append(chosen)
            return
        if i == len(table_cards):
            return
        c = table_cards[i]
        if RANK[c] <= remaining:
            search(i + 1, remaining - RANK[c], chosen | (1 << c), count + 1)
        search(i + 1, remaining, chosen, count)

    search(0, target, 0, 0)
    return options


def moves_list(hand: int, table: int) -> list[tuple[int, int]]:
    """(card, capture_mask) pairs in canonical order; mask 0 = placement."""
    moves = []
    for card in bits(hand):
        options = capture_options(card, table)
        if options:
            moves.extend((card, opt) for opt in options)
        else:
            moves.append((card, 0))
    return moves


def state_from(hands, table, piles, scope_counts, seat, last_capturer, turn):
    return [
        hands[0], hands[1], hands[2], hands[3],
        table, piles[0], piles[1],
        scope_counts[0], scope_counts[1],
        seat, last_capturer, turn,
    ]


def apply(state: list, card: int, cap: int) -> None:
    seat = state[SEAT]
    team = seat & 1
    state[H0 + seat] &= ~(1 << card)
    if cap:
        state[TABLE] &= ~cap
        state[P0 + team] |= cap | (1 << card)
        state[LASTCAP] = seat
        if state[TABLE] == 0 and state[TURN] < 35:
            state[SC0 + team] += 1
    else:
        state[TABLE] |= 1 << card
    state[TURN] += 1
    state[SEAT] = (seat + 1) & 3
    if state[TURN] == 36 and state[TABLE] and state[LASTCAP] >= 0:
        state[P0 + (state[LASTCAP] & 1)] |= state[TABLE]
        state[TABLE] = 0


def score_state(state: list) -> tuple[int, int]:
    """Raw match points per team from a terminal state."""
    points = [state[SC0], state[SC1]]
    piles = (state[P0], state[P1])
    counts = [popcount(p) for p in piles]
    if counts[0] != counts[1]:
        points[counts[1] > counts[0]] += 1
    coins = [popcount(p & COINS_MASK) for p in piles]
    if coins[0] != coins[1]:
        points[coins[1] > coins[0]] += 1
    for t in (0, 1):
        if piles[t] >> SETTEBELLO & 1:
            points[t] += 1
    prim = [0, 0]
    complete = [True, True]
    for t in (0, 1):
        for suit in range(4):
            suit_cards = (piles[t] >> (suit * 10)) & COINS_MASK
            best = 0
            for r in bits(suit_cards):
                if PRIM[r] > best:
                    best = PRIM[r]
            if best == 0:
                complete[t] = False
            prim[t] += best
    if complete[0] and complete[1]:
        if prim[0] != prim[1]:
            points[prim[1] > prim[0]] += 1
    elif complete[0] or complete[1]:
        points[int(complete[1])] += 1
    return points[0], points[1]


# ---------------------------------------------------------------------------
# greedy policy (kernel twin of players.greedy_choose)
# ---------------------------------------------------------------------------


def _cap_importance(cap: int) -> int:
    total = 0
    for b in bits(cap):
        total += IMPORTANCE[b]
    return total


def _mask_less(a: int, b: int) -> bool:
    """Lexicographic order of capture masks as sorted id tuples."""
    if a == b:
        return False
    diff = a ^ b
    low = diff & -diff
    return bool(a & low)


def _better_capture(card_a, cap_a, imp_a, card_b, cap_b, imp_b) -> bool:
    """True if move A beats move B (higher importance, canonical tie)."""
    if imp_a != imp_b:
        return imp_a > imp_b
    if card_a != card_b:
        return card_a < card_b
    return _mask_less(cap_a, cap_b)


def _best_capture(moves: list[tuple[int, int]]) -> tuple[int, int]:
    best_card, best_cap = moves[0]
    best_imp = _cap_importance(best_cap)
    for card, cap in moves[1:]:
        imp = _cap_importance(cap)
        if _better_capture(card, cap, imp, best_card, best_cap, best_imp):
            best_card, best_cap, best_imp = card, cap, imp
    return best_card, best_cap


def _capture_choice(captures, table, turn):
    if turn < 35:
        scopas = [m for m in captures if m[1] == table]
        if scopas:
            if table >> SETTEBELLO & 1:
                return _best_capture(scopas)
            alts = [
                m for m in captures
                if m[1] != table
                and (m[0] == SETTEBELLO or m[1] >> SETTEBELLO & 1)
            ]
            return _best_capture(alts or scopas)
    return _best_capture(captures)


def _sum_bits(table: int) -> int:
    """Bitset of rank sums (bits 1..10) achievable by subsets of table."""
    sums = 1
    for b in bits(table):
        sums |= sums << RANK[b]
        sums &= (1 << 11) - 1
    return sums & ~1


def _unseen_rank_bits(unseen: int) -> int:
    out = 0
    for r in range(1, 11):
        if unseen & RANK_MASK[r]:
            out |= 1 << r
    return out


def greedy_pick(state: list) -> tuple[int, int]:
    """The beginner policy over the mover's view of the kernel state."""
    seat = state[SEAT]
    hand = state[H0 + seat]
    table = state[TABLE]
    moves = moves_list(hand, table)
    captures = [m for m in moves if m[1]]
    if captures:
        return _capture_choice(captures, table, state[TURN])
    unseen = FULL & ~(hand | table | state[P0] | state[P1])
    danger = _unseen_rank_bits(unseen)
    best = -1
    best_safe = False
    best_imp = 0
    for card, _ in moves:
        safe = (_sum_bits(table | (1 << card)) & danger) == 0
        imp = IMPORTANCE[card]
        if (
            best < 0
            or (safe and not best_safe)
            or (safe == best_safe and imp < best_imp)
        ):
            best, best_safe, best_imp = card, safe, imp
    return best, 0


def _crs_pick(state: list, rng: SplitMix64) -> tuple[int, int]:
    seat = state[SEAT]
    hand_cards = bits(state[H0 + seat])
    card = hand_cards[rng.below(len(hand_cards))]
    options = capture_options(card, state[TABLE])
    if not options:
        return card, 0
    if len(options) == 1:
        return card, options[0]
    return _capture_choice(
        [(card, o) for o in options], state[TABLE], state[TURN]
    )


def playout(state: list, strategy: int, epsilon: float, rng: SplitMix64,
            record: list | None = None) -> None:
    """Play the state to termination in place with a rollout policy."""
    while state[TURN] < 36:
        if strategy == SIM_GS:
            card, cap = greedy_pick(state)
        elif strategy == SIM_RS:
            moves = moves_list(state[H0 + state[SEAT]], state[TABLE])
            card, cap = moves[rng.below(len(moves))]
        elif strategy == SIM_EGS:
            if rng.unit() < epsilon:
                moves = moves_list(state[H0 + state[SEAT]], state[TABLE])
                card, cap = moves[rng.below(len(moves))]
            else:
                card, cap = greedy_pick(state)
        else:  # SIM_CRS
            card, cap = _crs_pick(state, rng)
        if record is not None:
            record.append((card, cap))
        apply(state, card, cap)


def reward_values(fn: int, s0: int, s1: int) -> tuple[float, float]:
    if fn == REW_RS:
        return float(s0), float(s1)
    if fn == REW_SD:
        return float(s0 - s1), float(s1 - s0)
    if fn == REW_WL:
        if s0 > s1:
            return 1.0, -1.0
        if s1 > s0:
            return -1.0, 1.0
        return 0.0, 0.0
    if s0 > s1:
        return 1.0, 0.0
    if s1 > s0:
        return 0.0, 1.0
    return 0.5, 0.5


def uct_value(q_team: float, child_n: int, parent_n: int, c: float) -> float:
    """Plain UCT: mean reward plus c * sqrt(2 ln N(parent) / N(child))."""
    return q_team / child_n + c * math.sqrt(2.0 * math.log(parent_n) / child_n)


def isuct_value(q_team: float, child_n: int, avail_n: int, c: float) -> float:
    """Information-set UCT: exploration uses the availability count."""
    return q_team / child_n + c * math.sqrt(math.log(avail_n) / child_n)


# ---------------------------------------------------------------------------
# Monte Carlo tree search (full state, cheating player)
# ---------------------------------------------------------------------------


class SearchNode:
    """One node of the (perfect-information) search tree.

    `acting_seat` is the seat to move in this node's state; `q` holds
    per-team reward totals and the selection reads the component of the
    team acting at the parent.
    """

    __slots__ = ("move", "parent", "children", "untried", "n", "q0", "q1",
                 "acting_seat")

    def __init__(self, move, parent, acting_seat, untried):
        self.move = move
        self.parent = parent
        self.children: list[SearchNode] = []
        self.untried: list[tuple[int, int]] = untried
        self.n = 0
        self.q0 = 0.0
        self.q1 = 0.0
        self.acting_seat = acting_seat

    def q_for(self, team: int) -> float:
        return self.q0 if team == 0 else self.q1


def _select_child_uct(node: SearchNode, c: float, rng: SplitMix64) -> SearchNode:
    team = node.acting_seat & 1
    log_n = math.log(node.n)
    best_val = -math.inf
    ties: list[SearchNode] = []
    for child in node.children:
        val = child.q_for(team) / child.n + c * math.sqrt(2.0 * log_n / child.n)
        if val > best_val:
            best_val = val
            ties = [child]
        elif val == best_val:
            ties.append(child)
    return ties[0] if len(ties) == 1 else ties[rng.below(len(ties))]


def _pick_max_visits(children, rng: SplitMix64):
    best_n = -1
    ties = []
    for child in children:
        if child.n > best_n:
            best_n = child.n
            ties = [child]
        elif child.n == best_n:
            ties.append(child)
    return ties[0] if len(ties) == 1 else ties[rng.below(len(ties))]


def mcts_search(root_state: list, iterations: int, c: float, reward_fn: int,
                strategy: int, epsilon: float, rng: SplitMix64,
                collect_tree: bool = False):
    """Run UCT search from a full state; returns (card, capture_mask).

    With `collect_tree` the root SearchNode is returned as well, for
    invariant checks and diagnostics.
    """
    root = SearchNode(
        None, None, root_state[SEAT],
        moves_list(root_state[H0 + root_state[SEAT]], root_state[TABLE]),
    )
    for _ in range(iterations):
        state = list(root_state)
        node = root
        while state[TURN] < 36 and not node.untried and node.children:
            node = _select_child_uct(node, c, rng)
            apply(state, node.move[0], node.move[1])
        if state[TURN] < 36 and node.untried:
            k = rng.below(len(node.untried))
            move = node.untried.pop(k)
            apply(state, move[0], move[1])
            untried = (
                moves_list(state[H0 + state[SEAT]], state[TABLE])
                if state[TURN] < 36
                else []
            )
            child = SearchNode(move, node, state[SEAT], untried)
            node.children.append(child)
            node = child
        playout(state, strategy, epsilon, rng)
        s0, s1 = score_state(state)
        r0, r1 = reward_values(reward_fn, s0, s1)
        while node is not None:
            node.n += 1
            node.q0 += r0
            node.q1 += r1
            node = node.parent
    best = _pick_max_visits(root.children, rng)
    if collect_tree:
        return best.move[0], best.move[1], root
    return best.move[0], best.move[1]


# ---------------------------------------------------------------------------
# Information-set MCTS (player view, fair player)
# ---------------------------------------------------------------------------


class InfoSetNode:
    """Search-tree node over information sets.

    `n_prime` counts the iterations in which this node's move was legal
    while the parent was visited -- including visits before the node was
    expanded, which the parent accumulates in `pending_avail`.
    """

    __slots__ = ("move", "parent", "children", "pending_avail", "n", "n_prime",
                 "q0", "q1", "acting_seat")

    def __init__(self, move, parent, acting_seat, n_prime):
        self.move = move
        self.parent = parent
        self.children: list[InfoSetNode] = []
        self.pending_avail: dict[tuple[int, int], int] = {}
        self.n = 0
        self.n_prime = n_prime
        self.q0 = 0.0
        self.q1 = 0.0
        self.acting_seat = acting_seat

    def q_for(self, team: int) -> float:
        return self.q0 if team == 0 else self.q1


def determinize_hands(
    unseen: list[int],
    seats: list[int],
    sizes: list[int],
    cand_masks: list[int],
    cert_masks: list[int],
    rng: SplitMix64,
    max_attempts: int = 200,
) -> list[int]:
    """Assign unseen cards to hidden seats, honoring certain cards and
    rejecting against candidate masks; relaxes after max_attempts.

    Returns masks aligned with `seats`. rng use is pinned: one full
    Fisher-Yates shuffle per attempt, nothing else.
    """
    forced = list(cert_masks)
    if any(popcount(forced[i]) > sizes[i] for i in range(len(seats))):
        forced = [0] * len(seats)
    forced_all = 0
    for f in forced:
        forced_all |= f
    rest = [u for u in unseen if not (forced_all >> u & 1)]
    for attempt in range(max_attempts + 1):
        rng.shuffle(rest)
        relaxed = attempt == max_attempts
        idx = 0
        result = []
        ok = True
        for i in range(len(seats)):
            need = sizes[i] - popcount(forced[i])
            taken = 0
            for card in rest[idx:idx + need]:
                taken |= 1 << card
            idx += need
            if not relaxed and taken & ~cand_masks[i]:
                ok = False
                break
            result.append(forced[i] | taken)
        if ok:
            return result
    raise AssertionError("unreachable")


def _select_child_isuct(node, avail, c, rng):
    team = node.acting_seat & 1
    best_val = -math.inf
    ties = []
    for child in avail:
        val = child.q_for(team) / child.n + c * math.sqrt(
            math.log(child.n_prime) / child.n
        )
        if val > best_val:
            best_val = val
            ties = [child]
        elif val == best_val:
            ties.append(child)
    return ties[0] if len(ties) == 1 else ties[rng.below(len(ties))]


def ismcts_search(
    observer: int,
    own_hand: int,
    table: int,
    piles: tuple[int, int],
    scope_counts: tuple[int, int],
    last_capturer: int,
    turn: int,
    hand_sizes: list[int],
    cand_masks: list[int],
    cert_masks: list[int],
    iterations: int,
    c: float,
    reward_fn: int,
    strategy: int,
    epsilon: float,
    rng: SplitMix64,
    collect_tree: bool = False,
):
    """Single-observer ISMCTS over the observer's information set.

    Each iteration samples a determinization (hidden hands consistent
    with the view and, for the guessing determinizator, with the
    candidate/certain masks; pass full/zero masks for the random one),
    restricts the tree walk to moves legal in it, and keeps availability
    counts so selection can use isuct_value.
    """
    unseen_mask = FULL & ~(own_hand | table | piles[0] | piles[1])
    unseen = bits(unseen_mask)
    seats = [s for s in range(4) if s != observer]
    sizes = [hand_sizes[s] for s in seats]
    cands = [cand_masks[s] for s in seats]
    certs = [cert_masks[s] for s in seats]
    root = InfoSetNode(None, None, observer, 0)

    for _ in range(iterations):
        hidden = determinize_hands(unseen, seats, sizes, cands, certs, rng)
        hands = [0, 0, 0, 0]
        hands[observer] = own_hand
        for i, s in enumerate(seats):
            hands[s] = hidden[i]
        state = state_from(
            hands, table, piles, scope_counts, observer, last_capturer, turn
        )
        node = root
        expanded = False
        while state[TURN] < 36 and not expanded:
            legal = moves_list(state[H0 + state[SEAT]], state[TABLE])
            child_by_move = {ch.move: ch for ch in node.children}
            untried = []
            avail = []
            for move in legal:
                child = child_by_move.get(move)
                if child is not None:
                    child.n_prime += 1
                    avail.append(child)
                else:
                    node.pending_avail[move] = node.pending_avail.get(move, 0) + 1
                    untried.append(move)
            if untried:
                move = untried[rng.below(len(untried))]
                apply(state, move[0], move[1])
                child = InfoSetNode(
                    move, node, state[SEAT], node.pending_avail.pop(move)
                )
                node.children.append(child)
                node = child
                expanded = True
            else:
                node = _select_child_isuct(node, avail, c, rng)
                apply(state, node.move[0], node.move[1])
        playout(state, strategy, epsilon, rng)
        s0, s1 = score_state(state)
        r0, r1 = reward_values(reward_fn, s0, s1)
        while node is not None:
            node.n += 1
            node.q0 += r0
            node.q1 += r1
            node = node.parent
    best = _pick_max_visits(root.children, rng)
    if collect_tree:
        return best.move[0], best.move[1], root
    return best.move[0], best.move[1]
