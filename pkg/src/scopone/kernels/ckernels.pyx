# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel: bitmask rules core, rollouts, and tree searches.

Twin of ``pykernels.py``. The algorithms, tie-breaking rules and
SplitMix64 stream consumption are identical statement for statement, so
both backends return the same move for the same seed; the test suite
asserts that. Keep the two files in sync when touching either.
"""

from libc.math cimport log, sqrt
from libc.stdint cimport int64_t, uint64_t
from libcpp.vector cimport vector

from .pykernels import InfoSetNode, SearchNode

cdef uint64_t FULL_MASK = (<uint64_t>1 << 40) - 1
cdef uint64_t COINS = (<uint64_t>1 << 10) - 1
cdef int SETTEBELLO_C = 6

cdef int RANKC[40]
cdef int IMPORTANCEC[40]
cdef int PRIMC[10]
cdef uint64_t RANK_MASKC[11]

cdef int _i
for _i in range(10):
    PRIMC[_i] = (16, 12, 13, 14, 15, 18, 21, 10, 10, 10)[_i]
for _i in range(11):
    RANK_MASKC[_i] = 0
for _i in range(40):
    RANKC[_i] = _i % 10 + 1
    IMPORTANCEC[_i] = PRIMC[_i % 10] * 10
    if _i < 10:
        IMPORTANCEC[_i] += 60
    if _i == SETTEBELLO_C:
        IMPORTANCEC[_i] += 40
    RANK_MASKC[RANKC[_i]] |= <uint64_t>1 << _i

cdef int SIM_RS_C = 0, SIM_CRS_C = 1, SIM_GS_C = 2, SIM_EGS_C = 3
cdef int REW_RS_C = 0, REW_SD_C = 1, REW_WL_C = 2, REW_PWL_C = 3


# ---------------------------------------------------------------------------
# rng (SplitMix64, identical to scopone.rng)
# ---------------------------------------------------------------------------

cdef inline uint64_t rng_next(uint64_t* s) noexcept nogil:
    s[0] = s[0] + <uint64_t>0x9E3779B97F4A7C15
    cdef uint64_t z = s[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef extern from *:
    ctypedef unsigned long long uint128 "unsigned __int128"


cdef inline uint64_t rng_below(uint64_t* s, uint64_t n) noexcept nogil:
    return <uint64_t>(((<uint128>rng_next(s)) * n) >> 64)


cdef inline double rng_unit(uint64_t* s) noexcept nogil:
    return (rng_next(s) >> 11) * (1.0 / 9007199254740992.0)


cdef inline int popcnt(uint64_t x) noexcept nogil:
    cdef int n = 0
    while x:
        x &= x - 1
        n += 1
    return n


cdef inline int lowbit_index(uint64_t x) noexcept nogil:
    cdef int i = 0
    while not (x & 1):
        x >>= 1
        i += 1
    return i


# ---------------------------------------------------------------------------
# state
# ---------------------------------------------------------------------------

cdef struct KState:
    uint64_t hands[4]
    uint64_t table
    uint64_t piles[2]
    int scope[2]
    int seat
    int last_cap
    int turn


cdef void state_load(KState* st, list s):
    st.hands[0] = s[0]; st.hands[1] = s[1]
    st.hands[2] = s[2]; st.hands[3] = s[3]
    st.table = s[4]
    st.piles[0] = s[5]; st.piles[1] = s[6]
    st.scope[0] = s[7]; st.scope[1] = s[8]
    st.seat = s[9]; st.last_cap = s[10]; st.turn = s[11]


cdef void state_store(KState* st, list s):
    s[0] = st.hands[0]; s[1] = st.hands[1]
    s[2] = st.hands[2]; s[3] = st.hands[3]
    s[4] = st.table
    s[5] = st.piles[0]; s[6] = st.piles[1]
    s[7] = st.scope[0]; s[8] = st.scope[1]
    s[9] = st.seat; s[10] = st.last_cap; s[11] = st.turn


cdef void k_apply(KState* st, int card, uint64_t cap) noexcept nogil:
    cdef int seat = st.seat
    cdef int team = seat & 1
    st.hands[seat] &= ~(<uint64_t>1 << card)
    if cap:
        st.table &= ~cap
        st.piles[team] |= cap | (<uint64_t>1 << card)
        st.last_cap = seat
        if st.table == 0 and st.turn < 35:
            st.scope[team] += 1
    else:
        st.table |= <uint64_t>1 << card
    st.turn += 1
    st.seat = (seat + 1) & 3
    if st.turn == 36 and st.table and st.last_cap >= 0:
        st.piles[st.last_cap & 1] |= st.table
        st.table = 0


# ---------------------------------------------------------------------------
# move generation (canonical order, as pykernels)
# ---------------------------------------------------------------------------

cdef void _subset_dfs(int* tc, int nt, int i, int remaining,
                      uint64_t chosen, int count,
                      vector[uint64_t]* out) noexcept nogil:
    if remaining == 0:
        if count >= 2:
            out.push_back(chosen)
        return
    if i == nt:
        return
    if RANKC[tc[i]] <= remaining:
        _subset_dfs(tc, nt, i + 1, remaining - RANKC[tc[i]],
                    chosen | (<uint64_t>1 << tc[i]), count + 1, out)
    _subset_dfs(tc, nt, i + 1, remaining, chosen, count, out)


cdef void gen_captures(int card, uint64_t table,
                       vector[uint64_t]* out) noexcept nogil:
    cdef uint64_t singles = table & RANK_MASKC[RANKC[card]]
    cdef uint64_t rest, low
    cdef int tc[40]
    cdef int nt = 0
    if singles:
        rest = singles
        while rest:
            low = rest & (~rest + 1)
            out.push_back(low)
            rest ^= low
        return
    rest = table
    while rest:
        low = rest & (~rest + 1)
        tc[nt] = lowbit_index(low)
        nt += 1
        rest ^= low
    _subset_dfs(tc, nt, 0, RANKC[card], 0, 0, out)


cdef void gen_moves(uint64_t hand, uint64_t table,
                    vector[int]* mcard, vector[uint64_t]* mcap) noexcept nogil:
    cdef uint64_t rest = hand, low
    cdef int card
    cdef vector[uint64_t] opts
    cdef size_t k
    while rest:
        low = rest & (~rest + 1)
        card = lowbit_index(low)
        rest ^= low
        opts.clear()
        gen_captures(card, table, &opts)
        if opts.size() > 0:
            for k in range(opts.size()):
                mcard.push_back(card)
                mcap.push_back(opts[k])
        else:
            mcard.push_back(card)
            mcap.push_back(0)


# ---------------------------------------------------------------------------
# scoring
# ---------------------------------------------------------------------------

cdef void k_score(KState* st, int* out0, int* out1) noexcept nogil:
    cdef int points[2]
    cdef int counts[2]
    cdef int coins[2]
    cdef int prim[2]
    cdef bint complete[2]
    cdef int t, suit, best, r
    cdef uint64_t suit_cards, rest, low
    points[0] = st.scope[0]; points[1] = st.scope[1]
    counts[0] = popcnt(st.piles[0]); counts[1] = popcnt(st.piles[1])
    if counts[0] != counts[1]:
        points[0 if counts[0] > counts[1] else 1] += 1
    coins[0] = popcnt(st.piles[0] & COINS)
    coins[1] = popcnt(st.piles[1] & COINS)
    if coins[0] != coins[1]:
        points[0 if coins[0] > coins[1] else 1] += 1
    for t in range(2):
        if (st.piles[t] >> SETTEBELLO_C) & 1:
            points[t] += 1
    for t in range(2):
        prim[t] = 0
        complete[t] = True
        for suit in range(4):
            suit_cards = (st.piles[t] >> (suit * 10)) & COINS
            best = 0
            rest = suit_cards
            while rest:
                low = rest & (~rest + 1)
                r = lowbit_index(low)
                if PRIMC[r] > best:
                    best = PRIMC[r]
                rest ^= low
            if best == 0:
                complete[t] = False
            prim[t] += best
    if complete[0] and complete[1]:
        if prim[0] != prim[1]:
            points[0 if prim[0] > prim[1] else 1] += 1
    elif complete[0]:
        points[0] += 1
    elif complete[1]:
        points[1] += 1
    out0[0] = points[0]
    out1[0] = points[1]


cdef void reward_of(int fn, int s0, int s1, double* r0, double* r1) noexcept nogil:
    if fn == REW_RS_C:
        r0[0] = s0; r1[0] = s1
    elif fn == REW_SD_C:
        r0[0] = s0 - s1; r1[0] = s1 - s0
    elif fn == REW_WL_C:
        if s0 > s1:
            r0[0] = 1.0; r1[0] = -1.0
        elif s1 > s0:
            r0[0] = -1.0; r1[0] = 1.0
        else:
            r0[0] = 0.0; r1[0] = 0.0
    else:
        if s0 > s1:
            r0[0] = 1.0; r1[0] = 0.0
        elif s1 > s0:
            r0[0] = 0.0; r1[0] = 1.0
        else:
            r0[0] = 0.5; r1[0] = 0.5


# ---------------------------------------------------------------------------
# greedy policy
# ---------------------------------------------------------------------------

cdef inline int cap_importance(uint64_t cap) noexcept nogil:
    cdef int total = 0
    cdef uint64_t rest = cap, low
    while rest:
        low = rest & (~rest + 1)
        total += IMPORTANCEC[lowbit_index(low)]
        rest ^= low
    return total


cdef inline bint mask_less(uint64_t a, uint64_t b) noexcept nogil:
    if a == b:
        return False
    cdef uint64_t diff = a ^ b
    return (a & (diff & (~diff + 1))) != 0


cdef inline bint better_capture(int card_a, uint64_t cap_a, int imp_a,
                                int card_b, uint64_t cap_b, int imp_b) noexcept nogil:
    if imp_a != imp_b:
        return imp_a > imp_b
    if card_a != card_b:
        return card_a < card_b
    return mask_less(cap_a, cap_b)


cdef void best_capture_of(vector[int]* mcard, vector[uint64_t]* mcap,
                          vector[size_t]* idxs, int* out_card,
                          uint64_t* out_cap) noexcept nogil:
    cdef size_t j, i
    cdef int bc, imp, bimp
    cdef uint64_t bcap
    bc = mcard[0][idxs[0][0]]
    bcap = mcap[0][idxs[0][0]]
    bimp = cap_importance(bcap)
    for j in range(1, idxs.size()):
        i = idxs[0][j]
        imp = cap_importance(mcap[0][i])
        if better_capture(mcard[0][i], mcap[0][i], imp, bc, bcap, bimp):
            bc = mcard[0][i]
            bcap = mcap[0][i]
            bimp = imp
    out_card[0] = bc
    out_cap[0] = bcap


cdef void capture_choice(vector[int]* mcard, vector[uint64_t]* mcap,
                         vector[size_t]* cap_idx, uint64_t table, int turn,
                         int* out_card, uint64_t* out_cap) noexcept nogil:
    cdef vector[size_t] scopas
    cdef vector[size_t] alts
    cdef size_t j, i
    if turn < 35:
        for j in range(cap_idx.size()):
            i = cap_idx[0][j]
            if mcap[0][i] == table:
                scopas.push_back(i)
        if scopas.size() > 0:
            if (table >> SETTEBELLO_C) & 1:
                best_capture_of(mcard, mcap, &scopas, out_card, out_cap)
                return
            for j in range(cap_idx.size()):
                i = cap_idx[0][j]
                if mcap[0][i] != table and (
                    mcard[0][i] == SETTEBELLO_C
                    or (mcap[0][i] >> SETTEBELLO_C) & 1
                ):
                    alts.push_back(i)
            if alts.size() > 0:
                best_capture_of(mcard, mcap, &alts, out_card, out_cap)
            else:
                best_capture_of(mcard, mcap, &scopas, out_card, out_cap)
            return
    best_capture_of(mcard, mcap, cap_idx, out_card, out_cap)


cdef inline int sum_bits_of(uint64_t table) noexcept nogil:
    cdef int sums = 1
    cdef uint64_t rest = table, low
    while rest:
        low = rest & (~rest + 1)
        sums |= sums << RANKC[lowbit_index(low)]
        sums &= (1 << 11) - 1
        rest ^= low
    return sums & ~1


cdef inline int unseen_rank_bits_of(uint64_t unseen) noexcept nogil:
    cdef int out = 0
    cdef int r
    for r in range(1, 11):
        if unseen & RANK_MASKC[r]:
            out |= 1 << r
    return out


cdef void k_greedy(KState* st, int* out_card, uint64_t* out_cap) noexcept nogil:
    cdef uint64_t hand = st.hands[st.seat]
    cdef uint64_t table = st.table
    cdef vector[int] mcard
    cdef vector[uint64_t] mcap
    cdef vector[size_t] cap_idx
    cdef size_t i
    cdef uint64_t unseen
    cdef int danger, best, best_imp, imp, card
    cdef bint best_safe, safe
    gen_moves(hand, table, &mcard, &mcap)
    for i in range(mcap.size()):
        if mcap[i]:
            cap_idx.push_back(i)
    if cap_idx.size() > 0:
        capture_choice(&mcard, &mcap, &cap_idx, table, st.turn, out_card, out_cap)
        return
    unseen = FULL_MASK & ~(hand | table | st.piles[0] | st.piles[1])
    danger = unseen_rank_bits_of(unseen)
    best = -1
    best_safe = False
    best_imp = 0
    for i in range(mcard.size()):
        card = mcard[i]
        safe = (sum_bits_of(table | (<uint64_t>1 << card)) & danger) == 0
        imp = IMPORTANCEC[card]
        if best < 0 or (safe and not best_safe) or (
            safe == best_safe and imp < best_imp
        ):
            best = card
            best_safe = safe
            best_imp = imp
    out_card[0] = best
    out_cap[0] = 0


cdef void crs_pick(KState* st, uint64_t* rng, int* out_card,
                   uint64_t* out_cap) noexcept nogil:
    cdef uint64_t rest = st.hands[st.seat], low
    cdef int hand_cards[10]
    cdef int n = 0
    cdef int card
    cdef vector[uint64_t] opts
    cdef vector[int] mcard
    cdef vector[uint64_t] mcap
    cdef vector[size_t] idxs
    cdef size_t k
    while rest:
        low = rest & (~rest + 1)
        hand_cards[n] = lowbit_index(low)
        n += 1
        rest ^= low
    card = hand_cards[rng_below(rng, n)]
    gen_captures(card, st.table, &opts)
    if opts.size() == 0:
        out_card[0] = card
        out_cap[0] = 0
        return
    if opts.size() == 1:
        out_card[0] = card
        out_cap[0] = opts[0]
        return
    for k in range(opts.size()):
        mcard.push_back(card)
        mcap.push_back(opts[k])
        idxs.push_back(k)
    capture_choice(&mcard, &mcap, &idxs, st.table, st.turn, out_card, out_cap)


cdef void k_playout(KState* st, int strategy, double epsilon,
                    uint64_t* rng) noexcept nogil:
    cdef int card
    cdef uint64_t cap
    cdef vector[int] mcard
    cdef vector[uint64_t] mcap
    cdef uint64_t k
    while st.turn < 36:
        if strategy == SIM_GS_C:
            k_greedy(st, &card, &cap)
        elif strategy == SIM_RS_C:
            mcard.clear(); mcap.clear()
            gen_moves(st.hands[st.seat], st.table, &mcard, &mcap)
            k = rng_below(rng, mcard.size())
            card = mcard[k]; cap = mcap[k]
        elif strategy == SIM_EGS_C:
            if rng_unit(rng) < epsilon:
                mcard.clear(); mcap.clear()
                gen_moves(st.hands[st.seat], st.table, &mcard, &mcap)
                k = rng_below(rng, mcard.size())
                card = mcard[k]; cap = mcap[k]
            else:
                k_greedy(st, &card, &cap)
        else:
            crs_pick(st, rng, &card, &cap)
        k_apply(st, card, cap)


# ---------------------------------------------------------------------------
# python-visible primitive wrappers (same signatures as pykernels)
# ---------------------------------------------------------------------------


def capture_options(int card, uint64_t table):
    cdef vector[uint64_t] opts
    gen_captures(card, table, &opts)
    return [opts[i] for i in range(opts.size())]


def moves_list(uint64_t hand, uint64_t table):
    cdef vector[int] mcard
    cdef vector[uint64_t] mcap
    gen_moves(hand, table, &mcard, &mcap)
    return [(mcard[i], mcap[i]) for i in range(mcard.size())]


def apply(list state, int card, uint64_t cap):
    cdef KState st
    state_load(&st, state)
    k_apply(&st, card, cap)
    state_store(&st, state)


def score_state(list state):
    cdef KState st
    cdef int s0 = 0, s1 = 0
    state_load(&st, state)
    k_score(&st, &s0, &s1)
    return (s0, s1)


def greedy_pick(list state):
    cdef KState st
    cdef int card = -1
    cdef uint64_t cap = 0
    state_load(&st, state)
    k_greedy(&st, &card, &cap)
    return (card, cap)


def reward_values(int fn, int s0, int s1):
    cdef double r0 = 0, r1 = 0
    reward_of(fn, s0, s1, &r0, &r1)
    return (r0, r1)


def playout(list state, int strategy, double epsilon, rng, record=None):
    cdef KState st
    cdef uint64_t rs = rng.state
    cdef int card
    cdef uint64_t cap
    cdef vector[int] mcard
    cdef vector[uint64_t] mcap
    cdef uint64_t k
    state_load(&st, state)
    if record is None:
        k_playout(&st, strategy, epsilon, &rs)
    else:
        while st.turn < 36:
            if strategy == SIM_GS_C:
                k_greedy(&st, &card, &cap)
            elif strategy == SIM_RS_C:
                mcard.clear(); mcap.clear()
                gen_moves(st.hands[st.seat], st.table, &mcard, &mcap)
                k = rng_below(&rs, mcard.size())
                card = mcard[k]; cap = mcap[k]
            elif strategy == SIM_EGS_C:
                if rng_unit(&rs) < epsilon:
                    mcard.clear(); mcap.clear()
                    gen_moves(st.hands[st.seat], st.table, &mcard, &mcap)
                    k = rng_below(&rs, mcard.size())
                    card = mcard[k]; cap = mcap[k]
                else:
                    k_greedy(&st, &card, &cap)
            else:
                crs_pick(&st, &rs, &card, &cap)
            record.append((card, cap))
            k_apply(&st, card, cap)
    state_store(&st, state)
    rng.state = rs


# ---------------------------------------------------------------------------
# determinization
# ---------------------------------------------------------------------------

cdef void k_determinize(int* unseen, int n_unseen, int n_seats, int* sizes,
                        uint64_t* cands, uint64_t* certs, uint64_t* out,
                        uint64_t* rng, int max_attempts) noexcept nogil:
    cdef uint64_t forced[4]
    cdef int i, j, attempt, idx, need, tmp
    cdef uint64_t forced_all = 0, taken
    cdef int rest[40]
    cdef int n_rest = 0
    cdef bint ok, relaxed, oversize = False
    cdef uint64_t jj
    for i in range(n_seats):
        forced[i] = certs[i]
        if popcnt(forced[i]) > sizes[i]:
            oversize = True
    if oversize:
        for i in range(n_seats):
            forced[i] = 0
    for i in range(n_seats):
        forced_all |= forced[i]
    for i in range(n_unseen):
        if not ((forced_all >> unseen[i]) & 1):
            rest[n_rest] = unseen[i]
            n_rest += 1
    for attempt in range(max_attempts + 1):
        for i in range(n_rest - 1, 0, -1):
            jj = rng_below(rng, i + 1)
            tmp = rest[i]; rest[i] = rest[<int>jj]; rest[<int>jj] = tmp
        relaxed = attempt == max_attempts
        idx = 0
        ok = True
        for i in range(n_seats):
            need = sizes[i] - popcnt(forced[i])
            taken = 0
            for j in range(need):
                taken |= <uint64_t>1 << rest[idx + j]
            idx += need
            if (not relaxed) and (taken & ~cands[i]):
                ok = False
                break
            out[i] = forced[i] | taken
        if ok:
            return


def determinize_hands(list unseen, list seats, list sizes, list cand_masks,
                      list cert_masks, rng, int max_attempts=200):
    cdef int n_unseen = len(unseen)
    cdef int n_seats = len(seats)
    cdef int un[40]
    cdef int sz[4]
    cdef uint64_t ca[4]
    cdef uint64_t ce[4]
    cdef uint64_t out[4]
    cdef uint64_t rs = rng.state
    cdef int i
    for i in range(n_unseen):
        un[i] = unseen[i]
    for i in range(n_seats):
        sz[i] = sizes[i]
        ca[i] = cand_masks[i]
        ce[i] = cert_masks[i]
    k_determinize(un, n_unseen, n_seats, sz, ca, ce, out, &rs, max_attempts)
    rng.state = rs
    return [out[i] for i in range(n_seats)]


# ---------------------------------------------------------------------------
# search node pool
# ---------------------------------------------------------------------------

cdef struct NodeRec:
    int parent
    int move_card
    uint64_t move_cap
    int n
    double q0
    double q1
    int acting
    int first_child
    int last_child
    int next_sib
    int nprime
    int untried_off
    int untried_len


cdef int pool_new_node(vector[NodeRec]* pool, int parent, int move_card,
                       uint64_t move_cap, int acting, int nprime) noexcept nogil:
    cdef NodeRec rec
    rec.parent = parent
    rec.move_card = move_card
    rec.move_cap = move_cap
    rec.n = 0
    rec.q0 = 0.0
    rec.q1 = 0.0
    rec.acting = acting
    rec.first_child = -1
    rec.last_child = -1
    rec.next_sib = -1
    rec.nprime = nprime
    rec.untried_off = 0
    rec.untried_len = 0
    pool.push_back(rec)
    cdef int idx = <int>pool.size() - 1
    if parent >= 0:
        if pool[0][parent].first_child < 0:
            pool[0][parent].first_child = idx
        else:
            pool[0][pool[0][parent].last_child].next_sib = idx
        pool[0][parent].last_child = idx
    return idx


cdef int pick_best_visits(vector[NodeRec]* pool, uint64_t* rng) noexcept nogil:
    cdef int best_n = -1
    cdef vector[int] ties
    cdef int child = pool[0][0].first_child
    while child >= 0:
        if pool[0][child].n > best_n:
            best_n = pool[0][child].n
            ties.clear()
            ties.push_back(child)
        elif pool[0][child].n == best_n:
            ties.push_back(child)
        child = pool[0][child].next_sib
    if ties.size() == 1:
        return ties[0]
    return ties[rng_below(rng, ties.size())]


cdef _materialize(vector[NodeRec]* pool, bint infoset):
    nodes = []
    cdef size_t i
    cdef NodeRec rec
    for i in range(pool.size()):
        rec = pool[0][i]
        move = None if rec.parent < 0 else (rec.move_card, rec.move_cap)
        parent = None if rec.parent < 0 else nodes[rec.parent]
        if infoset:
            obj = InfoSetNode(move, parent, rec.acting, rec.nprime)
        else:
            obj = SearchNode(move, parent, rec.acting, [])
        obj.n = rec.n
        obj.q0 = rec.q0
        obj.q1 = rec.q1
        if parent is not None:
            parent.children.append(obj)
        nodes.append(obj)
    return nodes[0]


# ---------------------------------------------------------------------------
# MCTS (perfect information)
# ---------------------------------------------------------------------------


def mcts_search(list state, int iterations, double c, int reward_fn,
                int strategy, double epsilon, rng, bint collect_tree=False):
    cdef KState root_state, st
    cdef uint64_t rs = rng.state
    cdef vector[NodeRec] pool
    cdef vector[int] um_card
    cdef vector[uint64_t] um_cap
    cdef vector[int] mcard
    cdef vector[uint64_t] mcap
    cdef vector[int] ties
    cdef int it, node, child, k, i, best_idx
    cdef int exp_card
    cdef uint64_t exp_cap
    cdef int s0 = 0, s1 = 0
    cdef double r0 = 0, r1 = 0
    cdef double logn, val, best_val
    cdef int team
    cdef size_t j
    cdef int off, ln

    state_load(&root_state, state)
    pool.reserve(iterations + 1)
    pool_new_node(&pool, -1, -1, 0, root_state.seat, 0)
    gen_moves(root_state.hands[root_state.seat], root_state.table, &mcard, &mcap)
    pool[0].untried_off = 0
    pool[0].untried_len = <int>mcard.size()
    for j in range(mcard.size()):
        um_card.push_back(mcard[j])
        um_cap.push_back(mcap[j])

    for it in range(iterations):
        st = root_state
        node = 0
        while st.turn < 36 and pool[node].untried_len == 0 and pool[node].first_child >= 0:
            team = pool[node].acting & 1
            logn = log(<double>pool[node].n)
            best_val = -1e300
            ties.clear()
            child = pool[node].first_child
            while child >= 0:
                val = (pool[child].q0 if team == 0 else pool[child].q1) / pool[child].n \
                    + c * sqrt(2.0 * logn / pool[child].n)
                if val > best_val:
                    best_val = val
                    ties.clear()
                    ties.push_back(child)
                elif val == best_val:
                    ties.push_back(child)
                child = pool[child].next_sib
            if ties.size() == 1:
                node = ties[0]
            else:
                node = ties[<size_t>rng_below(&rs, ties.size())]
            k_apply(&st, pool[node].move_card, pool[node].move_cap)
        if st.turn < 36 and pool[node].untried_len > 0:
            k = <int>rng_below(&rs, pool[node].untried_len)
            off = pool[node].untried_off
            ln = pool[node].untried_len
            exp_card = um_card[off + k]
            exp_cap = um_cap[off + k]
            for i in range(off + k, off + ln - 1):
                um_card[i] = um_card[i + 1]
                um_cap[i] = um_cap[i + 1]
            pool[node].untried_len = ln - 1
            k_apply(&st, exp_card, exp_cap)
            child = pool_new_node(&pool, node, exp_card, exp_cap, st.seat, 0)
            if st.turn < 36:
                mcard.clear(); mcap.clear()
                gen_moves(st.hands[st.seat], st.table, &mcard, &mcap)
                pool[child].untried_off = <int>um_card.size()
                pool[child].untried_len = <int>mcard.size()
                for j in range(mcard.size()):
                    um_card.push_back(mcard[j])
                    um_cap.push_back(mcap[j])
            node = child
        k_playout(&st, strategy, epsilon, &rs)
        k_score(&st, &s0, &s1)
        reward_of(reward_fn, s0, s1, &r0, &r1)
        while node >= 0:
            pool[node].n += 1
            pool[node].q0 += r0
            pool[node].q1 += r1
            node = pool[node].parent

    best_idx = pick_best_visits(&pool, &rs)
    rng.state = rs
    if collect_tree:
        return (pool[best_idx].move_card, pool[best_idx].move_cap,
                _materialize(&pool, False))
    return (pool[best_idx].move_card, pool[best_idx].move_cap)


# ---------------------------------------------------------------------------
# ISMCTS
# ---------------------------------------------------------------------------

cdef struct PendRec:
    int card
    uint64_t cap
    int count


def ismcts_search(int observer, uint64_t own_hand, uint64_t table,
                  tuple piles, tuple scope_counts, int last_capturer,
                  int turn, list hand_sizes, list cand_masks, list cert_masks,
                  int iterations, double c, int reward_fn, int strategy,
                  double epsilon, rng, bint collect_tree=False):
    cdef uint64_t rs = rng.state
    cdef vector[NodeRec] pool
    cdef vector[vector[PendRec]] pend
    cdef vector[int] mcard
    cdef vector[uint64_t] mcap
    cdef vector[int] ties
    cdef vector[int] avail
    cdef vector[int] untried_pos
    cdef KState st
    cdef uint64_t unseen_mask, rest, low
    cdef int unseen[40]
    cdef int n_unseen = 0
    cdef int seats[3]
    cdef int sizes[3]
    cdef uint64_t cands[3]
    cdef uint64_t certs[3]
    cdef uint64_t hidden[3]
    cdef int n_seats = 0
    cdef int it, node, child, i, k, s, pos
    cdef int s0 = 0, s1 = 0
    cdef double r0 = 0, r1 = 0
    cdef double val, best_val
    cdef int team, best_idx
    cdef size_t j
    cdef bint found, expanded
    cdef PendRec pr
    cdef uint64_t pile0 = piles[0], pile1 = piles[1]
    cdef int sc0 = scope_counts[0], sc1 = scope_counts[1]

    unseen_mask = FULL_MASK & ~(own_hand | table | pile0 | pile1)
    rest = unseen_mask
    while rest:
        low = rest & (~rest + 1)
        unseen[n_unseen] = lowbit_index(low)
        n_unseen += 1
        rest ^= low
    for s in range(4):
        if s != observer:
            seats[n_seats] = s
            sizes[n_seats] = hand_sizes[s]
            cands[n_seats] = cand_masks[s]
            certs[n_seats] = cert_masks[s]
            n_seats += 1

    pool.reserve(iterations + 1)
    pend.reserve(iterations + 1)
    pool_new_node(&pool, -1, -1, 0, observer, 0)
    pend.push_back(vector[PendRec]())

    for it in range(iterations):
        k_determinize(unseen, n_unseen, n_seats, sizes, cands, certs,
                      hidden, &rs, 200)
        st.hands[observer] = own_hand
        for i in range(n_seats):
            st.hands[seats[i]] = hidden[i]
        st.table = table
        st.piles[0] = pile0; st.piles[1] = pile1
        st.scope[0] = sc0; st.scope[1] = sc1
        st.seat = observer
        st.last_cap = last_capturer
        st.turn = turn

        node = 0
        expanded = False
        while st.turn < 36 and not expanded:
            mcard.clear(); mcap.clear()
            gen_moves(st.hands[st.seat], st.table, &mcard, &mcap)
            avail.clear()
            untried_pos.clear()
            for j in range(mcard.size()):
                found = False
                child = pool[node].first_child
                while child >= 0:
                    if (pool[child].move_card == mcard[j]
                            and pool[child].move_cap == mcap[j]):
                        pool[child].nprime += 1
                        avail.push_back(child)
                        found = True
                        break
                    child = pool[child].next_sib
                if not found:
                    pos = -1
                    for i in range(<int>pend[node].size()):
                        if (pend[node][i].card == mcard[j]
                                and pend[node][i].cap == mcap[j]):
                            pos = i
                            break
                    if pos < 0:
                        pr.card = mcard[j]
                        pr.cap = mcap[j]
                        pr.count = 0
                        pend[node].push_back(pr)
                        pos = <int>pend[node].size() - 1
                    pend[node][pos].count += 1
                    untried_pos.push_back(pos)
            if untried_pos.size() > 0:
                k = <int>rng_below(&rs, untried_pos.size())
                pos = untried_pos[k]
                pr = pend[node][pos]
                k_apply(&st, pr.card, pr.cap)
                child = pool_new_node(&pool, node, pr.card, pr.cap, st.seat,
                                      pr.count)
                pend.push_back(vector[PendRec]())
                # swap-remove: untried positions are rebuilt every visit
                pend[node][pos] = pend[node][pend[node].size() - 1]
                pend[node].pop_back()
                node = child
                expanded = True
            else:
                team = pool[node].acting & 1
                best_val = -1e300
                ties.clear()
                for j in range(avail.size()):
                    child = avail[j]
                    val = (pool[child].q0 if team == 0 else pool[child].q1) / pool[child].n \
                        + c * sqrt(log(<double>pool[child].nprime) / pool[child].n)
                    if val > best_val:
                        best_val = val
                        ties.clear()
                        ties.push_back(child)
                    elif val == best_val:
                        ties.push_back(child)
                if ties.size() == 1:
                    node = ties[0]
                else:
                    node = ties[<size_t>rng_below(&rs, ties.size())]
                k_apply(&st, pool[node].move_card, pool[node].move_cap)
        k_playout(&st, strategy, epsilon, &rs)
        k_score(&st, &s0, &s1)
        reward_of(reward_fn, s0, s1, &r0, &r1)
        while node >= 0:
            pool[node].n += 1
            pool[node].q0 += r0
            pool[node].q1 += r1
            node = pool[node].parent

    best_idx = pick_best_visits(&pool, &rs)
    rng.state = rs
    if collect_tree:
        return (pool[best_idx].move_card, pool[best_idx].move_cap,
                _materialize(&pool, True))
    return (pool[best_idx].move_card, pool[best_idx].move_cap)
