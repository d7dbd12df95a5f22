"""Compare the compiled kernel against the pure-Python fallback.

Run: python3 benchmarks/bench_kernels.py [--iters N]

Times the hot operations (move generation, random/greedy playouts) and
full search decisions on sampled mid-game states, printing per-op
timings and the speedup factor.
"""

import argparse
import statistics
import time

from scopone.cards import deal
from scopone.engine import MatchState, apply_move, legal_moves
from scopone.kernels import pykernels as pk, state_to_kernel
from scopone.rng import SplitMix64, mix64

try:
    from scopone.kernels import ckernels as ck
except ImportError:
    ck = None


def sample_states(n=20, depth=12):
    states = []
    for seed in range(n):
        state = MatchState.from_deal(deal(seed))
        rng = SplitMix64(mix64(seed, 1))
        for _ in range(depth):
            moves = legal_moves(state)
            state = apply_move(state, moves[rng.below(len(moves))])
        states.append(state_to_kernel(state))
    return states


def time_op(fn, repeat=5):
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return min(samples)


def bench(impl, states, search_iters):
    out = {}

    def movegen():
        for ks in states:
            for _ in range(200):
                impl.moves_list(ks[pk.H0 + ks[pk.SEAT]], ks[pk.TABLE])

    out["movegen x200"] = time_op(movegen)

    def rollouts():
        rng = SplitMix64(7)
        for ks in states:
            for _ in range(100):
                impl.playout(list(ks), pk.SIM_RS, 0.0, rng)

    out["random playout x100"] = time_op(rollouts)

    def greedy_rollouts():
        rng = SplitMix64(7)
        for ks in states:
            for _ in range(20):
                impl.playout(list(ks), pk.SIM_EGS, 0.3, rng)

    out["egs playout x20"] = time_op(greedy_rollouts)

    def search():
        rng = SplitMix64(11)
        for ks in states[:5]:
            impl.mcts_search(list(ks), search_iters, 2.0, pk.REW_SD,
                             pk.SIM_EGS, 0.3, rng)

    out[f"mcts {search_iters} iters x5"] = time_op(search, repeat=3)
    return out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--iters", type=int, default=1000)
    args = parser.parse_args()

    states = sample_states()
    results = {}
    results["python"] = bench(pk, states, args.iters)
    if ck is not None:
        results["c"] = bench(ck, states, args.iters)

    ops = list(results["python"])
    width = max(len(op) for op in ops) + 2
    header = f"{'op':<{width}}" + "".join(f"{k:>14}" for k in results)
    if ck is not None:
        header += f"{'speedup':>10}"
    print(header)
    for op in ops:
        line = f"{op:<{width}}"
        for k in results:
            line += f"{results[k][op] * 1000:>12.2f}ms"
        if ck is not None:
            line += f"{results['python'][op] / results['c'][op]:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
