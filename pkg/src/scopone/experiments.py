"""Tournament and sweep harness: fixed deck sets, role swapping,
repeats for stochastic players, confidence intervals, timing.

Every pairing in a plan is played over the same deck list, each deck in
both role assignments when the plan is symmetric. Matches are
independent tasks; aggregation is commutative, so results do not depend
on scheduling. Rates come with Wald 95% intervals (the reporting style
of the statistics in the writeups this reproduces); Wilson is available
behind a flag, and cell comparisons use a two-proportion z-test.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from .cards import DealResult, deal
from .engine import MatchState, apply_move, legal_moves, score_match, view_for
from .logformat import format_match
from .mcts import SearchConfig
from .roster import Player, StrategySpec, format_strategy, parse_strategy
from .rng import SplitMix64, mix64

Z95 = 1.959963984540054


def wald_ci(successes: int, n: int) -> tuple[float, float]:
    if n == 0:
        return (0.0, 0.0)
    p = successes / n
    half = Z95 * math.sqrt(p * (1 - p) / n)
    return (max(0.0, p - half), min(1.0, p + half))


def wilson_ci(successes: int, n: int) -> tuple[float, float]:
    if n == 0:
        return (0.0, 0.0)
    p = successes / n
    z2 = Z95 * Z95
    denom = 1 + z2 / n
    center = (p + z2 / (2 * n)) / denom
    half = Z95 * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def two_proportion_z(s1: int, n1: int, s2: int, n2: int) -> tuple[float, float]:
    """Pooled two-proportion z statistic and two-sided p-value."""
    p1, p2 = s1 / n1, s2 / n2
    pooled = (s1 + s2) / (n1 + n2)
    se = math.sqrt(pooled * (1 - pooled) * (1 / n1 + 1 / n2))
    if se == 0:
        return 0.0, 1.0
    z = (p1 - p2) / se
    p = math.erfc(abs(z) / math.sqrt(2))
    return z, p


@dataclass(frozen=True)
class ExperimentPlan:
    pairings: tuple[tuple[str, str], ...]
    deck_count: int = 1000
    deck_seed: int = 20260101
    repeats: int = 10
    seed: int = 1
    symmetric: bool = False
    parallelism: int = 0  # 0 = os.cpu_count()
    out_dir: Optional[str] = None
    ci_method: str = "wald"  # or "wilson"
    keep_logs: bool = False

    @classmethod
    def from_file(cls, path: str) -> "ExperimentPlan":
        text = Path(path).read_text()
        if path.endswith(".json"):
            data = json.loads(text)
        else:
            try:
                import tomllib  # py>=3.11
            except ImportError:
                import tomli as tomllib
            data = tomllib.loads(text)
        return cls(
            pairings=tuple((h, d) for h, d in data["pairings"]),
            deck_count=int(data.get("decks", 1000)),
            deck_seed=int(data.get("deck_seed", 20260101)),
            repeats=int(data.get("repeats", 10)),
            seed=int(data.get("seed", 1)),
            symmetric=bool(data.get("symmetric", False)),
            parallelism=int(data.get("parallelism", 0)),
            ci_method=data.get("ci_method", "wald"),
            keep_logs=bool(data.get("keep_logs", False)),
        )


@dataclass
class MatchRecord:
    hand_label: str
    deck_label: str
    deck_index: int
    repeat: int
    totals: tuple[int, int]
    log_text: str
    seat_ms: tuple[float, float, float, float]

    @property
    def winner(self) -> Optional[int]:
        if self.totals[0] == self.totals[1]:
            return None
        return 0 if self.totals[0] > self.totals[1] else 1


@dataclass
class Cell:
    """Aggregated outcomes for one (hand strategy, deck strategy) pair."""

    hand_label: str
    deck_label: str
    n: int = 0
    hand_wins: int = 0
    deck_wins: int = 0
    ties: int = 0
    hand_points: int = 0
    deck_points: int = 0
    hand_ms: list = field(default_factory=list)
    deck_ms: list = field(default_factory=list)

    def add(self, record: MatchRecord) -> None:
        self.n += 1
        if record.winner == 0:
            self.hand_wins += 1
        elif record.winner == 1:
            self.deck_wins += 1
        else:
            self.ties += 1
        self.hand_points += record.totals[0]
        self.deck_points += record.totals[1]
        if len(self.hand_ms) < 20000:
            self.hand_ms.extend(record.seat_ms[0::2])
            self.deck_ms.extend(record.seat_ms[1::2])

    def rates(self) -> tuple[float, float, float]:
        return (self.hand_wins / self.n, self.deck_wins / self.n, self.ties / self.n)

    def row(self, ci_method: str = "wald") -> dict:
        ci = wilson_ci if ci_method == "wilson" else wald_ci
        hand_ci = ci(self.hand_wins, self.n)
        deck_ci = ci(self.deck_wins, self.n)
        tie_ci = ci(self.ties, self.n)
        return {
            "hand": self.hand_label,
            "deck": self.deck_label,
            "n": self.n,
            "hand_wins": self.hand_wins,
            "deck_wins": self.deck_wins,
            "ties": self.ties,
            "hand_rate": self.hand_wins / self.n,
            "deck_rate": self.deck_wins / self.n,
            "tie_rate": self.ties / self.n,
            "hand_ci_lo": hand_ci[0],
            "hand_ci_hi": hand_ci[1],
            "deck_ci_lo": deck_ci[0],
            "deck_ci_hi": deck_ci[1],
            "tie_ci_lo": tie_ci[0],
            "tie_ci_hi": tie_ci[1],
            "hand_mean_points": self.hand_points / self.n,
            "deck_mean_points": self.deck_points / self.n,
            "hand_ms_mean": statistics.fmean(self.hand_ms) if self.hand_ms else 0.0,
            "hand_ms_median": statistics.median(self.hand_ms) if self.hand_ms else 0.0,
            "deck_ms_mean": statistics.fmean(self.deck_ms) if self.deck_ms else 0.0,
            "deck_ms_median": statistics.median(self.deck_ms) if self.deck_ms else 0.0,
        }


@dataclass
class ResultTable:
    cells: dict[tuple[str, str], Cell]
    ci_method: str = "wald"

    def cell(self, hand_label: str, deck_label: str) -> Cell:
        return self.cells[(hand_label, deck_label)]

    def rows(self) -> list[dict]:
        return [cell.row(self.ci_method) for cell in self.cells.values()]

    def to_csv(self) -> str:
        rows = self.rows()
        if not rows:
            return ""
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()

    def strategy_scoreboard(self) -> list[dict]:
        """Per-strategy win/loss/tie over all cells it appears in."""
        agg: dict[str, dict] = {}
        for (hand, deckl), cell in self.cells.items():
            for label, wins, losses in (
                (hand, cell.hand_wins, cell.deck_wins),
                (deckl, cell.deck_wins, cell.hand_wins),
            ):
                entry = agg.setdefault(
                    label, {"strategy": label, "wins": 0, "losses": 0,
                            "ties": 0, "n": 0}
                )
                entry["wins"] += wins
                entry["losses"] += losses
                entry["ties"] += cell.ties
                entry["n"] += cell.n
        for entry in agg.values():
            entry["win_rate"] = entry["wins"] / entry["n"] if entry["n"] else 0.0
        return sorted(agg.values(), key=lambda e: -e["win_rate"])

    def summary_text(self) -> str:
        """Hand-team win/loss/tie grids, one block per metric."""
        hands = sorted({h for h, _ in self.cells})
        decks = sorted({d for _, d in self.cells})
        blocks = []
        for title, picker in (
            ("Winning rates of the hand team", lambda c: c.hand_wins),
            ("Losing rates of the hand team", lambda c: c.deck_wins),
            ("Tying rates", lambda c: c.ties),
        ):
            lines = [title]
            corner = "hand / deck"
            header = f"{corner:>28} | " + " | ".join(
                f"{d[:22]:>22}" for d in decks
            )
            lines.append(header)
            for h in hands:
                row = [f"{h[:28]:>28}"]
                for d in decks:
                    cell = self.cells.get((h, d))
                    if cell is None:
                        row.append(f"{'-':>22}")
                        continue
                    ci = wald_ci(picker(cell), cell.n)
                    row.append(
                        f"{picker(cell) / cell.n:7.1%} [{ci[0]:.1%}-{ci[1]:.1%}]".rjust(22)
                    )
                lines.append(" | ".join(row))
            blocks.append("\n".join(lines))
        board = ["Scoreboard"]
        for e in self.strategy_scoreboard():
            board.append(
                f"  {e['strategy'][:46]:<46} wins {e['wins'] / e['n']:6.1%}"
                f"  losses {e['losses'] / e['n']:6.1%}"
                f"  ties {e['ties'] / e['n']:6.1%}  (n={e['n']})"
            )
        blocks.append("\n".join(board))
        return "\n\n".join(blocks) + "\n"


def run_match(deal_result: DealResult, hand_strategy, deck_strategy,
              seed: int, deal_seed: Optional[int] = None) -> MatchRecord:
    """Play one match: seats 0,2 use the hand strategy, 1,3 the deck one.

    Fair players receive only their view; the cheating search player is
    handed the full state. Deterministic in (deal, strategies, seed).
    """
    if isinstance(hand_strategy, str):
        hand_strategy = parse_strategy(hand_strategy)
    if isinstance(deck_strategy, str):
        deck_strategy = parse_strategy(deck_strategy)
    players = [
        Player(hand_strategy if seat % 2 == 0 else deck_strategy, seat)
        for seat in range(4)
    ]
    rngs = [SplitMix64(mix64(seed, seat)) for seat in range(4)]
    state = MatchState.from_deal(deal_result)
    seat_ms = [0.0, 0.0, 0.0, 0.0]
    seat_moves = [0, 0, 0, 0]
    while not state.is_over:
        seat = state.current_seat
        view = view_for(state, seat)
        full = state if players[seat].spec.is_cheating else None
        t0 = time.perf_counter()
        move = players[seat].choose(full, view, rngs[seat])
        seat_ms[seat] += (time.perf_counter() - t0) * 1000.0
        seat_moves[seat] += 1
        state = apply_move(state, move)
    totals = score_match(state).totals
    return MatchRecord(
        hand_label=hand_strategy.label(),
        deck_label=deck_strategy.label(),
        deck_index=-1,
        repeat=0,
        totals=totals,
        log_text=format_match(deal_result, state, seed=deal_seed),
        seat_ms=tuple(ms / max(1, n) for ms, n in zip(seat_ms, seat_moves)),
    )


def _run_task(args) -> tuple[int, MatchRecord]:
    pairing_idx, hand_text, deck_text, deck_seed_val, deck_idx, rep, match_seed = args
    record = run_match(
        deal(deck_seed_val),
        hand_text,
        deck_text,
        match_seed,
        deal_seed=deck_seed_val,
    )
    record.deck_index = deck_idx
    record.repeat = rep
    return pairing_idx, record


def expand_pairings(plan: ExperimentPlan) -> list[tuple[str, str]]:
    pairings = list(plan.pairings)
    if plan.symmetric:
        for hand, deckl in plan.pairings:
            if (deckl, hand) not in pairings:
                pairings.append((deckl, hand))
    return pairings


def run_plan(plan: ExperimentPlan, progress: bool = False) -> ResultTable:
    """Execute all pairings x decks x repeats, possibly in parallel."""
    pairings = expand_pairings(plan)
    specs = {
        text: parse_strategy(text)
        for pair in pairings
        for text in pair
    }
    tasks = []
    for p_idx, (hand_text, deck_text) in enumerate(pairings):
        stochastic = specs[hand_text].is_stochastic or specs[deck_text].is_stochastic
        reps = plan.repeats if stochastic else 1
        for deck_idx in range(plan.deck_count):
            deck_seed_val = mix64(plan.deck_seed, deck_idx)
            for rep in range(reps):
                tasks.append((
                    p_idx, hand_text, deck_text, deck_seed_val, deck_idx, rep,
                    mix64(plan.seed, p_idx, deck_idx, rep),
                ))

    cells = {
        pair: Cell(hand_label=specs[pair[0]].label(),
                   deck_label=specs[pair[1]].label())
        for pair in pairings
    }
    out_dir = Path(plan.out_dir) if plan.out_dir else None
    log_file = None
    if out_dir and plan.keep_logs:
        out_dir.mkdir(parents=True, exist_ok=True)
        log_file = (out_dir / "matches.log").open("w")

    workers = plan.parallelism or os.cpu_count() or 1
    done = 0

    def consume(p_idx: int, record: MatchRecord):
        nonlocal done
        cells[pairings[p_idx]].add(record)
        if log_file:
            log_file.write(
                f"# pairing={record.hand_label} vs {record.deck_label}"
                f" deck={record.deck_index} rep={record.repeat}\n"
            )
            log_file.write(record.log_text)
        done += 1
        if progress and done % 200 == 0:
            print(f"  {done}/{len(tasks)} matches", flush=True)

    if workers <= 1 or len(tasks) < 8:
        for task in tasks:
            consume(*_run_task(task))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for p_idx, record in pool.map(_run_task, tasks, chunksize=8):
                consume(p_idx, record)
    if log_file:
        log_file.close()

    table = ResultTable(cells={
        (cells[pair].hand_label, cells[pair].deck_label): cells[pair]
        for pair in pairings
    }, ci_method=plan.ci_method)
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "results.csv").write_text(table.to_csv())
        (out_dir / "summary.txt").write_text(table.summary_text())
    return table


SWEEP_AXES = ("uct_c", "reward", "sim", "epsilon", "iterations", "determinizator")


def apply_axis(spec: StrategySpec, axis: str, value) -> StrategySpec:
    if spec.search is None:
        raise ValueError("sweep axis applies to search strategies only")
    cfg = spec.search
    if axis == "uct_c":
        cfg = replace(cfg, uct_c=float(value))
    elif axis == "reward":
        cfg = replace(cfg, reward_fn=str(value))
    elif axis == "sim":
        cfg = replace(cfg, sim_strategy=str(value))
    elif axis == "epsilon":
        cfg = replace(cfg, sim_strategy="egs", epsilon=float(value))
    elif axis == "iterations":
        cfg = replace(cfg, iterations=int(value))
    elif axis == "determinizator":
        cfg = replace(cfg, determinizator=str(value))
    else:
        raise ValueError(f"unknown sweep axis: {axis}")
    return StrategySpec(kind=spec.kind, search=cfg)


def sweep(axis: str, values: Sequence, variant: str, baseline: str,
          plan: ExperimentPlan, progress: bool = False):
    """Run the variant against the fixed baseline for each axis value.

    Returns (rows, tables): one plot-ready row per value with the
    variant's win rates and standard errors in both roles.
    """
    base_spec = parse_strategy(variant)
    rows = []
    tables = {}
    for value in values:
        spec = apply_axis(base_spec, axis, value)
        label = spec.label()
        value_plan = replace(
            plan,
            pairings=((label, baseline), (baseline, label)),
            symmetric=False,
            out_dir=None,
        )
        table = run_plan(value_plan, progress=progress)
        as_hand = table.cell(label, parse_strategy(baseline).label())
        as_deck = table.cell(parse_strategy(baseline).label(), label)
        n_h, n_d = as_hand.n, as_deck.n
        p_hand = as_hand.hand_wins / n_h
        p_deck = as_deck.deck_wins / n_d
        rows.append({
            "axis": axis,
            "value": value,
            "variant": label,
            "baseline": baseline,
            "hand_win_rate": p_hand,
            "hand_se": math.sqrt(p_hand * (1 - p_hand) / n_h),
            "deck_win_rate": p_deck,
            "deck_se": math.sqrt(p_deck * (1 - p_deck) / n_d),
            "n_hand": n_h,
            "n_deck": n_d,
        })
        tables[value] = table
    return rows, tables


def sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def sample_timing_states(count: int, seed: int = 4242) -> list[MatchState]:
    """Mid-game states for timing probes (random play, depth 6..24)."""
    states = []
    idx = 0
    while len(states) < count:
        rng = SplitMix64(mix64(seed, idx))
        state = MatchState.from_deal(deal(mix64(seed, idx, 1)))
        depth = 6 + rng.below(19)
        for _ in range(depth):
            moves = legal_moves(state)
            state = apply_move(state, moves[rng.below(len(moves))])
        states.append(state)
        idx += 1
    return states


def measure_timing(strategy: str, iterations_list: Sequence[int],
                   samples: int = 1000, seed: int = 99) -> list[dict]:
    """Mean/median per-move decision time per iteration count."""
    if samples <= 0:
        raise ValueError("samples must be positive")
    spec = parse_strategy(strategy)
    if spec.search is None:
        raise ValueError("timing sweep applies to search strategies")
    states = sample_timing_states(samples)
    rows = []
    for iters in iterations_list:
        variant = apply_axis(spec, "iterations", iters)
        times = []
        for i, state in enumerate(states):
            player = Player(variant, state.current_seat)
            view = view_for(state, state.current_seat)
            full = state if variant.is_cheating else None
            rng = SplitMix64(mix64(seed, iters, i))
            t0 = time.perf_counter()
            player.choose(full, view, rng)
            times.append((time.perf_counter() - t0) * 1000.0)
        rows.append({
            "strategy": variant.label(),
            "iterations": iters,
            "samples": samples,
            "mean_ms": statistics.fmean(times),
            "median_ms": statistics.median(times),
            "stderr_ms": (
                statistics.stdev(times) / math.sqrt(len(times))
                if len(times) > 1
                else 0.0
            ),
        })
    return rows
