"""Strategy identifiers, config-string parsing, and player construction.

The text encoding is shared by the experiments CLI and the service:

    random | greedy | cs | cg
    mcts:iters=1000,c=2.0,reward=sd,sim=egs(0.3),seed=7
    ismcts:iters=4000,c=2.0,reward=sd,sim=egs(0.3),det=cgs

Seeds in config strings are optional; match harnesses derive one per
decision from the match seed, so omitted seeds still give reproducible
runs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .engine import MatchState, Move, PlayerView
from .guessing import GuessState, guess_for_view, observe_move
from .ismcts import ismcts_choose
from .mcts import SearchConfig, mcts_choose
from .players import cg_choose, cs_choose, greedy_choose, random_choose
from .rng import SplitMix64

RULE_KINDS = ("random", "greedy", "cs", "cg")
SEARCH_KINDS = ("mcts", "ismcts")


@dataclass(frozen=True)
class StrategySpec:
    kind: str
    search: Optional[SearchConfig] = None

    def __post_init__(self):
        if self.kind not in RULE_KINDS + SEARCH_KINDS:
            raise ValueError(f"unknown strategy kind: {self.kind}")
        if self.kind in SEARCH_KINDS and self.search is None:
            raise ValueError(f"{self.kind} needs a search config")

    @property
    def is_stochastic(self) -> bool:
        return self.kind in ("random", "mcts", "ismcts")

    @property
    def is_cheating(self) -> bool:
        return self.kind == "mcts"

    def label(self) -> str:
        return format_strategy(self)


def _parse_sim(token: str) -> tuple[str, float]:
    m = re.fullmatch(r"(rs|crs|gs|egs)(?:\(([0-9.]+)\))?", token)
    if not m:
        raise ValueError(f"bad simulation strategy: {token}")
    return m.group(1), float(m.group(2)) if m.group(2) else 0.3


def parse_strategy(text: str) -> StrategySpec:
    text = text.strip()
    if ":" not in text:
        return StrategySpec(kind=text)
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    fields = {}
    for token in rest.split(","):
        token = token.strip()
        if not token:
            continue
        key, _, value = token.partition("=")
        fields[key.strip()] = value.strip()
    sim, epsilon = _parse_sim(fields.get("sim", "egs(0.3)"))
    cfg = SearchConfig(
        iterations=int(fields.get("iters", 1000)),
        uct_c=float(fields.get("c", 2.0)),
        reward_fn=fields.get("reward", "sd"),
        sim_strategy=sim,
        epsilon=epsilon,
        rng_seed=int(fields.get("seed", 0)),
        determinizator=fields.get("det", "random"),
    )
    return StrategySpec(kind=kind, search=cfg)


def format_strategy(spec: StrategySpec) -> str:
    if spec.search is None:
        return spec.kind
    cfg = spec.search
    sim = cfg.sim_strategy
    if sim == "egs":
        sim = f"egs({cfg.epsilon:g})"
    parts = [
        f"iters={cfg.iterations}",
        f"c={cfg.uct_c:g}",
        f"reward={cfg.reward_fn}",
        f"sim={sim}",
    ]
    if spec.kind == "ismcts":
        parts.append(f"det={cfg.determinizator}")
    return f"{spec.kind}:" + ",".join(parts)


class Player:
    """Per-match decision maker for one seat.

    Fair players consume the PlayerView only; the cheating search
    player is handed the full state. `choose` receives both plus a
    per-seat rng and dispatches accordingly.
    """

    def __init__(self, spec: StrategySpec, seat: int):
        self.spec = spec
        self.seat = seat
        self._gs: Optional[GuessState] = None
        self._seen_history = 0

    def _tracked_guess(self, view: PlayerView) -> GuessState:
        if self._gs is None or self._seen_history > len(view.history):
            self._gs = guess_for_view(view)
        else:
            gs = self._gs
            for entry in view.history[self._seen_history:]:
                gs = observe_move(gs, entry.seat, entry.table_before, entry.move)
            self._gs = gs
        self._seen_history = len(view.history)
        return self._gs

    def choose(self, state: MatchState, view: PlayerView, rng: SplitMix64) -> Move:
        kind = self.spec.kind
        if kind == "random":
            return random_choose(view, rng)
        if kind == "greedy":
            return greedy_choose(view)
        if kind == "cs":
            return cs_choose(view, self._tracked_guess(view))
        if kind == "cg":
            return cg_choose(view, self._tracked_guess(view))
        cfg = self.spec.search.with_seed(rng.next_u64())
        if kind == "mcts":
            return mcts_choose(state, cfg)
        return ismcts_choose(view, cfg)


# Paper-selected configurations, used as the default tournament roster
# and by the live service.
BEST_MCTS = "mcts:iters=1000,c=2.0,reward=sd,sim=egs(0.3)"
BEST_ISMCTS = "ismcts:iters=4000,c=2.0,reward=sd,sim=egs(0.3),det=cgs"
SERVICE_ROSTER = (
    "greedy",
    "cs",
    BEST_MCTS,
    "ismcts:iters=1000,c=2.0,reward=sd,sim=egs(0.3),det=cgs",
    BEST_ISMCTS,
)
