"""Live-match HTTP service for human-vs-AI play.

One human seat per match; the other three seats run a single AI
strategy, picked uniformly from the configured roster in blind mode and
never revealed to the client. AI turns run on a background thread off
the request path, and each AI move is published only after a randomized
total delay drawn from the configured window, so response latency does
not leak which strategy is playing.

Endpoints (JSON payloads, canonical card codes):

    POST /matches                     create a match, returns id + token
    GET  /matches/{id}/view           player view + server-enumerated moves
    POST /matches/{id}/moves          submit the human move
    GET  /matches/{id}/events         event stream: SSE with ?stream=1,
                                      JSON polling otherwise (?after=N)
    GET  /study/export                per-match records or the aggregate
                                      table (?aggregate=1), CSV

Persistence is append-only match logs in the engine log format plus a
JSON index; a restarted server replays unfinished logs and resumes.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import Body, FastAPI, HTTPException, Query
from fastapi.responses import PlainTextResponse, StreamingResponse

from .cards import DealResult, deal as deal_cards, parse_card
from .engine import (
    MatchScore,
    MatchState,
    Move,
    apply_move,
    legal_moves,
    score_match,
    view_for,
)
from .logformat import format_deal, format_move, format_score, parse_match
from .roster import SERVICE_ROSTER, Player, parse_strategy
from .rng import SplitMix64, mix64


@dataclass
class ServiceConfig:
    data_dir: Optional[str] = None
    delay_window: tuple[float, float] = (1.0, 4.0)
    roster: tuple[str, ...] = SERVICE_ROSTER
    seed: Optional[int] = None


def publish_delay(compute_seconds: float, window: tuple[float, float],
                  rng: SplitMix64) -> float:
    """Seconds to keep waiting before publishing an AI move.

    The observable latency is max(compute, target) with target uniform
    over the window, so any strategy whose compute time stays below the
    window's lower edge produces the same latency distribution.
    """
    target = rng.uniform(window[0], window[1])
    return max(0.0, target - compute_seconds)


@dataclass
class LiveMatch:
    match_id: str
    token: str
    human_seat: int
    strategy_text: str
    blind: bool
    deal: DealResult
    deal_seed: Optional[int]
    state: MatchState
    players: dict
    rng: SplitMix64
    target_score: Optional[int] = None
    game_score: list = field(default_factory=lambda: [0, 0])
    match_number: int = 0
    status: str = "awaiting_human"
    ai_running: bool = False
    events: list = field(default_factory=list)
    created_at: float = field(default_factory=time.time)
    finished_at: Optional[float] = None
    lock: threading.Lock = field(default_factory=threading.Lock)
    changed: threading.Condition = None

    def __post_init__(self):
        self.changed = threading.Condition(self.lock)

    def emit(self, event: dict) -> None:
        # callers hold the lock
        event["seq"] = len(self.events)
        self.events.append(event)
        self.changed.notify_all()


def _move_payload(seat: int, move: Move, scopa: bool,
                  table_before: frozenset, state_after: MatchState) -> dict:
    payload = {
        "type": "move",
        "seat": seat,
        "played": move.played.code(),
        "captured": [c.code() for c in sorted(move.captured)],
        "scopa": scopa,
    }
    if state_after.is_over and state_after.last_capturer is not None:
        # the stream must carry the end-of-match settlement so clients
        # can rebuild the board without rules knowledge
        if move.captured:
            leftover = table_before - move.captured
        else:
            leftover = table_before | {move.played}
        if leftover:
            payload["settled"] = [c.code() for c in sorted(leftover)]
            payload["settled_team"] = state_after.last_capturer % 2
    return payload


def _score_payload(score: MatchScore) -> dict:
    return {
        "hand_team": {
            "total": score.teams[0].total_points,
            "scope": score.teams[0].scopa_count,
            "cards": score.teams[0].cards_captured,
            "coins": score.teams[0].coins_captured,
            "settebello": score.teams[0].has_settebello,
            "primiera": score.teams[0].primiera_sum,
        },
        "deck_team": {
            "total": score.teams[1].total_points,
            "scope": score.teams[1].scopa_count,
            "cards": score.teams[1].cards_captured,
            "coins": score.teams[1].coins_captured,
            "settebello": score.teams[1].has_settebello,
            "primiera": score.teams[1].primiera_sum,
        },
    }


class MatchStore:
    """Append-only match logs plus a JSON index, enough to resume.

    Different matches write from different threads, so index flushes
    are serialized by a store-level lock (log appends touch per-match
    files and are already serialized by the match lock).
    """

    def __init__(self, data_dir: Optional[str]):
        self.dir = Path(data_dir) if data_dir else None
        self._lock = threading.Lock()
        if self.dir:
            (self.dir / "matches").mkdir(parents=True, exist_ok=True)
            self.index_path = self.dir / "index.json"
            if self.index_path.exists():
                self.index = json.loads(self.index_path.read_text())
            else:
                self.index = {}
        else:
            self.index = {}

    def _flush_index(self):
        if self.dir:
            with self._lock:
                text = json.dumps(self.index, indent=2)
                self.index_path.write_text(text)

    def log_path(self, match_id: str, match_number: int = 0) -> Optional[Path]:
        if not self.dir:
            return None
        suffix = f".{match_number}" if match_number else ""
        return self.dir / "matches" / f"{match_id}{suffix}.log"

    def register(self, match: LiveMatch) -> None:
        self.index[match.match_id] = {
            "token": match.token,
            "human_seat": match.human_seat,
            "strategy": match.strategy_text,
            "blind": match.blind,
            "status": match.status,
            "deal_seed": match.deal_seed,
            "target_score": match.target_score,
            "match_number": match.match_number,
            "created_at": match.created_at,
            "finished_at": None,
            "outcome": None,
            "duration_s": None,
            "totals": None,
        }
        self._flush_index()
        path = self.log_path(match.match_id, match.match_number)
        if path:
            path.write_text(format_deal(match.deal, match.deal_seed) + "\n")

    def append_move(self, match: LiveMatch, seat: int, move: Move,
                    scopa: bool) -> None:
        path = self.log_path(match.match_id, match.match_number)
        if path:
            with path.open("a") as fh:
                fh.write(format_move(seat, move, scopa) + "\n")

    def start_next_match(self, match: LiveMatch) -> None:
        entry = self.index.get(match.match_id)
        if entry is not None:
            entry["match_number"] = match.match_number
            entry["human_seat"] = match.human_seat
            entry["deal_seed"] = match.deal_seed
            self._flush_index()
        path = self.log_path(match.match_id, match.match_number)
        if path:
            path.write_text(format_deal(match.deal, match.deal_seed) + "\n")

    def finalize(self, match: LiveMatch, score: MatchScore,
                 outcome: str) -> None:
        path = self.log_path(match.match_id, match.match_number)
        if path:
            with path.open("a") as fh:
                fh.write(format_score(score) + "\n")
        entry = self.index.get(match.match_id)
        if entry is not None:
            entry["status"] = match.status
            entry["finished_at"] = match.finished_at
            entry["outcome"] = outcome
            entry["totals"] = list(score.totals)
            entry["duration_s"] = (
                None if match.finished_at is None
                else match.finished_at - match.created_at
            )
            self._flush_index()

    def update_status(self, match: LiveMatch) -> None:
        entry = self.index.get(match.match_id)
        if entry is not None and entry["status"] != match.status:
            entry["status"] = match.status
            self._flush_index()

    def recoverable(self) -> list[dict]:
        return [
            {**meta, "match_id": mid}
            for mid, meta in self.index.items()
            if meta.get("status") != "finished"
        ]

    def read_log(self, match_id: str, match_number: int = 0) -> Optional[str]:
        path = self.log_path(match_id, match_number)
        if path and path.exists():
            return path.read_text()
        return None


def create_app(config: Optional[ServiceConfig] = None) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="scopone live-match service", version="1")
    store = MatchStore(config.data_dir)
    matches: dict[str, LiveMatch] = {}
    service_rng = SplitMix64(
        config.seed if config.seed is not None else time.time_ns()
    )
    registry_lock = threading.Lock()

    def build_players(match: LiveMatch) -> None:
        spec = parse_strategy(match.strategy_text)
        match.players = {
            seat: Player(spec, seat)
            for seat in range(4)
            if seat != match.human_seat
        }

    def human_outcome(match: LiveMatch, score: MatchScore) -> str:
        winner = score.winner()
        if winner is None:
            return "tie"
        return "win" if winner == (match.human_seat % 2) else "loss"

    def finish_match(match: LiveMatch) -> None:
        # lock held
        score = score_match(match.state)
        team = [score.teams[0].total_points, score.teams[1].total_points]
        match.game_score[0] += team[0]
        match.game_score[1] += team[1]
        outcome = human_outcome(match, score)
        match.emit({"type": "score", "score": _score_payload(score),
                    "game_score": list(match.game_score)})
        target = match.target_score
        game_over = target is None or (
            max(match.game_score) >= target
            and match.game_score[0] != match.game_score[1]
        )
        if game_over:
            match.status = "finished"
            match.finished_at = time.time()
            store.finalize(match, score, outcome)
            match.emit({"type": "status", "status": match.status})
            return
        # next match of the same game: players rotate one seat along
        store.finalize(match, score, outcome)
        match.match_number += 1
        match.human_seat = (match.human_seat + 1) % 4
        seed = service_rng.next_u64()
        match.deal_seed = seed
        match.deal = deal_cards(seed)
        match.state = MatchState.from_deal(match.deal)
        build_players(match)
        store.start_next_match(match)
        match.emit({
            "type": "new_match",
            "match_number": match.match_number,
            "human_seat": match.human_seat,
            "game_score": list(match.game_score),
        })
        schedule_ai(match)

    def apply_and_emit(match: LiveMatch, move: Move) -> None:
        # lock held
        seat = match.state.current_seat
        table_before = match.state.table
        match.state = apply_move(match.state, move)
        scopa = (
            bool(move.captured)
            and move.captured == table_before
            and match.state.turn_index <= 35
        )
        store.append_move(match, seat, move, scopa)
        match.emit(_move_payload(seat, move, scopa, table_before, match.state))
        if match.state.is_over:
            finish_match(match)

    def run_ai_turns(match: LiveMatch) -> None:
        # ai_running is cleared inside the same locked region that
        # decides to stop, so a human move can never observe a stale
        # "worker still running" flag.
        try:
            while True:
                with match.lock:
                    if match.status == "finished" or match.state.is_over:
                        match.ai_running = False
                        return
                    state = match.state
                    if state.current_seat == match.human_seat:
                        match.status = "awaiting_human"
                        store.update_status(match)
                        match.ai_running = False
                        match.changed.notify_all()
                        return
                    seat = state.current_seat
                    player = match.players[seat]
                    decision_rng = SplitMix64(match.rng.next_u64())
                    delay_rng = SplitMix64(match.rng.next_u64())
                t0 = time.perf_counter()
                view = view_for(state, seat)
                full = state if player.spec.is_cheating else None
                move = player.choose(full, view, decision_rng)
                compute = time.perf_counter() - t0
                time.sleep(publish_delay(compute, config.delay_window, delay_rng))
                with match.lock:
                    if match.status == "finished":
                        match.ai_running = False
                        return
                    apply_and_emit(match, move)
        except BaseException:
            with match.lock:
                match.ai_running = False
                match.changed.notify_all()
            raise

    def schedule_ai(match: LiveMatch) -> None:
        # lock held. The running worker keeps ownership across match
        # rollovers, so scheduling is idempotent: at most one worker
        # drives a match at any time.
        if match.status == "finished":
            return
        if match.state.current_seat != match.human_seat:
            match.status = "ai_thinking"
            store.update_status(match)
            if not match.ai_running:
                match.ai_running = True
                threading.Thread(target=run_ai_turns, args=(match,),
                                 daemon=True).start()
        else:
            match.status = "awaiting_human"
            store.update_status(match)

    def get_match(match_id: str, token: str) -> LiveMatch:
        match = matches.get(match_id)
        if match is None:
            raise HTTPException(status_code=404, detail="unknown match")
        if token != match.token:
            raise HTTPException(status_code=403, detail="bad token")
        return match

    def recover():
        for meta in store.recoverable():
            text = store.read_log(meta["match_id"], meta.get("match_number", 0))
            if text is None:
                continue
            try:
                log = parse_match(text)
            except (ValueError, KeyError):
                continue
            state = MatchState.from_deal(log.deal)
            for move in log.moves:
                state = apply_move(state, move)
            match = LiveMatch(
                match_id=meta["match_id"],
                token=meta["token"],
                human_seat=meta["human_seat"],
                strategy_text=meta["strategy"],
                blind=meta.get("blind", True),
                deal=log.deal,
                deal_seed=meta.get("deal_seed"),
                state=state,
                players={},
                rng=SplitMix64(service_rng.next_u64()),
                target_score=meta.get("target_score"),
                match_number=meta.get("match_number", 0),
                created_at=meta.get("created_at", time.time()),
            )
            build_players(match)
            # replay history into the event stream so clients can resync
            with match.lock:
                replay_state = MatchState.from_deal(log.deal)
                for move in log.moves:
                    table_before = replay_state.table
                    seat = replay_state.current_seat
                    replay_state = apply_move(replay_state, move)
                    scopa = (
                        bool(move.captured)
                        and move.captured == table_before
                        and replay_state.turn_index <= 35
                    )
                    match.emit(
                        _move_payload(seat, move, scopa, table_before,
                                      replay_state)
                    )
                matches[match.match_id] = match
                if match.state.is_over:
                    finish_match(match)
                else:
                    schedule_ai(match)

    recover()

    @app.post("/matches")
    def create_match(body: dict = Body(default={})):
        mode = body.get("mode", "blind_random")
        if mode not in ("blind_random", "explicit"):
            raise HTTPException(status_code=400, detail="invalid mode")
        if mode == "explicit":
            strategy_text = body.get("strategy")
            if not strategy_text:
                raise HTTPException(status_code=400,
                                    detail="explicit mode needs a strategy")
            try:
                parse_strategy(strategy_text)
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc))
        else:
            strategy_text = config.roster[service_rng.below(len(config.roster))]
        seed = body.get("seed")
        with registry_lock:
            match_rng = SplitMix64(
                mix64(seed) if seed is not None else service_rng.next_u64()
            )
            deal_seed = match_rng.next_u64()
            human_seat = match_rng.below(4)
            result = deal_cards(deal_seed)
            match = LiveMatch(
                match_id=uuid.uuid4().hex[:12],
                token=uuid.uuid4().hex,
                human_seat=human_seat,
                strategy_text=strategy_text,
                blind=mode == "blind_random",
                deal=result,
                deal_seed=deal_seed,
                state=MatchState.from_deal(result),
                players={},
                rng=match_rng,
                target_score=body.get("target_score"),
            )
            build_players(match)
            matches[match.match_id] = match
            store.register(match)
        with match.lock:
            schedule_ai(match)
        payload = {
            "match_id": match.match_id,
            "token": match.token,
            "human_seat": match.human_seat,
            "mode": mode,
        }
        if mode == "explicit":
            payload["strategy"] = strategy_text
        return payload

    @app.get("/matches/{match_id}/view")
    def get_view(match_id: str, token: str = Query(...)):
        match = get_match(match_id, token)
        with match.lock:
            state = match.state
            seat = match.human_seat
            view = view_for(state, seat)
            my_turn = (
                match.status == "awaiting_human"
                and state.current_seat == seat
                and not state.is_over
            )
            moves = (
                [
                    {
                        "played": m.played.code(),
                        "captured": [c.code() for c in sorted(m.captured)],
                    }
                    for m in legal_moves(state)
                ]
                if my_turn
                else []
            )
            options: dict[str, list[list[str]]] = {}
            for m in moves:
                options.setdefault(m["played"], [])
                if m["captured"]:
                    options[m["played"]].append(m["captured"])
            payload = {
                "match_id": match.match_id,
                "status": match.status,
                "match_number": match.match_number,
                "human_seat": seat,
                "current_seat": state.current_seat,
                "turn_index": state.turn_index,
                "your_turn": my_turn,
                "hand": [c.code() for c in sorted(view.hand)],
                "table": [c.code() for c in sorted(view.table)],
                "piles": {
                    "hand_team": [c.code() for c in sorted(view.piles[0])],
                    "deck_team": [c.code() for c in sorted(view.piles[1])],
                },
                "scope": {
                    "hand_team": [c.code() for c in view.scope[0]],
                    "deck_team": [c.code() for c in view.scope[1]],
                },
                "hand_sizes": list(view.hand_sizes),
                "last_capturer": view.last_capturer,
                "legal_moves": moves,
                "capture_options": options,
                "game_score": {
                    "hand_team": match.game_score[0],
                    "deck_team": match.game_score[1],
                    "target": match.target_score,
                },
                "events_seen": len(match.events),
            }
            if state.is_over:
                payload["score"] = _score_payload(score_match(state))
            return payload

    @app.post("/matches/{match_id}/moves")
    def submit_move(match_id: str, body: dict = Body(...)):
        match = get_match(match_id, body.get("token", ""))
        try:
            played = parse_card(body.get("played", ""))
            captured = frozenset(
                parse_card(c) for c in body.get("captured", [])
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        move = Move(played, captured)
        with match.lock:
            if match.status == "finished" or match.state.is_over:
                raise HTTPException(status_code=410, detail="match finished")
            if (
                match.status != "awaiting_human"
                or match.state.current_seat != match.human_seat
            ):
                raise HTTPException(status_code=409, detail="not your turn")
            legal = legal_moves(match.state)
            if move not in legal:
                raise HTTPException(
                    status_code=400,
                    detail={
                        "error": "illegal move",
                        "legal_moves": [
                            {
                                "played": m.played.code(),
                                "captured": [
                                    c.code() for c in sorted(m.captured)
                                ],
                            }
                            for m in legal
                        ],
                    },
                )
            apply_and_emit(match, move)
            schedule_ai(match)
            return {
                "accepted": True,
                "status": match.status,
                "turn_index": match.state.turn_index,
            }

    @app.get("/matches/{match_id}/events")
    def get_events(match_id: str, token: str = Query(...),
                   after: int = Query(-1), wait: float = Query(0.0),
                   stream: int = Query(0)):
        match = get_match(match_id, token)
        if not stream:
            deadline = time.time() + min(wait, 30.0)
            with match.lock:
                while (
                    len(match.events) <= after + 1
                    and match.status != "finished"
                    and time.time() < deadline
                ):
                    match.changed.wait(timeout=0.05)
                events = [e for e in match.events if e["seq"] > after]
                return {
                    "events": events,
                    "next": len(match.events) - 1,
                    "status": match.status,
                }

        def sse():
            cursor = after
            while True:
                with match.lock:
                    while (
                        len(match.events) <= cursor + 1
                        and match.status != "finished"
                    ):
                        match.changed.wait(timeout=0.1)
                    chunk = [e for e in match.events if e["seq"] > cursor]
                    finished = match.status == "finished"
                if chunk:
                    cursor = chunk[-1]["seq"]
                    for event in chunk:
                        yield f"id: {event['seq']}\ndata: {json.dumps(event)}\n\n"
                if finished and not chunk:
                    return

        return StreamingResponse(sse(), media_type="text/event-stream")

    @app.get("/study/export")
    def export_study(aggregate: int = Query(0),
                     strategy: Optional[str] = Query(None),
                     outcome: Optional[str] = Query(None)):
        finished = [
            {**meta, "match_id": mid}
            for mid, meta in store.index.items()
            if meta.get("status") == "finished"
            and (strategy is None or meta.get("strategy") == strategy)
            and (outcome is None or meta.get("outcome") == outcome)
        ]
        if not aggregate:
            lines = ["match_id,strategy,human_seat,outcome,duration_s"]
            for meta in sorted(finished, key=lambda m: m.get("created_at", 0)):
                duration = meta.get("duration_s")
                lines.append(
                    f"{meta['match_id']},{meta['strategy']},{meta['human_seat']},"
                    f"{meta['outcome']},"
                    f"{'' if duration is None else f'{duration:.3f}'}"
                )
            return PlainTextResponse("\n".join(lines) + "\n",
                                     media_type="text/csv")
        per = {}
        for meta in finished:
            entry = per.setdefault(
                meta["strategy"], {"win": 0, "loss": 0, "tie": 0}
            )
            entry[meta["outcome"]] += 1
        lines = ["strategy,human_wins,human_losses,ties,n,win_rate,loss_rate,tie_rate"]
        for strategy in sorted(per):
            e = per[strategy]
            n = e["win"] + e["loss"] + e["tie"]
            lines.append(
                f"{strategy},{e['win']},{e['loss']},{e['tie']},{n},"
                f"{e['win'] / n:.4f},{e['loss'] / n:.4f},{e['tie'] / n:.4f}"
            )
        return PlainTextResponse("\n".join(lines) + "\n", media_type="text/csv")

    app.state.matches = matches
    app.state.store = store
    app.state.config = config
    return app
