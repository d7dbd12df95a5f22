"""Stable text encoding for match logs.

One match per log: a deal line, 36 move records, and a score line.
Used for experiment output, service persistence and replay tests.

    deal seed=42 dealer=3
    0 Jd 3s 5d
    1 As
    2 7c 2s 5h scopa
    ...
    score hand=4 deck=3 scope=1/3 cards=22/18 coins=5/5 settebello=1/0 primiera=78/73

A deal may also be spelled out explicitly (for determinized or
service-created matches):

    deal hands=Ad,2d,...|...|...|... table=3s,4c,5d,Qs dealer=3
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .cards import DealResult, deal as deal_cards, format_cards, parse_card, parse_cards
from .engine import MatchScore, MatchState, Move, replay, score_match


@dataclass(frozen=True)
class MatchLog:
    deal_seed: Optional[int]
    deal: DealResult
    moves: tuple[Move, ...]
    score: Optional[MatchScore]


def format_deal(deal: DealResult, seed: Optional[int] = None) -> str:
    if seed is not None:
        return f"deal seed={seed} dealer={deal.dealer_seat}"
    hands = "|".join(format_cards(h) for h in deal.hands)
    table = format_cards(deal.table)
    return f"deal hands={hands} table={table} dealer={deal.dealer_seat}"


def format_move(seat: int, move: Move, scopa: bool) -> str:
    parts = [str(seat), move.played.code()]
    parts.extend(c.code() for c in sorted(move.captured))
    if scopa:
        parts.append("scopa")
    return " ".join(parts)


def format_score(score: MatchScore) -> str:
    t0, t1 = score.teams
    return (
        f"score hand={t0.total_points} deck={t1.total_points}"
        f" scope={t0.scopa_count}/{t1.scopa_count}"
        f" cards={t0.cards_captured}/{t1.cards_captured}"
        f" coins={t0.coins_captured}/{t1.coins_captured}"
        f" settebello={int(t0.has_settebello)}/{int(t1.has_settebello)}"
        f" primiera={t0.primiera_sum}/{t1.primiera_sum}"
    )


def format_match(
    deal: DealResult,
    state: MatchState,
    seed: Optional[int] = None,
) -> str:
    """Render a finished (or in-progress) match as log text."""
    lines = [format_deal(deal, seed)]
    for index, entry in enumerate(state.history):
        is_scopa = (
            bool(entry.move.captured)
            and entry.move.captured == entry.table_before
            and index < 35
        )
        lines.append(format_move(entry.seat, entry.move, is_scopa))
    if state.is_over:
        lines.append(format_score(score_match(state)))
    return "\n".join(lines) + "\n"


def _parse_deal_line(line: str) -> tuple[DealResult, Optional[int]]:
    fields = dict(tok.split("=", 1) for tok in line.split()[1:])
    dealer = int(fields.get("dealer", "3"))
    if "seed" in fields:
        seed = int(fields["seed"])
        return deal_cards(seed, dealer), seed
    hands = tuple(parse_cards(part) for part in fields["hands"].split("|"))
    table = parse_cards(fields["table"])
    return DealResult(hands=hands, table=table, dealer_seat=dealer), None


def _parse_move_line(line: str) -> tuple[int, Move]:
    toks = line.split()
    if toks and toks[-1] == "scopa":
        toks = toks[:-1]
    seat = int(toks[0])
    played = parse_card(toks[1])
    captured = frozenset(parse_card(t) for t in toks[2:])
    return seat, Move(played, captured)


def parse_match(text: str) -> MatchLog:
    """Parse log text back into a deal and move list.

    The recorded score line, if present, is ignored in favor of
    rescoring on replay; `verify_log` checks they agree.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("deal"):
        raise ValueError("match log must start with a deal line")
    deal, seed = _parse_deal_line(lines[0])
    moves = []
    for line in lines[1:]:
        if line.startswith("score"):
            break
        moves.append(_parse_move_line(line)[1])
    state = replay(deal, moves)
    score = score_match(state) if state.is_over else None
    return MatchLog(deal_seed=seed, deal=deal, moves=tuple(moves), score=score)


def parse_score_line(line: str) -> tuple[int, int]:
    fields = dict(tok.split("=", 1) for tok in line.split()[1:] if "=" in tok)
    return int(fields["hand"]), int(fields["deck"])


def verify_log(text: str) -> MatchScore:
    """Replay a complete log and check the recorded score matches."""
    log = parse_match(text)
    if log.score is None:
        raise ValueError("log does not contain a complete match")
    score_lines = [ln for ln in text.splitlines() if ln.startswith("score")]
    if score_lines:
        recorded = parse_score_line(score_lines[0])
        if recorded != log.score.totals:
            raise ValueError(
                f"recorded score {recorded} != replayed {log.score.totals}"
            )
    return log.score
