"""Record a real service session as a frontend test fixture.

Drives one blind-mode match through the live-match API with a
first-legal-move policy and records every payload the client would see:
creation response, per-turn views, submissions, acks, and the full
event stream. The web client's tests replay this through a mock service
so the UI is exercised against byte-identical payloads.

Scans seeds so the recorded match exercises all three move-picker
shapes: a placement (no options), a forced single capture, and a
multi-combination choice.
"""

import json
import pathlib
import sys
import tempfile

from fastapi.testclient import TestClient

from scopone.service import ServiceConfig, create_app


def drive_match(seed: int):
    with tempfile.TemporaryDirectory() as tmp:
        config = ServiceConfig(
            data_dir=tmp,
            delay_window=(0.0, 0.0),
            roster=("greedy",),
            seed=90210,
        )
        client = TestClient(create_app(config))
        created = client.post(
            "/matches", json={"mode": "blind_random", "seed": seed}
        ).json()
        mid, token = created["match_id"], created["token"]
        steps = []
        shapes = set()
        while True:
            view = client.get(
                f"/matches/{mid}/view", params={"token": token}
            ).json()
            if view["status"] == "finished":
                final_view = view
                break
            if not view["your_turn"]:
                import time

                time.sleep(0.003)
                continue
            moves = view["legal_moves"]
            move = moves[0]
            options = view["capture_options"][move["played"]]
            shapes.add(min(len(options), 2))
            ack = client.post(
                f"/matches/{mid}/moves", json={"token": token, **move}
            ).json()
            steps.append({"view": view, "submitted": move, "ack": ack})
        events = client.get(
            f"/matches/{mid}/events", params={"token": token, "after": -1}
        ).json()["events"]
        return {
            "seed": seed,
            "created": created,
            "steps": steps,
            "events": events,
            "final_view": final_view,
        }, shapes


def main():
    out_path = pathlib.Path(__file__).resolve().parents[1] / (
        "frontend/tests/fixtures/match_fixture.json"
    )
    for seed in range(200):
        fixture, shapes = drive_match(seed)
        if shapes == {0, 1, 2}:
            fixture["created"].pop("token", None)
            fixture["token"] = "fixture-token"
            out_path.parent.mkdir(parents=True, exist_ok=True)
            out_path.write_text(json.dumps(fixture, indent=1) + "\n")
            print(f"seed {seed}: wrote {out_path}")
            print(f"  {len(fixture['steps'])} human turns,"
                  f" {len(fixture['events'])} events")
            return 0
    print("no seed produced all three picker shapes", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
