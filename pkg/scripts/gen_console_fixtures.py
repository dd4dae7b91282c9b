"""Regenerate the console test fixtures from the indicator engine.

Run from the repo root:  python scripts/gen_console_fixtures.py
Writes frontend/tests/fixtures/telemetry_fixtures.json with one telemetry
message per color branch (pure low, low blend, plateau, high blend, pure
high) plus the config hello message.
"""

import json
from pathlib import Path

from ubtelesim.config import SessionConfig
from ubtelesim.rti import render_sample
from ubtelesim.server import config_message

BRANCH_TAUS = {
    "pure-low": 0.10,
    "low-blend": 0.18,
    "plateau": 0.30,
    "high-blend": 0.43,
    "pure-high": 0.55,
}


def main():
    config = SessionConfig()
    fixtures = {"config": config_message(config), "telemetry": []}
    for branch, tau in BRANCH_TAUS.items():
        out = render_sample(tau, config.rti)
        fixtures["telemetry"].append({
            "branch": branch,
            "message": {
                "type": "telemetry",
                "t": 1.0,
                "tick": 1000,
                "tau_hat_j4": tau,
                "fill": out.fill_percent,
                "color": list(out.color),
                "zone": out.zone.value,
                "angles": {"leader": [0, 0, 0, 0.4], "follower": [0, 0, 0, 0.35]},
                "grip_target": tau,
            },
        })
    path = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures" / "telemetry_fixtures.json"
    path.write_text(json.dumps(fixtures, indent=2) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
