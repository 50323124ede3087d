#!/usr/bin/env python3
"""Run the bundled scenario transcripts against their fixture KBs.

Each scenario is a transcript under scenarios/ paired with a KB under
fixtures/.  Exits nonzero if any run fails, so this doubles as a quick
end-to-end check after editing fixtures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from frameground.cli import main as cli_main  # noqa: E402

SCENARIOS = [
    ("jacob", ROOT / "scenarios" / "jacob.txt", ROOT / "fixtures" / "jacob"),
    ("motors", ROOT / "scenarios" / "motors.txt", ROOT / "fixtures" / "motors"),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trace", action="store_true",
                        help="dump pipeline traces while running")
    parser.add_argument("--emit-events", action="store_true",
                        help="print each run's canonical event log")
    args = parser.parse_args()

    worst = 0
    for name, transcript, kb in SCENARIOS:
        print(f"=== {name} ===")
        argv = ["run", str(transcript), "--kb", str(kb)]
        if args.trace:
            argv.append("--trace")
        if args.emit_events:
            argv.append("--emit-events")
        code = cli_main(argv)
        print(f"=== {name}: {'ok' if code == 0 else f'exit {code}'} ===")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
