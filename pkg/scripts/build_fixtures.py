#!/usr/bin/env python3
"""Regenerate fixtures/<name>/: metadata dumps plus the ingested graph store."""

from __future__ import annotations

import sys
from pathlib import Path

from licenserec.cli import main as cli_main
from licenserec.fixtures import BUNDLED

ROOT = Path(__file__).resolve().parents[1] / "fixtures"


def main() -> int:
    for name, build in BUNDLED.items():
        out = ROOT / name
        build().write(out)
        code = cli_main([
            "ingest", "--datasets", str(out / "datasets.jsonl"), "--models", str(out / "models.jsonl"),
            "--repos", str(out / "repos.jsonl"), "--out", str(out),
        ])
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
