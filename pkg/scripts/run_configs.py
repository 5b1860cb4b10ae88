"""Run every config in scripts/configs through the CLI, one output directory each.

    python scripts/run_configs.py [--out out] [--only perturb spike_limit ...]
"""

import argparse
import sys
from pathlib import Path

from schrolab import cli

HERE = Path(__file__).resolve().parent
SUBCOMMAND = {"hill_table": "hill-bound"}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="out")
    p.add_argument("--only", nargs="*")
    args = p.parse_args(argv)
    worst = 0
    for cfg in sorted((HERE / "configs").glob("*.cfg")):
        if args.only and cfg.stem not in args.only:
            continue
        sub = SUBCOMMAND.get(cfg.stem, cfg.stem.replace("_", "-"))
        print(f"== {cfg.stem} ({sub})")
        code = cli.main([sub, "--config", str(cfg), "--out", str(Path(args.out) / cfg.stem)])
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
