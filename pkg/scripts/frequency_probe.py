"""Negative-frequency content of evolved Calderon range data, mode by mode.

    python3 scripts/frequency_probe.py --T 1 --M 200
"""

from __future__ import annotations

import argparse

import numpy as np

from calderon_states import cli
from calderon_states.config import parse_config


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--M", type=int, default=200)
    p.add_argument("--dt", type=float, default=2e-3)
    args = p.parse_args()
    cfg = parse_config(f"disc.T = {args.T}\ndisc.M = {args.M}\nevolution.dt = {args.dt}\n")
    eps, measured, expected = cli.frequency_ratios(cfg)
    value, bound, ok = cli.frequency_check(eps, measured, expected, cfg.disc.T, cfg.tol)
    print(f"{'k':>3} {'eps':>8} {'|B/A|':>11} {'exp(-2Te)':>11} {'checked':>11} {'bound':>7}  ok")
    for k in np.argsort(eps):
        print(f"{k:3d} {eps[k]:8.4f} {measured[k]:11.4e} {expected[k]:11.4e} {value[k]:11.3e} "
              f"{bound[k]:7.0e}  {bool(ok[k])}")


if __name__ == "__main__":
    main()
