"""Approach of the slab pair to the ground-state projector as the slab widens.

Prints, for the slowest and fastest circle modes, the distance of the numerical
and closed-form ``C+`` blocks to the ground-state block next to the bound
``2 (1 + eps + 1/eps) exp(-2 T eps)``.

    python3 scripts/ground_state_limit.py --T 0.5 1 2 3 4
"""

from __future__ import annotations

import argparse

import numpy as np

from calderon_states import calderon, oracle
from calderon_states.discretize import build_domain
from calderon_states.geometry import MetricFamily


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--T", type=float, nargs="+", default=[0.5, 1.0, 2.0, 3.0, 4.0])
    p.add_argument("--M", type=int, default=200)
    p.add_argument("--N", type=int, default=16)
    args = p.parse_args()
    fam = MetricFamily.ultrastatic()
    spec = oracle.spectrum_for(fam, args.N)
    picks = (int(np.argmin(spec.eps)), int(np.argmax(spec.eps)))
    print(f"{'T':>5} {'eps':>7} {'numerical':>11} {'closed':>11} {'bound':>11}")
    for T in args.T:
        dom = build_domain(T, args.M, args.N, fam)
        pair, *_ = calderon.build_pair(dom, fam)
        blocks = oracle.modal_blocks(pair.Cplus, spec)
        for k in picks:
            e = spec.eps[k]
            gs = oracle.ground_state_projector(e)
            num = np.linalg.norm(blocks[k] - gs, 2)
            exact = np.linalg.norm(oracle.calderon_closed_form(e, T) - gs, 2)
            print(f"{T:5.2f} {e:7.3f} {num:11.3e} {exact:11.3e} {oracle.ground_state_bound(e, T):11.3e}")


if __name__ == "__main__":
    main()
