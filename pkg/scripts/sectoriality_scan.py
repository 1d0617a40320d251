"""Sectoriality margin of the reduced slab operator against the slab half-width.

For each ``T`` prints the admissibility verdict of the Wick domain check and,
when admissible, the smallest eigenvalue of the Hermitian part of ``W_H K0``.

    python3 scripts/sectoriality_scan.py --kappa 0.2
"""

from __future__ import annotations

import argparse

import numpy as np

from calderon_states import elliptic
from calderon_states.discretize import build_domain
from calderon_states.errors import DomainError
from calderon_states.geometry import MetricFamily, check_wick_domain, circle_grid


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--kappa", type=float, default=0.2)
    p.add_argument("--M", type=int, default=200)
    p.add_argument("--N", type=int, default=16)
    p.add_argument("--T", type=float, nargs="+", default=list(np.arange(0.5, 3.51, 0.25)))
    args = p.parse_args()
    fam = MetricFamily.exponential(args.kappa)
    report = check_wick_domain(fam, max(args.T), circle_grid(args.N))
    print(f"# exponential kappa={args.kappa:g}: largest admissible T = {report.max_admissible_T:.4f}")
    print(f"{'T':>6} {'min eig Herm(W_H K0)':>22}")
    for T in args.T:
        try:
            real = elliptic.assemble_K0(build_domain(T, args.M, args.N, fam), fam)
        except DomainError as exc:
            print(f"{T:6.2f} {'rejected':>22}  ({exc})")
            continue
        print(f"{T:6.2f} {elliptic.sectoriality_defect(real).min_herm_eig:22.4e}")


if __name__ == "__main__":
    main()
