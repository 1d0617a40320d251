"""Defects of the discrete pair under M-refinement, with observed orders.

    python3 scripts/convergence_study.py --family exponential --kappa 0.2 --T 2
"""

from __future__ import annotations

import argparse

import numpy as np

from calderon_states import calderon, oracle, state
from calderon_states.discretize import build_domain
from calderon_states.geometry import MetricFamily

QUANTITIES = ("sum", "idem", "purity", "green", "oracle")


def measure(family: MetricFamily, T: float, M: int, N: int) -> dict:
    dom = build_domain(T, M, N, family)
    pair, real, traces, mats = calderon.build_pair(dom, family)
    ident = calderon.identity_report(pair, mats)
    row = {
        "sum": ident.sum_defect,
        "idem": ident.idem_defect,
        "purity": state.purity_defect(state.covariances(pair, mats)),
        "green": calderon.relative_green_defect(real, traces, mats),
        "oracle": np.nan,
    }
    if family.kind.value == "ultrastatic":
        spec = oracle.spectrum_for(family, N)
        num = oracle.modal_blocks(pair.Cplus, spec)
        exact = np.array([oracle.calderon_closed_form(e, T) for e in spec.eps])
        row["oracle"] = float(np.max(np.abs(num - exact) / np.abs(exact)))
    return row


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--family", default="ultrastatic", choices=["ultrastatic", "exponential", "polynomial"])
    p.add_argument("--kappa", type=float, default=0.2)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--N", type=int, default=16)
    p.add_argument("--M", type=int, nargs="+", default=[50, 100, 200, 400, 800])
    args = p.parse_args()

    family = {"ultrastatic": MetricFamily.ultrastatic(),
              "exponential": MetricFamily.exponential(args.kappa),
              "polynomial": MetricFamily.polynomial(args.alpha)}[args.family]
    rows = [measure(family, args.T, M, args.N) for M in args.M]

    print(f"# {args.family} T={args.T:g} N={args.N}")
    print(f"{'M':>6} " + " ".join(f"{q:>11} {'p':>5}" for q in QUANTITIES))
    for i, (M, row) in enumerate(zip(args.M, rows)):
        cells = []
        for q in QUANTITIES:
            order = np.log2(rows[i - 1][q] / row[q]) / np.log2(M / args.M[i - 1]) if i else np.nan
            cells.append(f"{row[q]:11.3e} {order:5.2f}")
        print(f"{M:6d} " + " ".join(cells))


if __name__ == "__main__":
    main()
