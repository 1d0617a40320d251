"""Compare one-sided normal-derivative stencils by the sum defect of the pair.

Three ways to approximate ``d_s u(0+)`` from nodes strictly inside ``s > 0``:

* ``poly``: derivative at 0 of the polynomial through ``u_1..u_5``;
* ``centered``: centered differences at nodes ``2..6`` extrapolated to 0;
* ``midpoint``: differences ``(u_{m+1} - u_m)/ds`` at ``m + 1/2``, ``m = 1..5``,
  extrapolated to 0 (the package default).

    python3 scripts/trace_stencil_study.py
"""

from __future__ import annotations

import argparse
import dataclasses

import numpy as np

from calderon_states import calderon
from calderon_states.calderon import _trace_matrix, extrapolation_weights
from calderon_states.discretize import build_domain
from calderon_states.geometry import MetricFamily

WIDTH = 5


def derivative_weights(kind: str) -> np.ndarray:
    """Coefficients ``c_m`` (in units of ``1/ds``) with ``d_s u(0+) ~ sum_m c_m u_m``."""
    c = np.zeros(WIDTH + 3)
    if kind == "poly":
        nodes = np.arange(1, WIDTH + 1, dtype=float)
        V = np.vander(nodes, increasing=True).T
        e1 = np.zeros(WIDTH)
        e1[1] = 1.0
        c[1:WIDTH + 1] = np.linalg.solve(V, e1)
    elif kind == "centered":
        for m, w in zip(range(2, WIDTH + 2), extrapolation_weights(np.arange(2, WIDTH + 2))):
            c[m + 1] += 0.5 * w
            c[m - 1] -= 0.5 * w
    elif kind == "midpoint":
        for m, w in zip(range(1, WIDTH + 1), extrapolation_weights(np.arange(1, WIDTH + 1) + 0.5)):
            c[m + 1] += w
            c[m] -= w
    else:
        raise ValueError(kind)
    return c


def traces_with(domain, kind: str) -> calderon.TraceMaps:
    base = calderon.trace_maps(domain)
    j0, ds = domain.zero_index, domain.ds
    wv = extrapolation_weights(np.arange(1, WIDTH + 1))
    value = list(zip(range(1, WIDTH + 1), wv))
    nz = [(m, w / ds) for m, w in enumerate(derivative_weights(kind)) if w != 0.0]
    plus = _trace_matrix(domain, [(j0 + k, w) for k, w in value], [(j0 + m, -w) for m, w in nz])
    minus = _trace_matrix(domain, [(j0 - k, w) for k, w in value], [(j0 - m, w) for m, w in nz])
    return dataclasses.replace(base, gamma_plus=plus, gamma_minus=minus)


def sum_defect(family: MetricFamily, T: float, M: int, kind: str) -> float:
    dom = build_domain(T, M, 16, family)
    _, real, _, mats = calderon.build_pair(dom, family)
    pair = calderon.calderon_pair(real, traces_with(dom, kind), mats)
    return calderon.identity_report(pair, mats).sum_defect


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--M", type=int, nargs="+", default=[100, 200, 400])
    args = p.parse_args()
    cases = (("ultrastatic T=1", MetricFamily.ultrastatic(), 1.0),
             ("exponential 0.2 T=2", MetricFamily.exponential(0.2), 2.0))
    for label, fam, T in cases:
        print(f"# {label}")
        print(f"{'stencil':>9} " + " ".join(f"{'M=' + str(M):>10} {'p':>5}" for M in args.M))
        for kind in ("poly", "centered", "midpoint"):
            d = [sum_defect(fam, T, M, kind) for M in args.M]
            cells = [f"{d[0]:10.3e} {'':>5}"]
            cells += [f"{d[i]:10.3e} {np.log2(d[i - 1] / d[i]) / np.log2(args.M[i] / args.M[i - 1]):5.2f}"
                      for i in range(1, len(d))]
            print(f"{kind:>9} " + " ".join(cells))


if __name__ == "__main__":
    main()
