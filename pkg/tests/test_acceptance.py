"""Acceptance criteria 1-9.

Each criterion is a function returning ``(passed, detail)``; the pytest
wrappers print one ``criterion N: PASS|FAIL`` line per criterion (visible in
``pytest -v`` output) and assert it.  ``python tests/test_acceptance.py``
prints the same lines without pytest.
"""

from __future__ import annotations

import functools
import sys
import time

import numpy as np
import pytest

from calderon_states import calderon, cli, elliptic, evolution, oracle, state
from calderon_states.config import parse_config
from calderon_states.discretize import build_domain
from calderon_states.errors import DomainError
from calderon_states.geometry import MetricFamily

ULTRA = MetricFamily.ultrastatic()
EXPO = MetricFamily.exponential(0.2)
ORDER, ORDER_BAND = 2.0, 0.3


@functools.lru_cache(maxsize=None)
def built(family: MetricFamily, T: float, M: int = 200, N: int = 16):
    dom = build_domain(T, M, N, family)
    return (dom,) + calderon.build_pair(dom, family)


def order_ok(coarse: float, fine: float) -> tuple[bool, float]:
    p = float(np.log2(coarse / fine))
    return abs(p - ORDER) <= ORDER_BAND, p


def oracle_error(M: int) -> float:
    dom, pair, *_ = built(ULTRA, 1.0, M)
    spec = oracle.spectrum_for(ULTRA, 16)
    num = oracle.modal_blocks(pair.Cplus, spec)
    exact = np.array([0.5 * np.array([[1, np.tanh(e) / e], [e / np.tanh(e), 1]]) for e in spec.eps])
    return float(np.max(np.abs(num - exact) / np.abs(exact)))


def criterion_1():
    t0 = time.perf_counter()
    e200 = oracle_error(200)
    elapsed = time.perf_counter() - t0
    e400 = oracle_error(400)
    ratio = e200 / e400
    ok = e200 <= 5e-3 and 3.0 <= ratio <= 5.0 and elapsed <= 60.0
    return ok, f"max rel error {e200:.3e} (tol 5e-3), M-doubling ratio {ratio:.3f} (in [3,5]), {elapsed:.2f} s (<= 60 s)"


def _report(family, T, M=200):
    _, pair, _, _, mats = built(family, T, M)
    return calderon.identity_report(pair, mats)


def criterion_2():
    parts, ok = [], True
    for name, fam, T in (("ultrastatic", ULTRA, 1.0), ("exponential", EXPO, 2.0)):
        a, b = _report(fam, T).sum_defect, _report(fam, T, 400).sum_defect
        good, p = order_ok(a, b)
        ok &= a <= 5e-3 and good
        parts.append(f"{name} T={T:g}: {a:.3e} (tol 5e-3), order {p:.2f}")
    return ok, "; ".join(parts)


def criterion_3():
    parts, ok = [], True
    for name, fam, T in (("ultrastatic", ULTRA, 1.0), ("exponential", EXPO, 2.0)):
        r = _report(fam, T)
        worst = min(r.pos_min_eig_plus / r.pos_norm_plus, r.pos_min_eig_minus / r.pos_norm_minus)
        ok &= r.positivity_ok(1e-6)
        parts.append(f"{name}: min eig / norm = {worst:.3e} (>= -1e-6)")
    return ok, "; ".join(parts)


def _purity(family, T, M=200):
    _, pair, _, _, mats = built(family, T, M)
    return state.purity_defect(state.covariances(pair, mats))


def criterion_4():
    parts, ok = [], True
    for name, fam, T in (("ultrastatic", ULTRA, 1.0), ("exponential", EXPO, 1.0), ("exponential", EXPO, 2.0)):
        idem = (_report(fam, T).idem_defect, _report(fam, T, 400).idem_defect)
        pur = (_purity(fam, T), _purity(fam, T, 400))
        gi, pi_ = order_ok(*idem)
        gp, pp = order_ok(*pur)
        ok &= idem[0] <= 1e-2 and pur[0] <= 1e-2 and gi and gp
        parts.append(f"{name} T={T:g}: idem {idem[0]:.3e} order {pi_:.2f}, purity {pur[0]:.3e} order {pp:.2f}")
    dom, _, _, _, mats = built(ULTRA, 1.0)
    exact = oracle.oracle_pair(dom)
    cov = state.covariances(exact, mats)
    e_idem = calderon.identity_report(exact, mats).idem_defect
    e_pur = state.purity_defect(cov)
    thermal = state.thermal_purity_defect(cov, 0.5)
    ok &= e_idem <= 1e-12 and e_pur <= 1e-12 and abs(thermal - 0.75) <= 1e-6
    parts.append(f"exact idem {e_idem:.1e}, purity {e_pur:.1e} (<= 1e-12); thermal {thermal:.9f} (0.75 +- 1e-6)")
    return ok, "; ".join(parts)


def criterion_5():
    spec = oracle.spectrum_for(ULTRA, 16)
    parts, ok = [], True
    for T in (2.0, 3.0):
        worst = 0.0
        for e in spec.eps:
            diff = np.linalg.norm(oracle.calderon_closed_form(e, T) - oracle.ground_state_projector(e), 2)
            worst = max(worst, diff / oracle.ground_state_bound(e, T))
        dom, pair, *_ = built(ULTRA, T)
        k = int(np.argmin(spec.eps))
        num = oracle.modal_blocks(pair.Cplus, spec)[k]
        num_ratio = np.linalg.norm(num - oracle.ground_state_projector(spec.eps[k]), 2) / \
            oracle.ground_state_bound(spec.eps[k], T)
        ok &= worst <= 1.0 and num_ratio <= 1.0
        parts.append(f"T={T:g}: max(diff/bound) closed form over all {len(spec.eps)} modes {worst:.3f}, numerical slowest mode {num_ratio:.3f}")
    return ok, "; ".join(parts)


def criterion_6():
    cfg = parse_config("")
    eps, meas, expct = cli.frequency_ratios(cfg)
    value, bound, passed = cli.frequency_check(eps, meas, expct, cfg.disc.T, cfg.tol)
    near = eps <= 4.0
    dom, pair, *_ = built(ULTRA, 1.0)
    spec = oracle.spectrum_for(ULTRA, 16)
    f = np.concatenate([spec.modes.sum(axis=1), np.zeros(16)])
    gs = oracle.ground_state_pair(dom).Cplus @ f
    traj = evolution.cauchy_solve(ULTRA, evolution.CauchyDatum.from_vector(gs), cfg.evolution.T_w, cfg.evolution.dt)
    gs_ratio = float(np.max(evolution.frequency_probe(traj, spec).ratio))
    ok = bool(np.all(passed)) and gs_ratio <= 1e-8
    return ok, (f"eps<=4 max rel error {np.max(value[near]):.3e} (tol 0.1), eps>4 max ratio "
                f"{np.max(value[~near]):.3e} (<= 1e-3), ground state ratio {gs_ratio:.1e} (<= 1e-8)")


def criterion_7():
    dom, pair, real, traces, mats = built(EXPO, 2.0)
    u_dom, _, u_real, u_traces, _ = built(ULTRA, 1.0)
    poly = MetricFamily.polynomial(0.1, h0=(1.0, 0.3))
    adj = max(calderon.adjointness_defect(dom, traces), calderon.adjointness_defect(u_dom, u_traces))
    charge = calderon.charge_form_defect(mats)
    refl = max(elliptic.reflection_defect(real), elliptic.reflection_defect(u_real))
    conj = max(elliptic.conjugation_defect(dom, EXPO),
               elliptic.conjugation_defect(build_domain(2.0, 200, 16, poly), poly))
    ok = adj <= 1e-13 and charge <= 1e-13 and refl <= 1e-12 and conj <= 1e-10
    return ok, (f"adjointness {adj:.1e} (1e-13), R^H q R - q {charge:.1e} (1e-13), "
                f"reflection {refl:.1e} (1e-12), dhat conjugation {conj:.1e} (1e-10)")


def criterion_8():
    parts, ok = [], True
    for name, fam, T in (("ultrastatic", ULTRA, 1.0), ("exponential", EXPO, 2.0)):
        d = []
        for M in (200, 400):
            _, _, real, traces, mats = built(fam, T, M)
            d.append(calderon.relative_green_defect(real, traces, mats))
        ratio = d[0] / d[1]
        ok &= d[0] <= 1e-3 and 3.0 <= ratio <= 5.0
        parts.append(f"{name}: {d[0]:.3e} |u||v| (tol 1e-3), ratio {ratio:.3f} (in [3,5])")
    return ok, "; ".join(parts)


SECTORIAL_MATRIX = (
    ("ultrastatic T=1", ULTRA, 1.0),
    ("ultrastatic variable h0,V T=2", MetricFamily.ultrastatic(h0=(1.0, 0.3), V=(0.0, 0.5)), 2.0),
    ("exponential 0.2 T=2", EXPO, 2.0),
    ("exponential 0.2 T=2.6", EXPO, 2.6),
    ("exponential -0.3 h0 var T=1.5", MetricFamily.exponential(-0.3, h0=(1.0, 0.25)), 1.5),
    ("polynomial 0.1 T=2", MetricFamily.polynomial(0.1), 2.0),
)


def criterion_9():
    parts, ok = [], True
    for name, fam, T in SECTORIAL_MATRIX:
        real = elliptic.assemble_K0(build_domain(T, 200, 16, fam), fam)
        lam = elliptic.sectoriality_defect(real).min_herm_eig
        ok &= lam > 0
        parts.append(f"{name}: {lam:.3e}")
    try:
        build_domain(3.0, 200, 16, EXPO)
        rejected = False
    except DomainError:
        rejected = True
    ok &= rejected
    parts.append(f"exponential T=3 rejected before assembly: {rejected}")
    return ok, "min eig Herm(W_H K0) > 0: " + "; ".join(parts)


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9}
TITLES = {1: "oracle match", 2: "sum identity", 3: "positivity", 4: "purity", 5: "ground-state limit",
          6: "frequency law", 7: "structural identities", 8: "Green identity", 9: "sectoriality"}


def line(n: int) -> tuple[bool, str]:
    ok, detail = CRITERIA[n]()
    return ok, f"criterion {n} ({TITLES[n]}): {'PASS' if ok else 'FAIL'} | {detail}"


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    ok, text = line(n)
    with capsys.disabled():
        print("\n" + text)
    assert ok, text


if __name__ == "__main__":
    results = [line(n) for n in sorted(CRITERIA)]
    for _, text in results:
        print(text)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
