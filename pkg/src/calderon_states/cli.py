"""Batch driver: ``calderon-states <command> --config <path> [--out <dir>] [--seed <u64>]``.

Exit codes: 0 success, 1 a check failed, 2 configuration error, 3 slab
outside the admissible Wick-rotation domain, 4 solver or state breakdown.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from calderon_states import calderon, elliptic, evolution, oracle, state
from calderon_states.config import RunConfig, parse_config
from calderon_states.discretize import build_domain
from calderon_states.errors import CalderonError, ConfigError
from calderon_states.geometry import FamilyKind

COMMANDS = ("build", "verify", "oracle", "evolve", "converge")
EXIT_CHECK_FAILED = 1


def fmt(x) -> str:
    return "%.17g" % x


@dataclass
class Check:
    name: str
    value: float
    tol: float
    passed: bool
    label: str

    def line(self) -> str:
        return f"{self.name} | {fmt(self.value)} | {fmt(self.tol)} | {'pass' if self.passed else 'FAIL'} | {self.label}"


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)
    header: list = field(default_factory=list)

    def add(self, name, value, tol, passed, label):
        self.checks.append(Check(name, float(value), float(tol), bool(passed), label))

    def at_most(self, name, value, tol, label):
        self.add(name, value, tol, value <= tol, label)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def render(self) -> str:
        lines = [f"# {h}" for h in self.header]
        lines += [c.line() for c in self.checks]
        lines.append(f"overall | {int(self.passed)} | 1 | {'pass' if self.passed else 'FAIL'} | all checks")
        return "\n".join(lines) + "\n"


def write_matrix_csv(path: Path, A: np.ndarray) -> None:
    """Row-major ``i,j,re,im`` listing with 17 significant digits."""
    rows = ["i,j,re,im"]
    for i in range(A.shape[0]):
        for j in range(A.shape[1]):
            z = complex(A[i, j])
            rows.append(f"{i},{j},{fmt(z.real)},{fmt(z.imag)}")
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")


def read_matrix_csv(path: Path) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    i, j = data[:, 0].astype(int), data[:, 1].astype(int)
    A = np.zeros((i.max() + 1, j.max() + 1), dtype=complex)
    A[i, j] = data[:, 2] + 1j * data[:, 3]
    return A


def _setup(cfg: RunConfig, M: int | None = None):
    family = cfg.family.build()
    dom = build_domain(cfg.disc.T, M or cfg.disc.M, cfg.disc.N, family)
    pair, real, traces, mats = calderon.build_pair(dom, family)
    return family, dom, pair, real, traces, mats


def _header(cfg: RunConfig, family, mats=None) -> list:
    h = [f"family={family.kind.value} kappa={fmt(family.kappa)} alpha={fmt(family.alpha)} m2={fmt(family.m2)}",
         f"T={fmt(cfg.disc.T)} M={cfg.disc.M} N={cfg.disc.N} seed={cfg.seed}"]
    if mats is not None:
        h.append(f"sign_resolution={mats.sign_resolution}")
    return h


def cmd_build(cfg: RunConfig, out: Path) -> VerificationReport:
    family, dom, pair, real, traces, mats = _setup(cfg)
    rep = VerificationReport(header=_header(cfg, family, mats))
    if cfg.output.emit_matrices:
        write_matrix_csv(out / "Cplus.csv", pair.Cplus)
        write_matrix_csv(out / "Cminus.csv", pair.Cminus)
    ident = calderon.identity_report(pair, mats)
    rep.at_most("sum_defect", ident.sum_defect, cfg.tol.sum, "C+ + C- = 1")
    return rep


def verification_checks(cfg: RunConfig) -> VerificationReport:
    family, dom, pair, real, traces, mats = _setup(cfg)
    tol = cfg.tol
    rep = VerificationReport(header=_header(cfg, family, mats))
    ident = calderon.identity_report(pair, mats)
    rep.at_most("sum_defect", ident.sum_defect, tol.sum, "C+ + C- = 1")
    rep.at_most("herm_defect", ident.herm_defect, tol.sum, "W_S q C+ hermitian")
    for sign, lam, nrm in (("plus", ident.pos_min_eig_plus, ident.pos_norm_plus),
                           ("minus", ident.pos_min_eig_minus, ident.pos_norm_minus)):
        floor = -tol.positivity * nrm
        rep.add(f"pos_min_eig_{sign}", lam, floor, lam >= floor, f"Herm(+-W_S q C+-) >= 0 ({sign})")
    rep.at_most("idem_defect", ident.idem_defect, tol.idempotence, "C+ idempotent")
    cov = state.covariances(pair, mats)
    rep.at_most("ccr_defect", state.ccr_defect(cov), tol.sum, "lambda+ - lambda- = q")
    rep.at_most("purity_defect", state.purity_defect(cov), tol.purity, "G^2 = 1 (pure state)")
    rep.at_most("gamma_adjointness", calderon.adjointness_defect(dom, traces, seed=cfg.seed),
                tol.adjoint, "gamma* adjoint of gamma")
    rep.at_most("charge_form", calderon.charge_form_defect(mats), tol.charge, "R^H q R = q")
    rep.at_most("reflection_defect", elliptic.reflection_defect(real), tol.reflection, "K0* = reflected K0")
    rep.at_most("conjugation_defect", elliptic.conjugation_defect(dom, family), tol.conjugation,
                "dhat K dhat^-1 = K0")
    rep.at_most("green_defect", calderon.relative_green_defect(real, traces, mats), tol.green,
                "half-slab Green identity")
    sect = elliptic.sectoriality_defect(real, seed=cfg.seed)
    rep.add("sectoriality_min_eig", sect.min_herm_eig, 0.0, sect.min_herm_eig > 0, "Herm(W_H K0) > 0")
    rep.add("numerical_range_angle", sect.numerical_range_angle, np.inf,
            np.isfinite(sect.numerical_range_angle), "max |Im q| / Re q over samples")
    return rep


def cmd_verify(cfg: RunConfig, out: Path) -> VerificationReport:
    return verification_checks(cfg)


def _require_ultrastatic(cfg: RunConfig, what: str):
    if FamilyKind(cfg.family.kind) is not FamilyKind.ULTRASTATIC:
        raise ConfigError(f"{what} needs family.kind = ultrastatic")


def oracle_table(cfg: RunConfig, M: int | None = None):
    """Per-mode ``(eps, max relative entry error)`` of the numerical ``C+``."""
    family, dom, pair, *_ = _setup(cfg, M)
    spec = oracle.spectrum_for(family, dom.N)
    num = oracle.modal_blocks(pair.Cplus, spec)
    exact = np.array([oracle.calderon_closed_form(e, dom.T) for e in spec.eps])
    err = np.max(np.abs(num - exact) / np.abs(exact), axis=(1, 2))
    return spec.eps, err


def cmd_oracle(cfg: RunConfig, out: Path) -> VerificationReport:
    _require_ultrastatic(cfg, "oracle")
    family = cfg.family.build()
    rep = VerificationReport(header=_header(cfg, family))
    eps, err = oracle_table(cfg)
    rows = ["k,eps,max_rel_error"] + [f"{k},{fmt(e)},{fmt(x)}" for k, (e, x) in enumerate(zip(eps, err))]
    (out / "oracle.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    for k, (e, x) in enumerate(zip(eps, err)):
        rep.at_most(f"oracle_mode_{k}", x, cfg.tol.oracle, f"C+ block vs closed form, eps={fmt(e)}")
    return rep


def frequency_ratios(cfg: RunConfig):
    """Evolve ``C+`` range data and return ``(eps, measured, expected)`` ratios."""
    family, dom, pair, *_ = _setup(cfg)
    spec = oracle.spectrum_for(family, dom.N)
    # one unit of every mode in the value slot, projected onto the range of C+
    f = np.concatenate([spec.modes.sum(axis=1), np.zeros(dom.N)])
    datum = evolution.CauchyDatum.from_vector(pair.Cplus @ f)
    dt = min(cfg.evolution.dt, evolution.max_stable_dt(family, dom.N, cfg.evolution.T_w))
    traj = evolution.cauchy_solve(family, datum, cfg.evolution.T_w, dt)
    probe = evolution.frequency_probe(traj, spec)
    return spec.eps, probe.ratio, np.exp(-2.0 * dom.T * spec.eps)


def frequency_check(eps, measured, expected, T, tol) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-mode pass flags: relative error within ``tol.frequency`` for ``eps T <= 4``, else below the floor."""
    rel = np.abs(measured / expected - 1.0)
    near = eps * T <= 4.0
    value = np.where(near, rel, measured)
    bound = np.where(near, tol.frequency, tol.frequency_floor)
    return value, bound, value <= bound


def cmd_evolve(cfg: RunConfig, out: Path) -> VerificationReport:
    _require_ultrastatic(cfg, "evolve")
    family = cfg.family.build()
    rep = VerificationReport(header=_header(cfg, family))
    if not cfg.evolution.probe:
        return rep
    eps, meas, expct = frequency_ratios(cfg)
    rows = ["k,eps,ratio,expected"] + [f"{k},{fmt(e)},{fmt(m)},{fmt(x)}"
                                       for k, (e, m, x) in enumerate(zip(eps, meas, expct))]
    (out / "frequency.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    value, bound, ok = frequency_check(eps, meas, expct, cfg.disc.T, cfg.tol)
    for k in range(len(eps)):
        kind = "relative error" if eps[k] * cfg.disc.T <= 4 else "ratio floor"
        rep.add(f"frequency_mode_{k}", value[k], bound[k], ok[k],
                f"|B/A| vs exp(-2 T eps), eps={fmt(eps[k])} ({kind})")
    return rep


def convergence_measurements(cfg: RunConfig, M: int) -> dict:
    family, dom, pair, real, traces, mats = _setup(cfg, M)
    ident = calderon.identity_report(pair, mats)
    cov = state.covariances(pair, mats)
    out = {
        "sum_defect": ident.sum_defect,
        "idem_defect": ident.idem_defect,
        "purity_defect": state.purity_defect(cov),
        "green_defect": calderon.relative_green_defect(real, traces, mats),
    }
    if family.kind is FamilyKind.ULTRASTATIC:
        out["oracle_error"] = float(np.max(oracle_table(cfg, M)[1]))
    return out


def fitted_order(coarse: float, fine: float) -> float:
    return float(np.log2(coarse / fine))


def cmd_converge(cfg: RunConfig, out: Path) -> VerificationReport:
    family = cfg.family.build()
    rep = VerificationReport(header=_header(cfg, family))
    M = cfg.disc.M
    a, b = convergence_measurements(cfg, M), convergence_measurements(cfg, 2 * M)
    rows = ["quantity,M,value_M,value_2M,order"]
    for name in a:
        p = fitted_order(a[name], b[name])
        rows.append(f"{name},{M},{fmt(a[name])},{fmt(b[name])},{fmt(p)}")
        rep.add(f"order_{name}", p, cfg.tol.order_band, abs(p - cfg.tol.order) <= cfg.tol.order_band,
                f"fitted order vs {fmt(cfg.tol.order)} (M={M}, {2 * M})")
    (out / "convergence.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    return rep


HANDLERS = {"build": cmd_build, "verify": cmd_verify, "oracle": cmd_oracle,
            "evolve": cmd_evolve, "converge": cmd_converge}


def run(command: str, cfg: RunConfig, out: Path | None = None, stream=None) -> int:
    """Execute ``command``; writes ``report.txt`` into the output directory and returns the exit status."""
    stream = stream or sys.stdout
    out = Path(out or cfg.output.dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        rep = HANDLERS[command](cfg, out)
    except CalderonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    text = rep.render()
    (out / "report.txt").write_text(text, encoding="utf-8")
    stream.write(text)
    return 0 if rep.passed else EXIT_CHECK_FAILED


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="calderon-states")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, type=Path)
    parser.add_argument("--out", type=Path, default=None)
    parser.add_argument("--seed", type=lambda x: int(x, 0), default=None)
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args.config.read_text(encoding="utf-8"))
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return ConfigError.exit_code
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            print("error: --seed must fit in an unsigned 64-bit integer", file=sys.stderr)
            return ConfigError.exit_code
        cfg.seed = args.seed
    return run(args.command, cfg, args.out)


if __name__ == "__main__":
    sys.exit(main())
