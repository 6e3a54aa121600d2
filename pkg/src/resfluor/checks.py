"""Self-validation suites behind the `validate` command.

Each check returns a CheckResult and the suites bundle them: `algebra` for
operator identities, `appendix` for closed-form line-set equalities,
`oracle` for master-equation agreement, `inference` for round trips.
These are the fast in-tool mirrors of the full acceptance tests.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import inference
from .analytic import (evaluate_spectrum, general_lines, integrated_weight,
                       mollow_limit_lines, three_atom_lines, two_atom_lines)
from .core import collective_operators, dressed_frame, make_params
from .liouville import (build_bare_liouvillian, build_secular_liouvillian,
                        coherence_decay_rates, dressed_spectrum_oracle,
                        steady_state)

__all__ = ["CheckResult", "SUITES", "run_suite"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str

    def line(self) -> str:
        return f"{self.name}: {'pass' if self.ok else 'fail'}: {self.detail}"


def _params(n, rabi, dd, det=0.0):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return make_params(n, rabi, dd, det)


def _line_sets_equal(a, b, rtol=1e-12):
    key = lambda ln: (ln.center, ln.half_width, ln.weight)
    sa, sb = sorted(a, key=key), sorted(b, key=key)
    if len(sa) != len(sb):
        return False, f"line counts differ ({len(sa)} vs {len(sb)})"
    worst = 0.0
    for la, lb in zip(sa, sb):
        for va, vb in zip(key(la), key(lb)):
            scale = max(abs(va), abs(vb), 1e-30)
            worst = max(worst, abs(va - vb) / scale)
    return worst <= rtol, f"worst relative deviation {worst:.2e}"


# --------------------------------------------------------------------------
# algebra


def check_commutators() -> CheckResult:
    worst = 0.0
    for n in range(1, 21):
        ops = collective_operators(n)
        worst = max(worst,
                    np.abs(ops.rp @ ops.rm - ops.rm @ ops.rp - ops.rz).max(),
                    np.abs(ops.rz @ ops.rp - ops.rp @ ops.rz - 2 * ops.rp).max(),
                    np.abs(ops.rz @ ops.rm - ops.rm @ ops.rz + 2 * ops.rm).max())
    return CheckResult("algebra.commutators", worst < 1e-10,
                       f"worst defect {worst:.2e} over N<=20")


def check_casimir() -> CheckResult:
    worst = 0.0
    for n in range(1, 21):
        ops = collective_operators(n)
        j = n / 2.0
        cas = ops.rz @ ops.rz / 4.0 + (ops.rp @ ops.rm + ops.rm @ ops.rp) / 2.0
        worst = max(worst, np.abs(cas - j * (j + 1) * np.eye(n + 1)).max())
    return CheckResult("algebra.casimir", worst < 1e-10,
                       f"worst defect {worst:.2e} over N<=20")


def check_dressed_frame() -> CheckResult:
    fr = dressed_frame(_params(2, 50, 20))
    ok = (abs(fr.theta - np.pi / 4) < 1e-15 and abs(fr.g_bar - 45.0) < 1e-12
          and abs(fr.delta_bar + 10.0) < 1e-12)
    fr8 = dressed_frame(_params(2, 50, 20, det=200.0))
    ok = ok and abs(fr8.theta - np.pi / 8) < 1e-12
    return CheckResult("algebra.dressed-frame", ok,
                       "resonant specialization and cot(2 theta)=1 case")


# --------------------------------------------------------------------------
# appendix


def check_two_atom_equality() -> CheckResult:
    oks, details = [], []
    for rabi, dd in ((50.0, 20.0), (137.0, 81.5)):
        p = _params(2, rabi, dd)
        ok, detail = _line_sets_equal(general_lines(p), two_atom_lines(p))
        oks.append(ok)
        details.append(detail)
    return CheckResult("appendix.two-atom", all(oks), "; ".join(details))


def check_three_atom_equality() -> CheckResult:
    oks, details = [], []
    for rabi, dd in ((50.0, 20.0), (211.0, 96.25)):
        p = _params(3, rabi, dd)
        ok, detail = _line_sets_equal(general_lines(p), three_atom_lines(p))
        oks.append(ok)
        details.append(detail)
    return CheckResult("appendix.three-atom", all(oks), "; ".join(details))


def check_mollow_n1() -> CheckResult:
    p = _params(1, 10, 0)
    ok, detail = _line_sets_equal(general_lines(p), mollow_limit_lines(p))
    return CheckResult("appendix.single-atom-mollow", ok, detail)


def check_weight_sum() -> CheckResult:
    worst = 0.0
    for n in range(1, 21):
        total = integrated_weight(general_lines(_params(n, 50, 20)))
        expect = n * (n + 2) / 6.0
        worst = max(worst, abs(total - expect) / expect)
    return CheckResult("appendix.weight-sum", worst < 1e-12,
                       f"worst relative deviation {worst:.2e} over N<=20")


# --------------------------------------------------------------------------
# oracle


def check_steady_state() -> CheckResult:
    worst = 0.0
    for n in range(1, 11):
        liou = build_secular_liouvillian(_params(n, 37.0, 11.0))
        rho = steady_state(liou)
        worst = max(worst, np.abs(rho - np.eye(n + 1) / (n + 1)).max())
    return CheckResult("oracle.steady-state", worst < 1e-10,
                       f"worst entrywise deviation from I/(N+1): {worst:.2e}")


def check_coherence_rates() -> CheckResult:
    worst = 0.0
    for n_em in range(2, 7):
        dt = 100.0
        dd = dt * (n_em - 1)
        p = _params(n_em, 2.5 * dd, dd)
        liou = build_secular_liouvillian(p)
        for n in range(n_em):
            rate, freq = coherence_decay_rates(liou, n)
            exp_rate = (1 + 2 * (n_em - n) * (n + 1)) / 4.0
            exp_freq = 2 * p.rabi - dt * (1 + 2 * n - n_em) / 2.0
            worst = max(worst, abs(rate - exp_rate) / exp_rate,
                        abs(freq - exp_freq) / exp_freq)
    return CheckResult("oracle.coherence-rates", worst < 0.02,
                       f"worst relative deviation {worst:.2e} at delta_tilde=100")


def check_mollow_limit_agreement() -> CheckResult:
    worst = 0.0
    for n in (1, 2, 3):
        p = _params(n, 10, 0)
        grid = np.linspace(-35, 35, 1401)
        oracle = dressed_spectrum_oracle(p, grid)
        ana = evaluate_spectrum(mollow_limit_lines(p), grid)
        worst = max(worst, np.abs(oracle.values - ana.values).max() / ana.values.max())
    return CheckResult("oracle.mollow-limit", worst < 1e-6,
                       f"worst relative deviation {worst:.2e}")


def check_convergence_ladder() -> CheckResult:
    dists = []
    for dt in (10.0, 20.0, 40.0, 80.0):
        p = _params(2, 2.5 * dt, dt)
        hi = 2 * p.rabi + p.dd_coupling + 25
        grid = np.linspace(-hi, hi, 6001)
        oracle = dressed_spectrum_oracle(p, grid)
        ana = evaluate_spectrum(general_lines(p), grid)
        norm = np.trapezoid(ana.values, grid)
        dists.append(np.trapezoid(np.abs(oracle.values - ana.values), grid) / norm)
    ok = all(b < a for a, b in zip(dists, dists[1:])) and dists[-1] < 0.02
    return CheckResult("oracle.convergence", ok,
                       "L1/intensity at delta/gamma in {10,20,40,80}: "
                       + ", ".join(f"{d:.4f}" for d in dists))


def check_liouvillian_health() -> CheckResult:
    rng = np.random.default_rng(7)
    worst_trace, worst_real = 0.0, -np.inf
    for _ in range(20):
        n = int(rng.integers(1, 8))
        p = _params(n, float(rng.uniform(5, 80)), float(rng.uniform(0, 30)),
                    det=float(rng.uniform(-10, 10)))
        for build in (build_secular_liouvillian, build_bare_liouvillian):
            liou = build(p)
            ident = np.eye(liou.dim).reshape(-1)
            worst_trace = max(worst_trace, np.abs(ident @ liou.matrix).max())
            ev = np.linalg.eigvals(liou.matrix)
            worst_real = max(worst_real, ev.real.max())
            steady_state(liou)  # raises if not unique
    ok = worst_trace < 1e-10 and worst_real < 1e-10
    return CheckResult("oracle.liouvillian-health", ok,
                       f"trace defect {worst_trace:.2e}, max Re eig {worst_real:.2e}, "
                       f"steady states unique on 40 random draws")


# --------------------------------------------------------------------------
# inference


def check_round_trip() -> CheckResult:
    worst_dd, worst_om = 0.0, 0.0
    for n in (2, 3, 5):
        dt = 15.0
        dd = dt * (n - 1)
        p = _params(n, 2.5 * dd, dd)
        hi = 2 * p.rabi + p.dd_coupling + 20
        spectrum = evaluate_spectrum(general_lines(p), np.linspace(-hi, hi, 6001))
        peaks = inference.detect_peaks(spectrum)
        init = [inference.SpectralLine(pk.location, pk.half_width,
                                       pk.height * pk.half_width) for pk in peaks]
        fit = inference.fit_lorentzians(spectrum, init)
        result = inference.infer_parameters(fit)
        if result.n_hat != n:
            return CheckResult("inference.round-trip", False,
                               f"N={n}: recovered {result.n_hat}")
        worst_dd = max(worst_dd, abs(result.delta_hat - dd) / dd)
        worst_om = max(worst_om, abs(result.omega_hat - p.rabi) / p.rabi)
    ok = worst_dd < 0.01 and worst_om < 0.005
    return CheckResult("inference.round-trip", ok,
                       f"coupling error {worst_dd:.2e}, drive error {worst_om:.2e}")


def check_noisy_round_trip() -> CheckResult:
    n, dt = 3, 15.0
    dd = dt * (n - 1)
    p = _params(n, 2.5 * dd, dd)
    hi = 2 * p.rabi + p.dd_coupling + 20
    clean = evaluate_spectrum(general_lines(p), np.linspace(-hi, hi, 6001))
    noisy = inference.add_multiplicative_noise(clean, 0.01, seed=42)
    peaks = inference.detect_peaks(noisy)
    init = [inference.SpectralLine(pk.location, pk.half_width,
                                   pk.height * pk.half_width) for pk in peaks]
    fit = inference.fit_lorentzians(noisy, init)
    result = inference.infer_parameters(fit)
    err = abs(result.delta_hat - dd) / dd
    ok = result.n_hat == n and err < 0.03
    return CheckResult("inference.noisy-round-trip", ok,
                       f"N_hat={result.n_hat}, coupling error {err:.2e} at 1% noise")


SUITES: dict[str, tuple] = {
    "algebra": (check_commutators, check_casimir, check_dressed_frame),
    "appendix": (check_two_atom_equality, check_three_atom_equality,
                 check_mollow_n1, check_weight_sum),
    "oracle": (check_steady_state, check_coherence_rates,
               check_mollow_limit_agreement, check_convergence_ladder,
               check_liouvillian_health),
    "inference": (check_round_trip, check_noisy_round_trip),
}


def run_suite(suite: str) -> list[CheckResult]:
    """Run one named suite (or 'all'); returns the individual results."""
    if suite == "all":
        names = list(SUITES)
    elif suite in SUITES:
        names = [suite]
    else:
        raise ValueError(f"unknown suite {suite!r}; choose from "
                         f"{sorted(SUITES)} or 'all'")
    return [check() for name in names for check in SUITES[name]]
