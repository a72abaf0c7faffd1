"""Acceptance criteria 1-12, each at its stated tolerance.

Every test records one PASS or FAIL line, printed again in the terminal
summary.  Criterion 6 does not hold at the stated truncation order; it is
recorded as FAIL and marked as a strict expected failure.
"""
import math
import time

import numpy as np
import pytest
from scipy import integrate

from grusin import bounds, oracle
from grusin import scalar_functions as sf
from grusin.geodesics import Point, cc_distance, enumerate_geodesics
from grusin.heat_kernel import KernelConfig, h_scaled, heat_kernel, mehler_kernel

from test_heat_kernel import fd_heat_residual


def rel(a, b):
    return abs(a - b) / abs(b)


def test_criterion_01_closed_form_distances(record):
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 4))
        x1, x = rng.normal(size=n), rng.normal(size=n)
        worst = max(worst, abs(cc_distance(Point(x1, 0.0), Point(x, 0.0)).d - np.linalg.norm(x - x1)))
    for u in (0.1, 1.0, 10.0):
        worst = max(worst, rel(cc_distance((0, 0), (0, u)).d, math.sqrt(2 * math.pi * u)))
    worst = max(worst, rel(cc_distance((1, 0), (-1, 5)).d, math.sqrt(10 * math.pi)))
    assert record(1, worst <= 1e-12, f"max error {worst:.2e} (tol 1e-12)")


def test_criterion_02_figure_roots(record):
    cases = {(1, 2, 10): (1.922, 5.3163), (1, 1, 6): (2.1014, 4.2565), (1, -1, 5): (4.5946, 9.6501)}
    worst = 0.0
    for (x1, x, u), targets in cases.items():
        bs = [s.b for s, _ in enumerate_geodesics((x1, 0), (x, u), 10.0) if not s.degenerate]
        worst = max(worst, max(min(abs(b - t) for b in bs) for t in targets))
    assert record(2, worst <= 2e-3, f"max deviation {worst:.2e} (tol 2e-3)")


def test_criterion_03_critical_points(record):
    start = time.perf_counter()
    fp = max(
        max(abs(sf.mu_tilde(sf.critical_point_tilde(m)) - sf.critical_point_tilde(m)) for m in range(1, 11)),
        max(abs(sf.mu_hat(sf.critical_point_hat(m)) - sf.critical_point_hat(m)) for m in range(0, 11)),
    )
    gap, ident = math.inf, 0.0
    for a in (-0.99, -0.5, 0.0, 0.5, 0.99):
        for m in range(1, 16):
            bm = sf.critical_point_mu(m, a)
            gap = min(gap, sf.mu(bm, a) - (m - 1) * math.pi / 2)
            if m <= 10:
                lhs = sf.ell(bm, a) - bm * sf.mu(bm, a)
                ident = max(ident, abs(lhs - (1 - a * sf.delta(bm))))
    elapsed = time.perf_counter() - start
    ok = fp <= 1e-10 and gap >= 0 and ident <= 1e-10 and elapsed < 1.0
    assert record(3, ok, f"fixed point {fp:.1e}, min margin {gap:.3f}, identity {ident:.1e}, {elapsed:.2f}s")


def test_criterion_04_monotone_lengths(record):
    rng = np.random.default_rng(4)
    start = time.perf_counter()
    violations = 0
    pairs = []
    for k in range(20):
        x1 = rng.uniform(-2, 2, 1 + k % 2)
        kind = k % 4
        x = {0: rng.uniform(-2, 2, x1.size), 1: x1.copy(), 2: -x1, 3: np.zeros(x1.size)}[kind]
        if kind == 3:
            x1 = np.zeros(x1.size)
        pairs.append((Point(x1, 0.0), Point(x, rng.uniform(0.5, 30.0))))
    for p, q in pairs:
        found = enumerate_geodesics(p, q, 8 * math.pi)
        for degenerate in (False, True):
            lengths = [L for s, L in found if s.degenerate == degenerate]
            violations += sum(1 for a, b in zip(lengths, lengths[1:]) if not b > a)
    elapsed = time.perf_counter() - start
    assert record(4, violations == 0 and elapsed < 5, f"{violations} violations over 20 pairs, {elapsed:.2f}s")


def test_criterion_05_oracle_agreement(record):
    rng = np.random.default_rng(5)
    start = time.perf_counter()
    worst_random = 0.0
    for k in range(10):
        n = 1 + k % 2
        p = np.append(rng.uniform(-1.5, 1.5, n), 0.0)
        q = np.append(rng.uniform(-1.5, 1.5, n), rng.uniform(-3, 3))
        worst_random = max(worst_random, rel(oracle.path_minimize_distance(p, q, K=200, restarts=8, seed=k), cc_distance(p, q).d))
    worst_closed = 0.0
    for p, q, exact in [((0, 0), (0, 1), math.sqrt(2 * math.pi)), ((1, 0), (-1, 5), math.sqrt(10 * math.pi)),
                        ((1, 0), (2, 0), 1.0)]:
        worst_closed = max(worst_closed, rel(oracle.path_minimize_distance(p, q, K=200, restarts=8, seed=0), exact))
    elapsed = time.perf_counter() - start
    ok = worst_random <= 1e-2 and worst_closed <= 2e-2 and elapsed < 300
    assert record(5, ok, f"random pairs {worst_random:.2e} (tol 1e-2), closed forms {worst_closed:.2e} (tol 2e-2), {elapsed:.1f}s")


def _series_error(N):
    basis = oracle.HermiteBasis(N, 1.0)
    grid = np.linspace(-1.5, 1.5, 9)
    return max(abs(mehler_kernel(0.1, 1.0, [x], [y]) - oracle.hermite_series_kernel(0.1, 1.0, [x], [y], basis))
               for x in grid for y in grid)


@pytest.mark.xfail(strict=True, reason="the series truncated at N=60 is only accurate to about 7e-7 at t=0.1")
def test_criterion_06_mehler_vs_series(record):
    err = _series_error(60)
    record(6, err < 1e-8, f"sup error {err:.2e} at N=60 (tol 1e-8); truncation tail bound {oracle.hermite_tail_bound(0.1, 1.0, 60):.1e}")
    assert err < 1e-8


def test_mehler_vs_series_at_higher_order():
    # the same comparison passes once the truncation tail is small enough
    assert _series_error(120) < 1e-8


def test_criterion_07_semigroup(record):
    t = s = 0.2
    x, xi, lam = 0.3, -0.4, 1.0
    val, _ = integrate.quad(lambda y: mehler_kernel(t, lam, [x], [y]) * mehler_kernel(s, lam, [y], [xi]),
                            -np.inf, np.inf, epsabs=0, epsrel=1e-12)
    err = rel(val, mehler_kernel(t + s, lam, [x], [xi]))
    assert record(7, err < 1e-6, f"relative error {err:.2e} (tol 1e-6)")


def test_criterion_08_mass(record):
    start = time.perf_counter()
    cfg = KernelConfig(1, rel_tol=1e-8)
    # K is even in u, so integrate u >= 0 and double
    val, _ = integrate.dblquad(lambda u, xi: heat_kernel(0.5, [0.7], [xi], u, cfg).value,
                               -9, 9, 0, 14, epsabs=1e-6, epsrel=1e-6)
    mass = 2 * val
    elapsed = time.perf_counter() - start
    assert record(8, abs(mass - 1) <= 1e-4 and elapsed < 60, f"mass {mass:.9f} (tol 1e-4), {elapsed:.1f}s")


def test_criterion_09_shift_consistency(record):
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(10):
        x, xi, u = rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)
        a = h_scaled([x], [xi], u, KernelConfig(1, shift_policy="none")).value
        b = h_scaled([x], [xi], u, KernelConfig(1)).value
        worst = max(worst, rel(a, b))
    assert record(9, worst <= 1e-6, f"max relative difference {worst:.2e} (tol 1e-6)")


def test_criterion_10_gaussian_bound(record):
    start = time.perf_counter()
    details, ok = [], True
    for n in (1, 2, 3, 4):
        grid = bounds.seed_grid(n)
        reference = 1.01 * bounds.SEED_SUP_RATIO[n]
        rep = bounds.verify_bound_grid(grid, reference_ratio=reference)
        scaled = bounds.verify_bound_grid(grid.rescaled(2.0), reference_ratio=reference)
        drift = rel(rep.sup_ratio, bounds.SEED_SUP_RATIO[n])
        scale_err = rel(scaled.sup_ratio, rep.sup_ratio)
        ok &= (math.isfinite(rep.sup_ratio) and drift <= 1e-2 and rep.violations_of_decay == 0
               and scaled.violations_of_decay == 0 and scale_err <= 1e-3 and rep.excluded_points == 0)
        details.append(f"n={n} sup {rep.sup_ratio:.4g} drift {drift:.1e} rescale {scale_err:.1e} violations {rep.violations_of_decay}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 600
    assert record(10, ok, "; ".join(details) + f"; {elapsed:.1f}s")


def test_criterion_11_scaling(record):
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(10):
        n = int(rng.integers(1, 3))
        p = Point(rng.normal(size=n), rng.normal())
        q = Point(rng.normal(size=n), 3 * rng.normal())
        d = cc_distance(p, q).d
        for r in (0.5, 2.0, 10.0):
            worst = max(worst, rel(cc_distance(p.dilate(r), q.dilate(r)).d, r * d))
    assert record(11, worst <= 1e-10, f"max relative error {worst:.2e} (tol 1e-10)")


def test_criterion_12_heat_equation(record):
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(20):
        t, x, xi, u = rng.uniform(0.2, 1.0), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)
        worst = max(worst, fd_heat_residual(t, x, xi, u))
    assert record(12, worst < 1e-3, f"max relative residual {worst:.2e} (tol 1e-3)")
