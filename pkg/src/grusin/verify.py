"""Self-check suites run by ``grusin verify``.

Each suite returns a list of :class:`Check` records; a suite passes when all
of its checks do.  The suites are quick consistency sweeps, not a substitute
for the test suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bounds, geodesics, heat_kernel, oracle
from . import scalar_functions as sf

__all__ = ["Check", "SUITES", "run_suite"]


@dataclass
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"name": self.name, "value": self.value, "tolerance": self.tolerance, "passed": self.passed}
        out.update(self.extra)
        return out


def _at_most(name, value, tol, **extra) -> Check:
    value = float(value)
    return Check(name, value, tol, bool(value <= tol), extra)


def _rel(a, b) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def suite_functions(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks = []
    fp = max(
        max(abs(sf.mu_tilde(sf.critical_point_tilde(m)) - sf.critical_point_tilde(m)) for m in range(1, 11)),
        max(abs(sf.mu_hat(sf.critical_point_hat(m)) - sf.critical_point_hat(m)) for m in range(0, 11)),
    )
    checks.append(_at_most("fixed-point-identities", fp, 1e-10))

    worst = 0.0
    for _ in range(200):
        b = rng.uniform(-3.1, 3.1)
        a = rng.uniform(-1, 1)
        direct = b / math.sin(b) ** 2 - 1 / math.tan(b) + a * (1 - b / math.tan(b)) / math.sin(b)
        worst = max(worst, _rel(sf.mu(b, a), direct) if abs(b) > 0.1 else 0.0)
    checks.append(_at_most("mu-matches-definition", worst, 1e-10))

    gap = math.inf
    ident = 0.0
    for a in (-0.99, -0.5, 0.0, 0.5, 0.99):
        for m in range(1, 16):
            bm = sf.critical_point_mu(m, a)
            gap = min(gap, sf.mu(bm, a) - (m - 1) * math.pi / 2)
            if m <= 10:
                lhs = sf.ell(bm, a) - bm * sf.mu(bm, a)
                ident = max(ident, abs(lhs - (1 - a * sf.delta(bm))) / max(1.0, abs(lhs)))
    checks.append(_at_most("critical-value-lower-bound", -gap, 0.0))
    checks.append(_at_most("critical-length-identity", ident, 1e-10))

    nu = np.linspace(-10, 10, 101)
    excess_psi = excess_v = 0.0
    for b in np.linspace(-0.99 * math.pi, 0.99 * math.pi, 33):
        for a in (-1.0, -0.3, 0.0, 0.6, 1.0):
            re = np.real(sf.psi_complex(nu, b, a))
            excess_psi = max(excess_psi, float(np.max(sf.psi_ib(b, a) - re)))
        for n in (1, 2, 3):
            mod = np.abs(sf.V_complex(nu, b, n))
            cap = (1.0 / np.sinc(b / np.pi)) ** (n / 2)
            excess_v = max(excess_v, float(np.max(mod / cap - 1)))
    checks.append(_at_most("re-psi-lower-bound", excess_psi, 1e-12))
    checks.append(_at_most("V-modulus-bound", excess_v, 1e-12))
    return checks


def suite_geodesics(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks = [
        _at_most("origin-pair-distance", _rel(geodesics.cc_distance((0, 0), (0, 1)).d, math.sqrt(2 * math.pi)), 1e-12),
        _at_most("antipodal-distance", _rel(geodesics.cc_distance((1, 0), (-1, 5)).d, math.sqrt(10 * math.pi)), 1e-12),
        _at_most("same-fiber-distance", abs(geodesics.cc_distance((1, 2), (3.5, 2)).d - 2.5), 1e-12),
    ]
    figure = {((1, 0), (2, 10)): (1.922, 5.3163), ((1, 0), (1, 6)): (2.1014, 4.2565), ((1, 0), (-1, 5)): (4.5946, 9.6501)}
    worst = 0.0
    for (p, q), targets in figure.items():
        bs = [abs(s.b) for s, _ in geodesics.enumerate_geodesics(p, q, 10.0)]
        worst = max(worst, max(min(abs(b - t) for b in bs) for t in targets))
    checks.append(_at_most("figure-parameters", worst, 2e-3))

    trip = sym = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 4))
        p = rng.normal(size=n + 1)
        q = rng.normal(size=n + 1)
        q[-1] *= 3
        for spec, _ in geodesics.enumerate_geodesics(p, q, 4 * math.pi):
            end = geodesics.eval_geodesic(spec, 1.0)
            trip = max(trip, float(np.abs(end.coords - q).max()) / (1 + float(np.abs(q).max())))
        sym = max(sym, _rel(geodesics.cc_distance(p, q).d, geodesics.cc_distance(q, p).d))
    checks.append(_at_most("endpoint-round-trip", trip, 1e-8))
    checks.append(_at_most("distance-symmetry", sym, 1e-10))
    return checks


def suite_kernel(seed: int = 0) -> list[Check]:
    checks = []
    basis = oracle.HermiteBasis(120, 1.0)
    grid = np.linspace(-1.5, 1.5, 9)
    err = max(
        abs(heat_kernel.mehler_kernel(0.1, 1.0, [x], [y]) - oracle.hermite_series_kernel(0.1, 1.0, [x], [y], basis))
        for x in grid for y in grid
    )
    checks.append(_at_most("mehler-vs-series-N120", err, 1e-8))

    pts = [([0.4], [0.2], 0.3), ([1.0], [-0.5], 1.2), ([0.0], [0.7], -0.4), ([0.3], [0.3], 2.0)]
    worst = 0.0
    for x, xi, u in pts:
        a = heat_kernel.h_scaled(x, xi, u, heat_kernel.KernelConfig(1, shift_policy="none")).value
        b = heat_kernel.h_scaled(x, xi, u, heat_kernel.KernelConfig(1)).value
        worst = max(worst, _rel(a, b))
    checks.append(_at_most("shift-consistency", worst, 1e-7))

    worst = 0.0
    for t, x, xi, u in [(0.25, [0.0], [0.0], 1.0), (0.5, [0.7], [-0.4], -0.8)]:
        worst = max(worst, _rel(heat_kernel.heat_kernel(t, x, xi, u, heat_kernel.KernelConfig(1)).value,
                                oracle.direct_kernel_quadrature(t, x, xi, u)))
    checks.append(_at_most("real-axis-agreement", worst, 1e-6))
    return checks


def suite_bounds(seed: int = 0, grid: str = "small", n_values=(1, 2, 3, 4)) -> tuple[list[Check], list[dict]]:
    checks, reports = [], []
    for n in n_values:
        g = bounds.seed_grid(n, small=(grid == "small"))
        rep = bounds.verify_bound_grid(g, reference_ratio=bounds.SEED_SUP_RATIO[n] * 1.01)
        reports.append(rep.to_dict())
        if grid == "seed":
            checks.append(_at_most(f"sup-ratio-regression-n{n}", _rel(rep.sup_ratio, bounds.SEED_SUP_RATIO[n]), 1e-2))
        else:
            checks.append(_at_most(f"sup-ratio-below-seed-n{n}", rep.sup_ratio / bounds.SEED_SUP_RATIO[n], 1.01))
        checks.append(_at_most(f"decay-violations-n{n}", rep.violations_of_decay, 0))
        checks.append(_at_most(f"excluded-points-n{n}", rep.excluded_points, 0))
    return checks, reports


def suite_oracle(seed: int = 0) -> list[Check]:
    checks = []
    rng = np.random.default_rng(seed)
    pairs = [((0, 0), (0, 1)), ((1, 0), (2, 10)), ((1, 0), (-1, 5))]
    for _ in range(2):
        pairs.append((tuple(rng.uniform(-1.5, 1.5, 2)), tuple(rng.uniform(-1.5, 1.5, 2) * [1, 2])))
    worst = below = 0.0
    for p, q in pairs:
        exact = geodesics.cc_distance(p, q).d
        approx = oracle.path_minimize_distance(p, q, K=120, restarts=4, seed=seed)
        worst = max(worst, _rel(approx, exact))
        below = max(below, exact - approx)
    checks.append(_at_most("path-oracle-agreement", worst, 2e-2))
    checks.append(_at_most("path-oracle-upper-bound", below, 1e-9))
    basis = oracle.HermiteBasis(20, 1.3)
    checks.append(_at_most("hermite-orthonormality", oracle.orthonormality_defect(basis), 1e-10))
    checks.append(_at_most("hermite-eigen-relation", oracle.eigen_relation_defect(basis), 1e-4))
    return checks


SUITES = ("functions", "geodesics", "kernel", "bounds", "oracle")


def run_suite(name: str, seed: int = 0, grid: str = "small") -> dict:
    """Run one suite (or ``"all"``) and return a JSON-ready report."""
    names = SUITES if name == "all" else (name,)
    if any(s not in SUITES for s in names):
        raise ValueError(f"unknown suite {name!r}")
    checks: list[Check] = []
    extra = {}
    for s in names:
        if s == "bounds":
            c, reports = suite_bounds(seed, grid)
            extra["bound_reports"] = reports
        else:
            c = globals()[f"suite_{s}"](seed)
        for chk in c:
            chk.name = f"{s}/{chk.name}"
        checks.extend(c)
    report = {
        "suite": name,
        "seed": seed,
        "passed": all(c.passed for c in checks),
        "checks": [c.to_dict() for c in checks],
    }
    report.update(extra)
    return report
