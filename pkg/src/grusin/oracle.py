"""Brute-force reference computations.

These deliberately avoid the closed forms used elsewhere in the package:

* the distance is bounded from above by minimizing the energy of horizontal
  polylines, which needs nothing but the definition of a horizontal curve;
* the Mehler kernel is summed from its Hermite eigenfunction expansion;
* the heat kernel is integrated along the real axis with QUADPACK.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .geodesics import as_point

__all__ = [
    "PathDiscretization",
    "path_energy",
    "optimal_increments",
    "path_minimize",
    "path_minimize_distance",
    "TruncationError",
    "HermiteBasis",
    "hermite_functions",
    "hermite_tail_bound",
    "hermite_series_kernel",
    "orthonormality_defect",
    "eigen_relation_defect",
    "direct_kernel_quadrature",
]


# ---------------------------------------------------------------------------
# horizontal path energy


@dataclass
class PathDiscretization:
    """A horizontal curve on ``[0, 1]`` sampled on ``K`` equal segments.

    The ``x`` part is the polyline through ``nodes``.  On segment ``k`` the
    fiber coordinate grows by ``du[k]``, at a rate proportional to
    ``|x(t)|^2``, which is what makes the curve horizontal.
    """

    nodes: np.ndarray  # (K + 1, n)
    du: np.ndarray  # (K,)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        if self.nodes.ndim == 1:
            self.nodes = self.nodes[:, None]
        self.du = np.asarray(self.du, dtype=float)
        if self.K < 8:
            raise ValueError("need at least 8 segments")
        if self.du.shape != (self.K,):
            raise ValueError("du must have one entry per segment")

    @property
    def K(self) -> int:
        return self.nodes.shape[0] - 1


def _segment_weights(nodes: np.ndarray) -> np.ndarray:
    # mean of |x(t)|^2 over each linear segment
    a, b = nodes[:-1], nodes[1:]
    return ((a * a).sum(axis=1) + (a * b).sum(axis=1) + (b * b).sum(axis=1)) / 3.0


def path_energy(disc: PathDiscretization) -> float:
    """Energy ``int |x'|^2 + |w|^2 dt`` of the discretized horizontal curve.

    With the fiber rate proportional to ``|x(t)|^2`` on each segment, the
    energy is exactly ``sum du_k^2 / (w_k dt) + |dx_k|^2 / dt`` where ``w_k``
    is the mean of ``|x|^2`` over the segment.  It is ``+inf`` when fiber
    motion is requested on a segment that sits at ``x = 0``.
    """
    dt = 1.0 / disc.K
    w = _segment_weights(disc.nodes)
    dx = np.diff(disc.nodes, axis=0)
    kinetic = float((dx * dx).sum()) / dt
    moving = disc.du != 0
    if np.any(moving & (w <= 0)):
        return math.inf
    vertical = float((disc.du[moving] ** 2 / w[moving]).sum()) / dt
    return kinetic + vertical


def optimal_increments(nodes: np.ndarray, U: float) -> np.ndarray:
    """Fiber increments minimizing the energy for fixed nodes: ``du_k = U w_k / sum w``."""
    w = _segment_weights(np.asarray(nodes, dtype=float).reshape(len(nodes), -1))
    total = w.sum()
    if total <= 0:
        return np.zeros_like(w) if U == 0 else np.full_like(w, math.nan)
    return U * w / total


def _reduced_energy(flat, start, end, U, K, n):
    """Energy with the optimal increments, and its gradient in the interior nodes."""
    dt = 1.0 / K
    X = np.vstack([start, flat.reshape(K - 1, n), end])
    w = _segment_weights(X)
    S = w.sum()
    dx = np.diff(X, axis=0)
    E = float((dx * dx).sum()) / dt
    grad = 2.0 / dt * (2 * X[1:-1] - X[:-2] - X[2:])
    if U != 0.0:
        if S <= 0:
            return math.inf, np.zeros_like(flat)
        E += U * U / (dt * S)
        dS = (4 * X[1:-1] + X[:-2] + X[2:]) / 3.0
        grad -= U * U / (dt * S * S) * dS
    return E, grad.ravel()


def path_minimize(p1, p2, K: int = 200, restarts: int = 8, seed: int = 0) -> tuple[float, PathDiscretization]:
    """Minimize the discrete horizontal energy between two points.

    Starting curves are the straight segment and random perturbations
    ``A sin(pi t) v1 + B sin(2 pi t) v2`` of it; each is polished with
    L-BFGS using the analytic gradient.  Returns ``(sqrt(energy), path)`` of
    the best run.  Since each discrete path is a genuine horizontal curve,
    the value is an upper bound on the distance.
    """
    if K < 8:
        raise ValueError("K must be at least 8")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    p1, p2 = as_point(p1), as_point(p2)
    n = p1.n
    U = p2.u - p1.u
    t = np.linspace(0.0, 1.0, K + 1)[:, None]
    line = (1 - t) * p1.x + t * p2.x
    rng = np.random.default_rng(seed)
    amp = max(1.0, math.sqrt(abs(U)), float(np.abs(p1.x).max()), float(np.abs(p2.x).max()))

    best_E, best_X = math.inf, None
    for r in range(restarts):
        X0 = line.copy()
        if r > 0 or not np.any(line):
            v1, v2 = rng.standard_normal(n), rng.standard_normal(n)
            A, B = amp * rng.standard_normal(), 0.5 * amp * rng.standard_normal()
            X0 = X0 + A * np.sin(np.pi * t) * v1 + B * np.sin(2 * np.pi * t) * v2
        res = optimize.minimize(
            _reduced_energy, X0[1:-1].ravel(), args=(p1.x, p2.x, U, K, n), jac=True,
            method="L-BFGS-B", options={"maxiter": 20000, "maxcor": 30, "ftol": 1e-15, "gtol": 1e-10},
        )
        if res.fun < best_E:
            best_E = float(res.fun)
            best_X = np.vstack([p1.x, res.x.reshape(K - 1, n), p2.x])
    disc = PathDiscretization(best_X, optimal_increments(best_X, U))
    # recompute from the returned path so the value is exactly its energy
    return math.sqrt(path_energy(disc)), disc


def path_minimize_distance(p1, p2, K: int = 200, restarts: int = 8, seed: int = 0) -> float:
    """Upper bound on the Carnot–Carathéodory distance from :func:`path_minimize`."""
    return path_minimize(p1, p2, K, restarts, seed)[0]


# ---------------------------------------------------------------------------
# Hermite eigenfunction series


class TruncationError(RuntimeError):
    """The truncated eigenfunction series cannot guarantee the requested accuracy."""

    def __init__(self, message: str, value: float, bound: float):
        super().__init__(message)
        self.value = value
        self.bound = bound


def hermite_functions(N: int, y) -> np.ndarray:
    """Orthonormal Hermite functions ``phi_0 .. phi_N`` at ``y`` (rows), by recurrence.

    ``phi_k(y) = (2^k k! sqrt(pi))^(-1/2) H_k(y) exp(-y^2/2)``, computed from
    ``phi_{k+1} = sqrt(2/(k+1)) y phi_k - sqrt(k/(k+1)) phi_{k-1}``.
    """
    y = np.asarray(y, dtype=float)
    out = np.empty((N + 1,) + y.shape)
    out[0] = math.pi**-0.25 * np.exp(-0.5 * y * y)
    if N >= 1:
        out[1] = math.sqrt(2.0) * y * out[0]
    for k in range(1, N):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * y * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


@dataclass(frozen=True)
class HermiteBasis:
    """Scaled Hermite eigenfunctions of ``Delta - lambda^2 |x|^2`` up to total degree ``N``.

    In one variable ``h_k^lambda(x) = |lambda|^(1/4) phi_k(sqrt|lambda| x)``,
    which equals ``(|lambda|/2pi)^(1/4) h_k(sqrt(|lambda|/2pi) x)`` for the
    Hermite functions ``h_k`` adapted to ``exp(-2 pi x^2)``; the sign of each
    ``h_k`` drops out of every product used here.  For ``n = 2`` the basis is
    the tensor product.
    """

    N: int
    lam: float
    n: int = 1

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be at least 1")
        if self.lam == 0:
            raise ValueError("lambda must be nonzero")
        if self.n not in (1, 2):
            raise ValueError("the Hermite oracle supports n = 1 and n = 2 only")

    def one_dim(self, x) -> np.ndarray:
        """``h_k^lambda(x)`` for ``k = 0..N``, shape ``(N + 1,) + x.shape``."""
        s = abs(self.lam)
        return s**0.25 * hermite_functions(self.N, math.sqrt(s) * np.asarray(x, dtype=float))

    def eigenvalue(self, degree) -> np.ndarray:
        return -abs(self.lam) * (2 * np.asarray(degree) + self.n)


def hermite_tail_bound(t: float, lam: float, N: int, n: int = 1) -> float:
    """Bound on the terms of total degree above ``N`` using ``|phi_k| <= pi^(-1/4)``."""
    s = abs(lam)
    q = math.exp(-2 * s * t)
    M = N + 1
    if n == 1:
        count = q**M / (1 - q)
    else:
        count = q**M * ((M + 1) - M * q) / (1 - q) ** 2
    return (s / math.pi) ** (0.5 * n) * math.exp(-n * s * t) * count


def hermite_series_kernel(t: float, lam: float, x, xi, basis: HermiteBasis,
                          tail_tol: float | None = None) -> float:
    """Truncated eigenfunction expansion ``sum exp(-|lam|(2|alpha|+n) t) h_alpha(x) h_alpha(xi)``.

    Raises
    ------
    TruncationError
        If ``tail_tol`` is given and :func:`hermite_tail_bound` exceeds it.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if lam != basis.lam:
        basis = HermiteBasis(basis.N, lam, basis.n)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if x.size != basis.n or xi.size != basis.n:
        raise ValueError(f"x and xi must have dimension {basis.n}")
    N = basis.N
    decay = np.exp(-abs(lam) * t * (2 * np.arange(N + 1)))
    vals = [basis.one_dim(x[j]) * basis.one_dim(xi[j]) for j in range(basis.n)]
    if basis.n == 1:
        total = float((decay * vals[0]).sum())
    else:
        k = np.arange(N + 1)
        mask = (k[:, None] + k[None, :]) <= N
        total = float((np.outer(decay * vals[0], decay * vals[1]) * mask).sum())
    total *= math.exp(-abs(lam) * t * basis.n)
    if tail_tol is not None:
        bound = hermite_tail_bound(t, lam, N, basis.n)
        if bound > tail_tol:
            raise TruncationError(f"tail bound {bound:.3g} exceeds {tail_tol:.3g}; raise N", total, bound)
    return total


def orthonormality_defect(basis: HermiteBasis, kmax: int = 10) -> float:
    """``max |<h_j, h_k> - delta_jk|`` for ``j, k <= kmax`` by trapezoidal quadrature.

    The trapezoid rule on a wide uniform grid is spectrally accurate for
    these Gaussian-decaying integrands.  One-dimensional functions are
    checked; the tensor basis inherits orthonormality.
    """
    kmax = min(kmax, basis.N)
    s = math.sqrt(abs(basis.lam))
    half_width = (math.sqrt(2 * kmax + 1) + 10) / s
    x = np.linspace(-half_width, half_width, 4001)
    h = basis.one_dim(x)[: kmax + 1]
    gram = integrate.trapezoid(h[:, None, :] * h[None, :, :], x, axis=-1)
    return float(np.abs(gram - np.eye(kmax + 1)).max())


def eigen_relation_defect(basis: HermiteBasis, kmax: int = 10, step: float = 2e-4) -> float:
    """Worst relative residual of ``(d^2/dx^2 - lam^2 x^2) h_k = -|lam| (2k+1) h_k``.

    The second derivative is a central difference; points where ``h_k`` is
    tiny compared with its maximum are skipped.
    """
    kmax = min(kmax, basis.N)
    s = abs(basis.lam)
    x = np.linspace(-2.0, 2.0, 81) / math.sqrt(s)
    h0, hp, hm = basis.one_dim(x), basis.one_dim(x + step), basis.one_dim(x - step)
    worst = 0.0
    for k in range(kmax + 1):
        lhs = (hp[k] - 2 * h0[k] + hm[k]) / step**2 - basis.lam**2 * x * x * h0[k]
        rhs = -s * (2 * k + 1) * h0[k]
        keep = np.abs(h0[k]) > 1e-3 * np.abs(h0[k]).max()
        worst = max(worst, float(np.max(np.abs(lhs[keep] - rhs[keep]) / np.abs(rhs[keep]))))
    return worst


# ---------------------------------------------------------------------------
# real-axis kernel integral


def _mehler_direct(t, lam, x, xi):
    # straightforward Mehler formula, independent of the stable evaluation
    n = x.size
    s = 2 * abs(lam) * t
    if s == 0.0:
        return (4 * math.pi * t) ** (-n / 2) * math.exp(-float(((x - xi) ** 2).sum()) / (4 * t))
    if s > 700:
        return 0.0
    pref = (s / math.sinh(s)) ** (n / 2)
    quad = s / math.tanh(s) * float((x * x + xi * xi).sum()) - 2 * s / math.sinh(s) * float(x @ xi)
    return (4 * math.pi * t) ** (-n / 2) * pref * math.exp(-quad / (4 * t))


def direct_kernel_quadrature(t: float, x, xi, u: float, epsabs: float = 0.0,
                             epsrel: float = 1e-10) -> float:
    """``K_t(x, xi, u) = (1/pi) int_0^inf k_t^lam(x, xi) cos(lam u) d lam`` on the real axis.

    Uses QUADPACK's oscillatory-weight routine on ``[0, L]`` with ``L`` far
    enough out that the neglected tail is below ``1e-19`` relative to the
    integrand at the origin.  Only suitable where the result is not
    exponentially small compared with the integrand.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    n = x.size
    f = lambda lam: _mehler_direct(t, lam, x, xi)
    L = 45.0 / (n * t)
    if u == 0.0:
        val, _ = integrate.quad(f, 0, L, epsabs=epsabs, epsrel=epsrel, limit=500)
    else:
        val, _ = integrate.quad(f, 0, L, weight="cos", wvar=abs(u), epsabs=epsabs,
                                epsrel=epsrel, limit=2000)
    return val / math.pi
