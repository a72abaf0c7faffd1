"""Heat kernel of the Grušin operator.

Fourier transforming ``G = Delta_x + |x|^2 d_u^2`` in ``u`` gives the scaled
harmonic oscillator ``Delta - lambda^2 |x|^2``, whose heat kernel is Mehler's
``k_t^lambda``.  Inverting the transform,

    K_t(x, xi, u) = (4 pi t)^(-n/2-1) h(x / 2 sqrt(t), xi / 2 sqrt(t), u / 4t)
    h(x, xi, u)   = int V(lambda) exp(-psi(lambda) R^2 + 2 i lambda u) d lambda

with ``V = (lambda / sinh lambda)^(n/2)``.  The integrand is holomorphic on
``|Im lambda| < pi``.  Moving the line of integration to ``R + i b`` with
``b`` near the minimizing geodesic parameter turns the oscillatory integral
into one of size ``exp(-d^2)`` that is computed to full relative accuracy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from ._quadrature import QuadratureError, adaptive_integrate
from .geodesics import cc_distance
from .scalar_functions import log_V_complex, psi_complex, psi_ib, shape_parameter

__all__ = [
    "KernelConfig",
    "KernelValue",
    "QuadratureError",
    "mehler_kernel",
    "hermite_eigenvalue",
    "integrand",
    "auto_shift",
    "h_scaled",
    "heat_kernel",
]

# the automatic shift never comes closer than this to the strip edge
MAX_SHIFT = 0.999 * math.pi
# the truncation point is doubled at most up to this value
_LAMBDA_LIMIT = 4096.0


@dataclass(frozen=True)
class KernelConfig:
    """Settings for evaluating the kernel integral.

    Parameters
    ----------
    n : int
        Dimension of the ``x`` variable.
    rel_tol : float
        Relative tolerance of the quadrature.
    lambda_cut : float, optional
        Truncate the integral to ``|Re lambda| <= lambda_cut``.  By default the
        cut is chosen adaptively from a rigorous tail bound.
    shift_policy : {"auto", "none"} or float
        Imaginary part of the integration line.  ``"auto"`` uses
        ``b0 (1 - 1/(1 + d^2))`` from the minimizing geodesic.
    """

    n: int
    rel_tol: float = 1e-8
    lambda_cut: float | None = None
    shift_policy: Union[str, float] = "auto"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if not 0 < self.rel_tol < 1:
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol!r}")
        if self.lambda_cut is not None and self.lambda_cut <= 0:
            raise ValueError("lambda_cut must be positive")
        policy = self.shift_policy
        if isinstance(policy, str):
            if policy not in ("auto", "none"):
                raise ValueError(f"unknown shift policy {policy!r}")
        elif not abs(float(policy)) < math.pi:
            raise ValueError("a fixed shift must satisfy |b| < pi")


@dataclass(frozen=True)
class KernelValue:
    """A kernel value with its quadrature error estimate and the shift used."""

    value: float
    abs_err_est: float
    shift_used: float

    def to_dict(self) -> dict:
        return {"value": self.value, "abs_err_est": self.abs_err_est, "shift_used": self.shift_used}


def _vec(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float))


def mehler_kernel(t: float, lam: float, x, xi, n: int | None = None) -> float:
    """Heat kernel ``k_t^lambda(x, xi)`` of ``Delta - lambda^2 |x|^2`` on ``R^n``.

    Evaluated in log space, so large ``|lambda| t`` does not overflow; at
    ``lambda = 0`` it is the Euclidean heat kernel.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    x, xi = _vec(x), _vec(xi)
    if n is None:
        n = x.size
    if x.size != n or xi.size != n:
        raise ValueError("x and xi must have dimension n")
    s = 2 * abs(float(lam)) * t
    R2, a, comp = shape_parameter(x, xi)
    # psi(s) R^2 = s coth(s) R^2 - 2 s / sinh(s) x.xi in the stable convex form
    quad = float(psi_complex(s, 0.0, a, comp).real) * R2
    log_pref = float(log_V_complex(s, 0.0, n).real)
    return math.exp(-0.5 * n * math.log(4 * math.pi * t) + log_pref - quad / (4 * t))


def hermite_eigenvalue(alpha_total: int, lam: float, n: int) -> float:
    """Eigenvalue ``-|lambda| (2 |alpha| + n)`` of the scaled Hermite function ``h_alpha^lambda``."""
    if alpha_total < 0:
        raise ValueError("alpha_total must be nonnegative")
    return -abs(lam) * (2 * alpha_total + n)


def integrand(lambda_re, shift_b: float, R: float, a: float, u: float, n: int,
              complement: float | None = None):
    """``V(lambda) exp(-psi(lambda) R^2 + 2 i lambda u)`` at ``lambda = lambda_re + i shift_b``."""
    lambda_re = np.asarray(lambda_re, dtype=float)
    log_val = (
        log_V_complex(lambda_re, shift_b, n)
        - psi_complex(lambda_re, shift_b, a, complement) * (R * R)
        + 2j * (lambda_re + 1j * shift_b) * u
    )
    out = np.exp(log_val)
    return complex(out) if np.ndim(out) == 0 else out


def auto_shift(x, xi, u: float) -> float:
    """The shift ``b0 (1 - 1/(1 + d^2))`` for the pair ``(x, 0)``, ``(xi, u)``, clipped below pi."""
    res = cc_distance(np.append(_vec(x), 0.0), np.append(_vec(xi), u))
    b = res.b0 * (1 - 1 / (1 + res.d**2))
    return max(-MAX_SHIFT, min(MAX_SHIFT, b))


def _tail_bound(lam_cut: float, b: float, R2: float, a: float, comp: float, u: float, n: int) -> float:
    """Bound on the integrand mass beyond ``|Re lambda| > lam_cut`` (both sides).

    Uses ``Re psi(nu + ib) >= psi(ib)`` and
    ``|V(nu + ib)| <= (1 + b^2/nu^2)^(n/4) (nu / sinh nu)^(n/2)``.
    """
    L = lam_cut
    if L <= 1.0:
        return math.inf
    k = 0.5 * n
    log_bound = (
        math.log(2.0)
        - float(psi_ib(b, a, comp)) * R2 - 2 * b * u
        + 0.25 * n * math.log1p(b * b / (L * L))
        + k * (math.log(2.0) - math.log1p(-math.exp(-2 * L)))
        + k * math.log(L) - k * L
        - math.log(k * (1 - 1 / L))
    )
    return math.exp(log_bound)


def _breakpoints(hi: float, scale: float, symmetric: bool = True) -> np.ndarray:
    """Panel edges on ``[-hi, hi]`` (or ``[0, hi]``), of width ``scale`` near 0 and growing outwards."""
    pts = [0.0]
    w = scale
    while w < hi:
        pts.append(w)
        w *= 4
    right = np.array(pts + [hi])
    right = right[right <= hi]
    if not symmetric:
        return np.unique(right)
    return np.unique(np.concatenate([-right[::-1], right]))


def _resolve_shift(x, xi, u, policy) -> float:
    if isinstance(policy, str):
        return 0.0 if policy == "none" else auto_shift(x, xi, u)
    return float(policy)


def h_scaled(x, xi, u: float, cfg: KernelConfig) -> KernelValue:
    """The scaled kernel integral ``h(x, xi, u)``.

    Raises
    ------
    QuadratureError
        If the adaptive quadrature or the truncation does not converge;
        ``partial`` carries the estimate obtained so far.
    """
    x, xi = _vec(x), _vec(xi)
    if x.size != cfg.n or xi.size != cfg.n:
        raise ValueError(f"x and xi must have dimension {cfg.n}")
    u = float(u)
    R2, a, comp = shape_parameter(x, xi)
    b = _resolve_shift(x, xi, u, cfg.shift_policy)
    R = math.sqrt(R2)
    f = lambda nu: integrand(nu, b, R, a, u, cfg.n, comp)
    # the nearest singularity of the integrand sits at distance pi - |b|
    scale = min(1.0, math.pi - abs(b))
    if u != 0.0:
        scale = min(scale, math.pi / (4 * abs(u)))

    if cfg.lambda_cut is not None:
        value, err = adaptive_integrate(f, _breakpoints(cfg.lambda_cut, scale), cfg.rel_tol)
    else:
        cut = 16.0
        value, err = adaptive_integrate(f, _breakpoints(cut, scale), 0.1 * cfg.rel_tol)
        while _tail_bound(cut, b, R2, a, comp, u, cfg.n) > 0.1 * cfg.rel_tol * abs(value):
            if cut >= _LAMBDA_LIMIT:
                raise QuadratureError("tail bound did not fall below tolerance", value, err)
            # integrate the two new outer pieces only
            outer = _breakpoints(2 * cut, scale, symmetric=False)
            outer = np.concatenate([[cut], outer[outer > cut]])
            right, e1 = adaptive_integrate(f, outer, 0.1 * cfg.rel_tol, abs_tol=0.05 * cfg.rel_tol * abs(value))
            left, e2 = adaptive_integrate(f, -outer[::-1], 0.1 * cfg.rel_tol, abs_tol=0.05 * cfg.rel_tol * abs(value))
            value += right + left
            err += e1 + e2
            cut *= 2
        err += _tail_bound(cut, b, R2, a, comp, u, cfg.n)

    re, im = value.real, value.imag
    # the quadrature error itself is allowed for, or cancellation on an
    # unshifted line would trip the check
    if abs(im) > 10 * cfg.rel_tol * abs(re) + 1e-300 + err:
        raise QuadratureError(f"kernel integral has a spurious imaginary part {im!r}", value, err)
    return KernelValue(float(re), float(err), b)


def heat_kernel(t: float, x, xi, u: float, cfg: KernelConfig) -> KernelValue:
    """``K_t(x, xi, u)`` computed through the scaled integral ``h``."""
    if t <= 0:
        raise ValueError("t must be positive")
    s = 2 * math.sqrt(t)
    hv = h_scaled(_vec(x) / s, _vec(xi) / s, u / (4 * t), cfg)
    scale = (4 * math.pi * t) ** (-0.5 * cfg.n - 1)
    return KernelValue(scale * hv.value, scale * hv.abs_err_est, hv.shift_used)
