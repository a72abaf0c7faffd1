"""Special functions of the Grušin geometry.

The boundary-value problem for geodesics and the contour-shifted heat kernel
integral are both governed by a handful of transcendental functions of a
frequency parameter ``b`` and a shape parameter ``a = 2 x1.x / (|x1|^2+|x|^2)``:

    mu_tilde(b) = b / sin(b)^2 - cot(b)
    mu_hat(b)   = b / cos(b)^2 + tan(b)
    mu(b, a)    = mu_tilde(b) + a (1 - b cot b) / sin(b)
    ell(b, a)   = b^2 / sin(b)^2 (1 - a cos b)
    delta(b)    = cos(b) + b/2 sin(b)

together with the complex functions ``psi`` and ``V`` that appear under the
kernel integral.  Everything is evaluated through the convex-combination forms

    mu(b, a) = (1-a) mu_tilde(b) + a mu_hat(b/2)        a >= 0
             = (1+a) mu_tilde(b) - a mu_tilde(b/2)      a <  0

which are free of the removable singularities at ``a = +-1`` and, combined with
factorial series for ``b - sin b cos b`` and ``sin b - b cos b``, free of
cancellation near ``b = 0``.

All real functions accept scalars or numpy arrays.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "DomainError",
    "mu",
    "mu_tilde",
    "mu_hat",
    "mu_prime",
    "mu_tilde_prime",
    "mu_hat_prime",
    "delta",
    "ell",
    "psi_ib",
    "psi_complex",
    "log_V_complex",
    "V_complex",
    "critical_point_tilde",
    "critical_point_hat",
    "critical_point_mu",
    "delta_zero",
    "level_set_roots",
    "principal_root",
    "shape_parameter",
]

# |b| below this uses the factorial series for b - sin b cos b, sin b - b cos b
SERIES_THRESHOLD = 1.0
_SERIES_TERMS = 16
# a within this distance of +-1 is treated as exactly +-1
A_SNAP = 1e-14
# |mu(b_m) - target| below this is reported as a single (tangent) root
TANGENCY_TOL = 1e-10

_XTOL = 1e-15
_RTOL = 4 * np.finfo(float).eps


class DomainError(ValueError):
    """Raised when a function is evaluated on one of its poles."""


def _as_float(x):
    x = np.asarray(x, dtype=float)
    return x


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def _check_poles(b, period, offset, name, allow_zero=True):
    """Raise DomainError if any b sits on offset + k*period."""
    k = np.rint((b - offset) / period)
    hit = np.abs(b - offset - k * period) <= 8 * np.finfo(float).eps * np.maximum(1.0, np.abs(b))
    if allow_zero and offset == 0.0:
        hit &= k != 0
    if np.any(hit):
        bad = float(np.asarray(b)[hit].ravel()[0])
        raise DomainError(f"{name} has a pole at b = {bad!r}")


def _snap_a(a):
    a = float(a)
    if not -1.0 - A_SNAP <= a <= 1.0 + A_SNAP:
        raise ValueError(f"shape parameter a must lie in [-1, 1], got {a!r}")
    if abs(a - 1.0) < A_SNAP:
        return 1.0
    if abs(a + 1.0) < A_SNAP:
        return -1.0
    return a


def _shape(a, complement=None):
    """Return (a, 1 - |a|), taking the complement from the caller when given.

    Callers that know ``|x -+ x1|^2 / R^2`` directly pass it as
    ``complement``: forming ``1 - |a|`` from a rounded ``a`` would lose every
    digit when the endpoints are nearly equal or nearly antipodal.
    """
    if complement is None:
        a = _snap_a(a)
        return a, 1.0 - abs(a)
    comp = float(complement)
    if not 0.0 <= comp <= 1.0:
        raise ValueError(f"complement 1 - |a| must lie in [0, 1], got {comp!r}")
    a = float(a)
    if comp == 0.0:
        a = math.copysign(1.0, a)
    return a, comp


def _series_even(b2, coef):
    # Horner in b^2
    out = np.zeros_like(b2)
    for c in coef[::-1]:
        out = out * b2 + c
    return out


# (b - sin b cos b) / b^3 and (sin b - b cos b) / b^3 as power series in b^2
_S2_COEF = np.array(
    [(-1) ** (k + 1) * 2.0 ** (2 * k) / math.factorial(2 * k + 1) for k in range(1, _SERIES_TERMS + 1)]
)
_S3_COEF = np.array(
    [(-1) ** (k + 1) * 2.0 * k / math.factorial(2 * k + 1) for k in range(1, _SERIES_TERMS + 1)]
)


def _s2_over_b3(b):
    """(b - sin b cos b) / b^3, even, equal to 2/3 at 0."""
    small = np.abs(b) < SERIES_THRESHOLD
    safe = np.where(small, 1.0, b)
    direct = (safe - np.sin(safe) * np.cos(safe)) / safe**3
    return np.where(small, _series_even(b * b, _S2_COEF), direct)


def _s3_over_b3(b):
    """(sin b - b cos b) / b^3, even, equal to 1/3 at 0."""
    small = np.abs(b) < SERIES_THRESHOLD
    safe = np.where(small, 1.0, b)
    direct = (np.sin(safe) - safe * np.cos(safe)) / safe**3
    return np.where(small, _series_even(b * b, _S3_COEF), direct)


def _b_over_sin(b):
    return 1.0 / np.sinc(b / np.pi)


def mu_tilde(b):
    """``b / sin(b)^2 - cot(b)``, odd, with ``mu_tilde(0) = 0``."""
    b = _as_float(b)
    _check_poles(b, np.pi, 0.0, "mu_tilde")
    bs = _b_over_sin(b)
    return _out(b * _s2_over_b3(b) * bs * bs)


def mu_tilde_prime(b):
    """Derivative of :func:`mu_tilde`, ``2 (1 - b cot b) / sin(b)^2``."""
    b = _as_float(b)
    _check_poles(b, np.pi, 0.0, "mu_tilde_prime")
    bs = _b_over_sin(b)
    return _out(2.0 * _s3_over_b3(b) * bs**3)


def mu_hat(b):
    """``b / cos(b)^2 + tan(b)``, odd."""
    b = _as_float(b)
    _check_poles(b, np.pi, np.pi / 2, "mu_hat")
    c = np.cos(b)
    return _out(b / (c * c) + np.tan(b))


def mu_hat_prime(b):
    """Derivative of :func:`mu_hat`, ``2 (1 + b tan b) / cos(b)^2``."""
    b = _as_float(b)
    _check_poles(b, np.pi, np.pi / 2, "mu_hat_prime")
    c = np.cos(b)
    return _out(2.0 * (1.0 + b * np.tan(b)) / (c * c))


def mu(b, a, complement=None):
    """Boundary function ``mu(b, a)`` whose level sets ``2u/R^2`` give geodesics.

    Parameters
    ----------
    b : float or ndarray
        Frequency parameter.  Poles at ``b in pi Z \\ {0}``, except that for
        ``a = 1`` only the odd multiples and for ``a = -1`` only the even
        multiples of ``pi`` remain.
    a : float
        Shape parameter in ``[-1, 1]``.
    complement : float, optional
        Exact value of ``1 - |a|`` if the caller has it.
    """
    a, comp = _shape(a, complement)
    b = _as_float(b)
    if comp == 0.0:
        return mu_hat(b / 2) if a > 0 else mu_tilde(b / 2)
    half = mu_hat(b / 2) if a >= 0 else mu_tilde(b / 2)
    return _out(comp * np.asarray(mu_tilde(b)) + abs(a) * np.asarray(half))


def mu_prime(b, a, complement=None):
    """Derivative of :func:`mu` in ``b``."""
    a, comp = _shape(a, complement)
    b = _as_float(b)
    half = mu_hat_prime(b / 2) if a >= 0 else mu_tilde_prime(b / 2)
    if comp == 0.0:
        return _out(0.5 * np.asarray(half))
    return _out(comp * np.asarray(mu_tilde_prime(b)) + 0.5 * abs(a) * np.asarray(half))


def delta(b):
    """``cos(b) + b/2 sin(b)``."""
    b = _as_float(b)
    return _out(np.cos(b) + 0.5 * b * np.sin(b))


def ell(b, a, complement=None):
    """Squared-length function ``b^2/sin(b)^2 (1 - a cos b)``; ``ell(0, a) = 1 - a``.

    A geodesic with parameter ``b`` between points with ``R^2 = |x1|^2+|x|^2``
    has squared length ``R^2 ell(b, a)``.
    """
    a, comp = _shape(a, complement)
    b = _as_float(b)
    h = 0.5 * b
    if a >= 0:
        _check_poles(b, 2 * np.pi, np.pi, "ell")
        half = b * b / (2 * np.cos(h) ** 2)
    else:
        _check_poles(b, 2 * np.pi, 0.0, "ell")
        half = 2.0 * _b_over_sin(h) ** 2
    if comp == 0.0:
        return _out(half)
    _check_poles(b, np.pi, 0.0, "ell")
    return _out(comp * _b_over_sin(b) ** 2 + abs(a) * half)


def psi_ib(b, a, complement=None):
    """``psi(i b) = b cot b - a b / sin b`` (real) for ``|b| < pi``."""
    a, comp = _shape(a, complement)
    b = _as_float(b)
    if np.any(np.abs(b) >= np.pi):
        raise DomainError("psi_ib requires |b| < pi")
    h = 0.5 * b
    # b tan(b/2) and b cot(b/2), both even and regular on |b| < pi
    half = -b * np.tan(h) if a >= 0 else 2 * np.cos(h) * _b_over_sin(h)
    if comp == 0.0:
        return _out(half)
    return _out(comp * np.cos(b) * _b_over_sin(b) + abs(a) * half)


# ---------------------------------------------------------------------------
# complex functions on the strip |Im lambda| < pi


def _fold(lam):
    # all complex functions below are even in lambda
    lam = np.asarray(lam, dtype=complex)
    return np.where(lam.real < 0, -lam, lam)


def _lam_coth(lam):
    """lambda coth(lambda) for Re(lambda) >= 0, equal to 1 at 0."""
    small = np.abs(lam) < 1e-4
    safe = np.where(small, 1.0, lam)
    big = safe.real > 20
    safe_mid = np.where(big, 1.0, safe)
    mid = safe_mid / np.tanh(safe_mid)
    e = np.exp(-2 * np.where(big, safe, 1.0))
    far = safe * (1 + e) / (1 - e)
    l2 = lam * lam
    series = 1 + l2 / 3 - l2 * l2 / 45
    return np.where(small, series, np.where(big, far, mid))


def _lam_tanh_half(lam):
    """lambda tanh(lambda/2) for Re(lambda) >= 0."""
    big = lam.real > 40
    mid = lam * np.tanh(np.where(big, 0.0, lam) / 2)
    e = np.exp(-np.where(big, lam, 0.0))
    far = lam * (1 - e) / (1 + e)
    return np.where(big, far, mid)


def psi_complex(nu, b, a, complement=None):
    """``psi(lambda) = lambda coth(lambda) - a lambda / sinh(lambda)`` at ``lambda = nu + i b``.

    Evaluated as ``(1-a) lambda coth(lambda) + a lambda tanh(lambda/2)`` for
    ``a >= 0`` and ``(1+a) lambda coth(lambda) - a lambda coth(lambda/2)`` for
    ``a < 0``, which are holomorphic on ``|b| < pi`` for every ``a`` in
    ``[-1, 1]``.
    """
    a, comp = _shape(a, complement)
    if np.any(np.abs(np.asarray(b)) >= np.pi):
        raise DomainError("psi_complex requires |b| < pi")
    lam = _fold(np.asarray(nu, dtype=float) + 1j * np.asarray(b, dtype=float))
    half = _lam_tanh_half(lam) if a >= 0 else 2 * _lam_coth(lam / 2)
    out = half if comp == 0.0 else comp * _lam_coth(lam) + abs(a) * half
    return complex(out) if np.ndim(out) == 0 else out


def log_V_complex(nu, b, n):
    """Principal logarithm of ``V(lambda) = (lambda / sinh lambda)^(n/2)``.

    Uses ``log sinh(lambda) = lambda - log 2 + log(1 - exp(-2 lambda))`` once
    ``Re(lambda) > 1`` so that nothing overflows.  The imaginary part of
    ``log(lambda / sinh lambda)`` is wrapped into ``(-pi, pi]`` before scaling
    by ``n/2``, which is the principal branch of the power.
    """
    if np.any(np.abs(np.asarray(b)) >= np.pi):
        raise DomainError("V_complex requires |b| < pi")
    lam = _fold(np.asarray(nu, dtype=float) + 1j * np.asarray(b, dtype=float))
    near = np.abs(lam) < 1.0
    lam_near = np.where(near, lam, 0.5)
    lam_far = np.where(near, 2.0, lam)
    tiny = np.abs(lam_near) < 1e-5
    q = np.where(tiny, 1 - lam_near**2 / 6, lam_near / np.sinh(np.where(tiny, 1.0, lam_near)))
    log_near = np.log(q)
    log_far = np.log(lam_far) - lam_far + np.log(2.0) - np.log1p(-np.exp(-2 * lam_far))
    log_far = log_far.real + 1j * np.angle(np.exp(1j * log_far.imag))
    out = 0.5 * n * np.where(near, log_near, log_far)
    return complex(out) if np.ndim(out) == 0 else out


def V_complex(nu, b, n):
    """``(lambda / sinh lambda)^(n/2)`` at ``lambda = nu + i b`` (principal branch)."""
    out = np.exp(log_V_complex(nu, b, n))
    return complex(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# critical points and level sets


def _root(f, lo, hi):
    return brentq(f, lo, hi, xtol=_XTOL, rtol=_RTOL, maxiter=200)


def critical_point_tilde(m: int) -> float:
    """Critical point of ``mu_tilde`` in ``(m pi, (m+1) pi)``, i.e. the root of ``tan b = b``.

    It lies in ``(m pi, m pi + pi/2)`` and satisfies ``mu_tilde(b) = b``.
    """
    if m < 1:
        raise ValueError("critical_point_tilde needs m >= 1")
    g = lambda b: math.sin(b) - b * math.cos(b)
    return _root(g, m * math.pi, m * math.pi + math.pi / 2)


def critical_point_hat(m: int) -> float:
    """Critical point of ``mu_hat`` in ``(m pi + pi/2, (m+1) pi + pi/2)``: root of ``1 + b tan b``.

    It lies in ``(m pi + pi/2, (m+1) pi)`` and satisfies ``mu_hat(b) = b``.
    """
    if m < 0:
        raise ValueError("critical_point_hat needs m >= 0")
    g = lambda b: math.cos(b) + b * math.sin(b)
    return _root(g, m * math.pi + math.pi / 2, (m + 1) * math.pi)


def critical_point_mu(m: int, a: float, complement=None) -> float:
    """Unique minimum of ``mu(., a)`` on ``(m pi, (m+1) pi)`` for ``-1 < a < 1``.

    The zero set of ``mu'`` on the open interval coincides with that of the
    pole-free function ``sin(b)^3 mu'(b)``, which changes sign on the closed
    interval, so the root is bracketed without touching the poles.
    """
    if m < 1:
        raise ValueError("critical_point_mu needs m >= 1")
    a, comp = _shape(a, complement)
    if comp == 0.0:
        raise DomainError("critical_point_mu needs -1 < a < 1; use the hat/tilde critical points")

    def g(b):
        # sin(b)^3 mu'(b) / 2, regrouped with half-angle factors so that the
        # weight comp and the vanishing pole keep their digits
        h = 0.5 * b
        sh, ch = math.sin(h), math.cos(h)
        s3 = math.sin(b) - b * math.cos(b)
        if a >= 0:
            return s3 * comp + 2 * a * sh**3 * (2 * ch + b * sh)
        return s3 * comp - 2 * a * ch**3 * (2 * sh - b * ch)

    return _root(g, m * math.pi, (m + 1) * math.pi)


def delta_zero(m: int) -> float:
    """Zero of :func:`delta` in ``(m pi, (m+1) pi)``, ``m >= 0``."""
    if m < 0:
        raise ValueError("delta_zero needs m >= 0")
    return _root(lambda b: math.cos(b) + 0.5 * b * math.sin(b), m * math.pi, (m + 1) * math.pi)


def _branches(a: float, comp: float, b_max: float):
    """Yield (lo, hi, critical) for each branch of mu(., a) meeting (0, b_max].

    The first branch starts at 0 and is monotone (critical is None); the
    others have poles at both ends and a unique interior minimum.
    """
    if comp == 0.0 and a > 0:
        yield 0.0, math.pi, None
        k = 0
        while (2 * k + 1) * math.pi < b_max:
            yield (2 * k + 1) * math.pi, (2 * k + 3) * math.pi, 2 * critical_point_hat(k)
            k += 1
    elif comp == 0.0:
        yield 0.0, 2 * math.pi, None
        k = 1
        while 2 * k * math.pi < b_max:
            yield 2 * k * math.pi, 2 * (k + 1) * math.pi, 2 * critical_point_tilde(k)
            k += 1
    else:
        yield 0.0, math.pi, None
        m = 1
        while m * math.pi < b_max:
            yield m * math.pi, (m + 1) * math.pi, critical_point_mu(m, a, comp)
            m += 1


def _near_pole(f, pole, inward):
    """Point pole + inward*eps at which f > 0, shrinking eps geometrically."""
    eps = 1e-3
    while eps > 1e-15 * max(1.0, pole):
        b = pole + inward * eps
        if f(b) > 0:
            return b
        eps /= 8
    return None


def level_set_roots(target: float, a: float, b_max: float, complement=None) -> list[float]:
    """All ``b`` in ``[0, b_max]`` with ``mu(b, a) = target`` (``target >= 0``), sorted.

    On the first branch there is exactly one root.  On every later branch
    the function is unimodal, so there are 0, 1 (tangency, within
    ``TANGENCY_TOL``) or 2 roots, located by bracketing on either side of the
    branch minimum.
    """
    if target < 0:
        raise ValueError("level_set_roots expects target >= 0 (use the odd symmetry)")
    a, comp = _shape(a, complement)
    f = lambda b: float(mu(b, a, comp)) - target
    roots: list[float] = []
    for lo, hi, crit in _branches(a, comp, b_max):
        if crit is None:
            roots.append(principal_root(target, a, comp))
            continue
        # with a weight near zero the minimum can sit on the vanishing pole
        crit = min(max(crit, math.nextafter(lo, hi)), math.nextafter(hi, lo))
        gap = f(crit)
        if gap > TANGENCY_TOL:
            continue
        if abs(gap) <= TANGENCY_TOL:
            roots.append(crit)
            continue
        left = _near_pole(f, lo, +1)
        right = _near_pole(f, hi, -1)
        if left is not None:
            roots.append(_root(f, left, crit))
        if right is not None:
            roots.append(_root(f, crit, right))
    return sorted(r for r in roots if r <= b_max)


def principal_root(target: float, a: float, complement=None) -> float:
    """The root of ``mu(b, a) = target`` on the first branch (``target >= 0``).

    The first branch is ``(0, pi)``, or ``(0, 2 pi)`` when ``a = -1``; ``mu``
    increases from 0 to infinity there, so the root always exists.
    """
    if target < 0:
        raise ValueError("principal_root expects target >= 0")
    if target == 0.0:
        return 0.0
    a, comp = _shape(a, complement)
    hi = 2 * math.pi if (comp == 0.0 and a < 0) else math.pi
    f = lambda b: float(mu(b, a, comp)) - target
    right = _near_pole(f, hi, -1)
    if right is None:
        return math.nextafter(hi, 0.0)
    return _root(f, 0.0, right)


def shape_parameter(x1, x) -> tuple[float, float, float]:
    """``(R^2, a, 1 - |a|)`` for a pair of horizontal positions.

    ``R^2 = |x1|^2 + |x|^2`` and ``a = 2 x1.x / R^2``.  The complement is taken
    from ``|x -+ x1|^2 / R^2`` rather than from ``a``.  At ``R = 0`` the
    shape is undefined and ``(0, 0, 1)`` is returned.
    """
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    R2 = float(x1 @ x1 + x @ x)
    if R2 == 0.0:
        return 0.0, 0.0, 1.0
    a = min(1.0, max(-1.0, 2 * float(x1 @ x) / R2))
    gap = x - x1 if a >= 0 else x + x1
    return R2, a, min(1.0, float(gap @ gap) / R2)
