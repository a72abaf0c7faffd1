"""Geodesics and Carnot–Carathéodory distance of the Grušin geometry.

Horizontal curves are spanned by ``d/dx_j`` and ``x_j d/du``.  Every geodesic
leaving ``(x1, u1)`` belongs to the two-parameter family

    gamma_1(t) = c sin(bt)/b + x1 cos(bt)
    gamma_2(t) = |c|^2 (t/2 - sin(2bt)/(4b)) / b + (x1.c) sin(bt)^2 / b
                 + |x1|^2 (bt/2 + sin(2bt)/4) + u1

whose member with ``b = 0`` is the straight segment ``(ct + x1, u1)``.  Its
length is ``sqrt(|c|^2 + |x1|^2 b^2)``.  Connecting two given points reduces
to a level-set problem for ``mu`` (see :mod:`grusin.scalar_functions`).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .scalar_functions import (
    DomainError,
    ell,
    level_set_roots,
    mu,
    principal_root,
    psi_ib,
    shape_parameter,
)

__all__ = [
    "Point",
    "as_point",
    "GeodesicSpec",
    "DistanceResult",
    "CASES",
    "eval_geodesic",
    "sample_geodesic",
    "geodesic_length",
    "solve_c",
    "cc_distance",
    "enumerate_geodesics",
    "boundary_residual",
]

logger = logging.getLogger(__name__)

CASES = (
    "same-fiber",
    "origin-pair",
    "generic",
    "equal-x",
    "antipodal-x-small-u",
    "antipodal-x-large-u",
)

# endpoints with |x -+ x1| <= EXACT_TOL * R are treated as exactly equal or
# antipodal; the distance is continuous there with an error of order
# sqrt(|x -+ x1| / R), so the threshold is kept close to rounding level
EXACT_TOL = 1e-12
# relative disagreement between the two distance formulas that gets logged
CROSS_CHECK_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Point:
    """A point ``(x, u)`` of ``R^n x R``."""

    x: np.ndarray
    u: float

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float)).copy()
        if x.ndim != 1 or x.size == 0:
            raise ValueError("x must be a non-empty vector")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "u", float(self.u))

    @classmethod
    def from_coords(cls, coords: Sequence[float]) -> "Point":
        """Build a point from ``(x_1, ..., x_n, u)``."""
        coords = [float(v) for v in coords]
        if len(coords) < 2:
            raise ValueError("a point needs at least one x coordinate and u")
        return cls(np.array(coords[:-1]), coords[-1])

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def coords(self) -> np.ndarray:
        return np.append(self.x, self.u)

    def dilate(self, r: float) -> "Point":
        """Image under the dilation ``(x, u) -> (r x, r^2 u)``."""
        return Point(r * self.x, r * r * self.u)

    def allclose(self, other: "Point", atol: float = 1e-8) -> bool:
        return bool(np.allclose(self.coords, as_point(other).coords, rtol=0, atol=atol))

    def __repr__(self) -> str:
        return f"Point(x={self.x.tolist()}, u={self.u!r})"


def as_point(p) -> Point:
    """Accept a :class:`Point` or a flat coordinate sequence ending with ``u``."""
    if isinstance(p, Point):
        return p
    return Point.from_coords(p)


@dataclass(frozen=True, eq=False)
class GeodesicSpec:
    """One member ``gamma^{b,c}`` of the geodesic family starting at ``start``.

    ``degenerate`` marks members with ``b`` a nonzero multiple of ``pi``; these
    come in sphere families where only ``|c|`` is fixed by the endpoint, and
    ``c`` is a canonical representative.
    """

    start: Point
    b: float
    c: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=float)).copy()
        if c.shape != self.start.x.shape:
            raise ValueError("c must have the same dimension as the start point")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "b", float(self.b))

    def to_dict(self) -> dict:
        return {
            "start": self.start.coords.tolist(),
            "b": self.b,
            "c": self.c.tolist(),
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True, eq=False)
class DistanceResult:
    """Carnot–Carathéodory distance with the data of a minimizing geodesic."""

    d: float
    b0: float
    case: str
    geodesic: GeodesicSpec

    def to_dict(self) -> dict:
        return {"d": self.d, "b0": self.b0, "case": self.case, "geodesic": self.geodesic.to_dict()}


def _sin_over_b(bt, t):
    # sin(bt)/b = t sinc(bt/pi), regular at b = 0
    return t * np.sinc(bt / np.pi)


def _chord_term(z):
    """(z - sin z) / z^2, odd, regular at 0."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1.0
    safe = np.where(small, 1.0, z)
    direct = (safe - np.sin(safe)) / safe**2
    z2 = z * z
    series = np.zeros_like(z)
    # sum_k (-1)^k z^(2k+1) / (2k+3)!
    for k in range(12, -1, -1):
        series = series * z2 + (-1) ** k / math.factorial(2 * k + 3)
    return np.where(small, z * series, direct)


def sample_geodesic(spec: GeodesicSpec, t) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate a geodesic at an array of times.

    Returns
    -------
    x : ndarray, shape (len(t), n)
    u : ndarray, shape (len(t),)
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    b = spec.b
    x1, c = spec.start.x, spec.c
    bt = b * t
    sb = _sin_over_b(bt, t)
    x = np.outer(sb, c) + np.outer(np.cos(bt), x1)
    u = (
        float(c @ c) * t * t * _chord_term(2 * bt)
        + float(x1 @ c) * np.sin(bt) * sb
        + float(x1 @ x1) * (0.5 * bt + 0.25 * np.sin(2 * bt))
        + spec.start.u
    )
    return x, u


def eval_geodesic(spec: GeodesicSpec, t: float) -> Point:
    """The point ``gamma^{b,c}(t)``."""
    x, u = sample_geodesic(spec, [t])
    return Point(x[0], u[0])


def geodesic_length(spec: GeodesicSpec) -> float:
    """Length ``sqrt(|c|^2 + |x_start|^2 b^2)`` on ``t in [0, 1]``."""
    return math.sqrt(float(spec.c @ spec.c) + float(spec.start.x @ spec.start.x) * spec.b**2)


def solve_c(b: float, x1, x) -> np.ndarray:
    """Initial velocity ``c = (b / sin b)(x - x1 cos b)`` of the geodesic reaching ``x``.

    Evaluated as ``(x+x1)/2 * b tan(b/2) + (x-x1)/2 * b cot(b/2)`` so that the
    pole cancels when ``x = -x1`` (at odd multiples of pi) or ``x = x1`` (at
    even multiples).

    Raises
    ------
    DomainError
        If ``b`` is a nonzero multiple of ``pi`` at which ``c`` is not
        determined by the endpoint.
    """
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    b = float(b)
    plus, minus = 0.5 * (x + x1), 0.5 * (x - x1)
    h = 0.5 * b
    c = np.zeros_like(x)
    if np.any(plus):
        if abs(math.cos(h)) < 1e-15:
            raise DomainError(f"solve_c has a pole at b = {b!r}")
        c = c + plus * (b * math.tan(h))
    if np.any(minus):
        if b != 0.0 and abs(math.sin(h)) < 1e-15 * max(1.0, abs(h)):
            raise DomainError(f"solve_c has a pole at b = {b!r}")
        c = c + minus * (2 * math.cos(h) / np.sinc(h / np.pi))
    return c


def _unit_direction(x_start: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(x_start))
    if norm > 0:
        return x_start / norm
    e = np.zeros_like(x_start)
    e[0] = 1.0
    return e


def _degenerate_spec(start: Point, m: int, U: float, sign: float) -> GeodesicSpec | None:
    """Sphere-family member with ``b = sign * m * pi`` reaching fiber offset ``U``."""
    b = m * math.pi
    c2 = 2 * b * U - float(start.x @ start.x) * b * b
    if c2 < 0:
        return None
    c = math.sqrt(c2) * _unit_direction(start.x)
    return GeodesicSpec(start, sign * b, c, degenerate=True)


class _Config:
    """Reduced description of a pair of endpoints."""

    def __init__(self, p1: Point, p2: Point):
        if p1.n != p2.n:
            raise ValueError(f"dimension mismatch: {p1.n} vs {p2.n}")
        self.p1, self.p2 = p1, p2
        self.x1, self.x = p1.x, p2.x
        du = p2.u - p1.u
        self.sign = -1.0 if du < 0 else 1.0
        self.U = abs(du)
        self.R2 = float(self.x1 @ self.x1 + self.x @ self.x)
        R = math.sqrt(self.R2)
        gap_plus = float(np.linalg.norm(self.x + self.x1))
        gap_minus = float(np.linalg.norm(self.x - self.x1))
        # |d - sqrt(2 pi U)| <= |x| + |x1| by the triangle inequality through
        # (0, u1) and (0, u), so a vanishing R relative to sqrt(U) is the origin pair
        if self.R2 == 0.0 or self.R2 <= EXACT_TOL**2 * self.U:
            self.kind = "origin"
        elif gap_plus <= EXACT_TOL * R:
            self.kind = "antipodal"
        elif gap_minus <= EXACT_TOL * R:
            self.kind = "equal"
        else:
            self.kind = "generic"
        if self.R2 > 0:
            _, self.a, self.comp = shape_parameter(self.x1, self.x)
            if self.kind == "antipodal":
                self.a, self.comp = -1.0, 0.0
            elif self.kind == "equal":
                self.a, self.comp = 1.0, 0.0

    @property
    def target(self) -> float:
        return 2 * self.U / self.R2

    def connecting_spec(self, b: float) -> GeodesicSpec:
        c = solve_c(b, self.x1, self.x)
        return GeodesicSpec(self.p1, self.sign * b, c)


def cc_distance(p1, p2) -> DistanceResult:
    """Carnot–Carathéodory distance between two points.

    The pair is translated so that ``u1 = 0`` and reflected so that
    ``u >= 0``.  Then one of the following applies:

    * ``u = 0``: the straight segment, ``d = |x - x1|``;
    * ``x1 = x = 0``: ``d = sqrt(2 pi u)``;
    * ``x1 = -x`` with ``2u >= pi |x|^2``: ``d = sqrt(2 pi u)``;
    * otherwise ``d = R sqrt(ell(b0, a))`` with ``b0`` the root of
      ``mu(b, a) = 2u / R^2`` on the first branch.

    The reported ``b0`` carries the sign of ``u - u1``.
    """
    p1, p2 = as_point(p1), as_point(p2)
    cfg = _Config(p1, p2)
    if cfg.U == 0.0:
        d = float(np.linalg.norm(cfg.x - cfg.x1))
        return DistanceResult(d, 0.0, "same-fiber", GeodesicSpec(p1, 0.0, cfg.x - cfg.x1))
    if cfg.kind == "origin":
        return DistanceResult(
            math.sqrt(2 * math.pi * cfg.U), cfg.sign * math.pi, "origin-pair",
            _degenerate_spec(p1, 1, cfg.U, cfg.sign),
        )
    if cfg.kind == "antipodal" and cfg.U >= 0.25 * math.pi * cfg.R2:
        spec = _degenerate_spec(p1, 1, cfg.U, cfg.sign)
        if spec is None:
            # rounding at the threshold 2u = pi |x|^2
            spec = GeodesicSpec(p1, cfg.sign * math.pi, np.zeros(p1.n), degenerate=True)
        return DistanceResult(math.sqrt(2 * math.pi * cfg.U), cfg.sign * math.pi, "antipodal-x-large-u", spec)

    b0 = principal_root(cfg.target, cfg.a, cfg.comp)
    d2 = cfg.R2 * float(ell(b0, cfg.a, cfg.comp))
    if b0 < 0.99 * math.pi:
        alt = 2 * b0 * cfg.U + float(psi_ib(b0, cfg.a, cfg.comp)) * cfg.R2
        if abs(alt - d2) > CROSS_CHECK_TOL * d2:
            logger.warning("distance formulas disagree: %r vs %r at b0=%r", d2, alt, b0)
    case = {"generic": "generic", "equal": "equal-x", "antipodal": "antipodal-x-small-u"}[cfg.kind]
    return DistanceResult(math.sqrt(d2), cfg.sign * b0, case, cfg.connecting_spec(b0))


def enumerate_geodesics(p1, p2, b_max: float) -> list[tuple[GeodesicSpec, float]]:
    """All geodesics from ``p1`` to ``p2`` with ``|b| <= b_max``, sorted by ``|b|``.

    Besides the roots of the boundary equation on every branch, this includes
    one canonical member of each admissible sphere family at ``b`` a multiple
    of ``pi`` (endpoints on a common fiber through the origin, equal ``x``
    with ``b`` an even multiple, or antipodal ``x`` with ``b`` an odd
    multiple).

    Returns
    -------
    list of (GeodesicSpec, float)
        Each geodesic paired with its length.
    """
    if b_max <= 0:
        raise ValueError("b_max must be positive")
    p1, p2 = as_point(p1), as_point(p2)
    cfg = _Config(p1, p2)
    specs: list[GeodesicSpec] = []
    if cfg.kind == "origin":
        if cfg.U == 0.0:
            specs.append(GeodesicSpec(p1, 0.0, np.zeros(p1.n)))
        else:
            m_max = int(math.floor(b_max / math.pi + 1e-12))
            specs.extend(_degenerate_spec(p1, m, cfg.U, cfg.sign) for m in range(1, m_max + 1))
    else:
        for b in level_set_roots(cfg.target, cfg.a, b_max, cfg.comp):
            specs.append(cfg.connecting_spec(b))
        if cfg.kind in ("antipodal", "equal") and cfg.U > 0:
            parity = 1 if cfg.kind == "antipodal" else 0
            m = 2 - parity
            while m * math.pi <= b_max * (1 + 1e-12):
                spec = _degenerate_spec(p1, m, cfg.U, cfg.sign)
                # a zero-radius sphere is the level-set root already listed
                if spec is not None and float(spec.c @ spec.c) > 1e-12 * cfg.U * m:
                    specs.append(spec)
                m += 2
    specs.sort(key=lambda s: (abs(s.b), s.degenerate))
    return [(s, geodesic_length(s)) for s in specs]


def boundary_residual(b: float, p1, p2) -> float:
    """``mu(b, a) - 2(u - u1) / R^2``, zero exactly at connecting parameters."""
    p1, p2 = as_point(p1), as_point(p2)
    cfg = _Config(p1, p2)
    if cfg.R2 == 0.0:
        raise DomainError("boundary_residual needs R > 0")
    return float(mu(b, cfg.a, cfg.comp)) - 2 * (p2.u - p1.u) / cfg.R2
