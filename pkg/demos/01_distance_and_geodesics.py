"""
Distances and geodesics in the Grušin plane
===========================================

Horizontal curves may move freely in ``x`` but can only climb the fiber
``u`` at a rate proportional to ``|x|^2``.  Points on the line ``x = 0`` are
therefore far apart in ``u`` even when they are close in the Euclidean sense.
"""
import math

import numpy as np

from grusin import geodesics as geo
from grusin.oracle import path_minimize_distance

# Moving within a fiber costs the Euclidean distance.  Climbing from the
# origin costs sqrt(2 pi u), so the distance is not comparable to |u|.
for p, q in [((1, 0), (3, 0)), ((0, 0), (0, 1)), ((0, 0), (0, 4))]:
    res = geo.cc_distance(p, q)
    print(f"{p} -> {q}: d = {res.d:.6f}  ({res.case})")

# Antipodal endpoints switch formula once the climb is large enough; the
# distance is continuous across the switch at 2u = pi |x|^2.
for u in (0.5, 1.0, math.pi / 2, 2.0, 5.0):
    res = geo.cc_distance((1, 0), (-1, u))
    print(f"(1,0) -> (-1,{u:.4f}): d = {res.d:.6f}  b0 = {res.b0:.4f}  ({res.case})")

# Between two points there are finitely many geodesics below any frequency
# bound.  Equal x gives the roots of mu_hat(b/2) = 2u/R^2 together with a
# sphere of geodesics at b = 2 pi, all of one length.
print("\ngeodesics from (1,0) to (1,6):")
for spec, length in geo.enumerate_geodesics((1, 0), (1, 6), 8.0):
    kind = "sphere family" if spec.degenerate else "isolated"
    print(f"  b = {spec.b:8.5f}  |c| = {np.linalg.norm(spec.c):8.5f}  length = {length:8.5f}  {kind}")

# Sample the shortest one; every sample is a point on a horizontal curve
# and the last one is the target.
res = geo.cc_distance((1, 0), (1, 6))
x, u = geo.sample_geodesic(res.geodesic, np.linspace(0, 1, 6))
for xi, ui in zip(x[:, 0], u):
    print(f"  x = {xi: .5f}  u = {ui: .5f}")

# The brute-force oracle minimizes the energy of horizontal polylines.  It
# only knows the definition of a horizontal curve, and lands just above the
# closed form.
for p, q in [((1, 0), (2, 10)), ((0.5, -0.5), (1.5, 2.0))]:
    exact = geo.cc_distance(p, q).d
    approx = path_minimize_distance(p, q, K=200, restarts=4)
    print(f"{p} -> {q}: closed form {exact:.6f}  polyline {approx:.6f}")
