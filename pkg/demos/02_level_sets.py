"""
Level sets of the boundary function
===================================

A geodesic from ``(x1, 0)`` reaches ``(x, u)`` exactly when its frequency
``b`` solves ``mu(b, a) = 2u / (|x1|^2 + |x|^2)``, with ``a`` the shape
parameter of the pair.  On each interval ``(m pi, (m+1) pi)`` the function
comes down from infinity to a single minimum and rises again, so each
branch contributes zero, one or two solutions.
"""
import math

import numpy as np

from grusin import scalar_functions as sf

a = 0.8  # the pair x1 = 1, x = 2
R2, a_check, _ = sf.shape_parameter([1.0], [2.0])
print(f"R^2 = {R2}, a = {a_check}")

# Branch minima grow like (m - 1) pi / 2, which caps the number of roots
# below any target.
for m in range(1, 6):
    bm = sf.critical_point_mu(m, a)
    print(f"branch {m}: minimum at b = {bm:.6f}, mu = {sf.mu(bm, a):.6f}")

# Roots for u = 10, the first is the minimizing geodesic.
target = 2 * 10 / R2
print("\nroots of mu(b, 0.8) = 4:", [round(b, 5) for b in sf.level_set_roots(target, a, 4 * math.pi)])

# A coarse table of mu on the first two branches, with the poles left out.
for b in np.linspace(0.25, 6.0, 12):
    try:
        print(f"  b = {b:5.3f}  mu = {sf.mu(b, a):12.5f}")
    except sf.DomainError:
        print(f"  b = {b:5.3f}  pole")

# At a = 1 the function reduces to mu_hat(b/2): the pole at 2 pi is gone and
# the one at pi remains.  At a = -1 it is mu_tilde(b/2) and the odd poles go.
print("\nmu(2 pi, 1) =", sf.mu(2 * math.pi, 1.0), "  mu(3 pi, -1) =", sf.mu(3 * math.pi, -1.0))
try:
    sf.mu(math.pi, 1.0)
except sf.DomainError as exc:
    print("mu(pi, 1):", exc)
