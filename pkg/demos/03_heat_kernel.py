"""
Evaluating the heat kernel
==========================

The kernel is a Fourier integral in the fiber frequency.  Along the real
axis its integrand oscillates and cancels down to a value of size
``exp(-d^2 / 4t)``.  Moving the path of integration into the complex plane
removes the cancellation.
"""
import math

from grusin.geodesics import cc_distance
from grusin.heat_kernel import KernelConfig, QuadratureError, heat_kernel, mehler_kernel
from grusin.oracle import direct_kernel_quadrature

t = 0.25
auto = KernelConfig(1)
flat = KernelConfig(1, shift_policy="none")

# Near the diagonal every method agrees, including QUADPACK on the real axis.
for x, xi, u in [(0.0, 0.0, 1.0), (0.3, -0.2, 0.5)]:
    a = heat_kernel(t, [x], [xi], u, auto)
    b = heat_kernel(t, [x], [xi], u, flat)
    c = direct_kernel_quadrature(t, [x], [xi], u)
    print(f"K({x}, {xi}, {u}) = {a.value:.12e} (shift {a.shift_used:.3f}), {b.value:.12e}, {c:.12e}")

# Further out the unshifted line fails while the shifted one still
# resolves a tiny value.  The ratio to exp(-d^2/4t) stays moderate.
for u in (2.0, 5.0, 10.0):
    d = cc_distance((1.0, 0.0), (1.0, u)).d
    k = heat_kernel(t, [1.0], [1.0], u, auto)
    try:
        heat_kernel(t, [1.0], [1.0], u, flat)
        flat_status = "converged"
    except QuadratureError as exc:
        flat_status = f"failed ({exc})"
    gauss = math.exp(-d * d / (4 * t)) * t ** -1.5
    print(f"u = {u:4.1f}: K = {k.value:.4e}, K / Gaussian = {k.value / gauss:.4f}, unshifted {flat_status}")

# Each Fourier slice is a Mehler kernel, and the zero frequency slice is the
# Euclidean heat kernel.
print("slice at lambda = 0:", mehler_kernel(t, 0.0, [0.3], [0.1]), (4 * math.pi * t) ** -0.5 * math.exp(-0.04 / (4 * t)))
