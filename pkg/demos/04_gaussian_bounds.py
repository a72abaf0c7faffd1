"""
Checking the Gaussian upper bound
=================================

The kernel is bounded by ``C t^(-n/2-1) min(1 + d/|x+xi|, 1 + d^2/4t)^alpha
exp(-d^2/4t)`` with a constant ``C`` that is not known explicitly.  A sweep
over a fixed grid measures the ratio and locates its worst point.  Set
``GRUSIN_THREADS`` to spread the sweep over several processes.
"""
from grusin import bounds

for n in (1, 2, 3, 4):
    grid = bounds.seed_grid(n, small=True)
    rep = bounds.verify_bound_grid(grid, reference_ratio=1.01 * bounds.SEED_SUP_RATIO[n])
    wp = rep.worst_point
    print(f"n = {n}: {rep.grid_size} points, sup ratio {rep.sup_ratio:.5f} at "
          f"x = {wp.x}, xi = {wp.xi}, u = {wp.u}; decay violations {rep.violations_of_decay}")

# The ratio is a function of scale-free quantities, so rescaling the whole
# grid parabolically changes nothing but rounding.
grid = bounds.seed_grid(2, small=True)
for s in (0.25, 1.0, 4.0):
    print(f"scale {s}: sup ratio {bounds.verify_bound_grid(grid.rescaled(s)).sup_ratio:.12f}")

# The same kind of estimate for the scaled integral, using the better of a
# few contour shifts at every point.
# On the antipodal line x = -xi the best shift b0 = pi is off limits, so the
# ratio there sits well below its value at points just off the line.
for gap in (0.0, 1e-7, 1e-3):
    r = bounds.shift_bound_ratio([-0.0254], [0.0254 + gap], 0.1457)
    print(f"shift-bound ratio {gap:g} off the antipodal line: {r:.6f}")
print("calibrated constants:", bounds.SHIFT_BOUND_CONSTANT)
