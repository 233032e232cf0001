"""Phase consistency across trials.

Given N phases (say, the phase of an oscillation at a fixed latency in N
trials), H0 says they are uniform on the circle and H1 says they follow a
von Mises law with unknown direction and concentration.  The evidence
depends on the data only through N and the mean resultant length R.

The interesting feature: at fixed R, more trials do not always mean more
evidence.  For small R the log odds first fall with N (R is about what
chance alone produces, 1/sqrt(N)) and only rise once N R^2 is large.
"""
import numpy as np

from bayesdep.datagen import gen_phase
from bayesdep.experiments import itc_table
from bayesdep.models import n0_curve, vonmises_logr

# From samples
for kappa in (0.0, 0.3, 1.0):
    s = gen_phase("vonmises", 200, seed=5, mu=1.0, kappa=kappa)
    print(f"kappa = {kappa}: N = {s.n}, R = {s.rbar:.3f}, log10 odds = {vonmises_logr(s).logr:.2f}")

# A small table over (R, N)
n_grid = [10, 20, 50, 100, 200, 500, 1000]
table = itc_table(n_grid, [0.05, 0.1, 0.15, 0.2, 0.3, 0.5])
print("\nlog10 odds; columns N =", n_grid)
for r, row, n0 in zip(table.rbar_grid, table.values, table.n0):
    print(f"R = {r:4.2f}: " + " ".join(f"{v:8.2f}" for v in row) + f"   least evidence at N = {n0}")

# Where is the minimum at R = 0.15, on a finer grid?
grid = list(range(10, 401, 10))
n0, values = n0_curve(0.15, grid)
print(f"\nR = 0.15: minimum over N in [10, 400] at N = {n0} (log10 odds {min(values):.2f})")
print("reference curve R = 1/sqrt(N) at that N:", round(1 / np.sqrt(n0), 3))
