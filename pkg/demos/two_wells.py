"""
Two wells, two spikes
=====================

V has two Gaussian dips on [0,2]×[0,1].  Γ = V for N=2, p=3, so its
minima sit in the dips; continuation from each minimum gives a separate
spike solution that stays put as ε shrinks.
"""

import numpy as np
from spikelab import (Box, Constant, GaussianBumps, ProblemData, build_grid, continuation,
                      find_critical_points, solve_ground_state)

V = GaussianBumps(1.5, [-0.8, -0.8], [[0.6, 0.5], [1.4, 0.5]], [0.2, 0.2])
data = ProblemData(2, 3.0, Constant(1.0), V, Box((0, 0), (2, 1)))

ax0, ax1 = np.linspace(0.1, 1.9, 9), np.linspace(0.1, 0.9, 5)
seeds = np.stack(np.meshgrid(ax0, ax1, indexing="ij"), -1).reshape(-1, 2)
crit = find_critical_points(data, seeds)
for c in crit:
    print(c.kind, c.location.round(5), "eigs", c.hessian_eigs.round(3))

base = solve_ground_state(2, 3.0)
grid = build_grid(data.domain, (257, 129))
ladder = [0.2, 0.15, 0.1, 0.075, 0.05]
for c in crit:
    if c.kind != "min":
        continue
    sols = continuation(data, grid, c.location, ladder, base)
    drift = [np.linalg.norm(s.location - c.location) / grid.h for s in sols]
    print("from", c.location.round(4), "distance in grid spacings:", np.round(drift, 3))
