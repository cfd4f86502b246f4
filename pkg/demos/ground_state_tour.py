"""
The radial ground state and its moments
=======================================

Solve -ΔŪ + Ū = Ū^p for a few (N, p) and print the constants that enter
the reduced energy.  The 1D case is checked against its closed form.
"""

import numpy as np
from spikelab import profile_moments, solve_ground_state

# 1D first: the profile is a sech power, so the shooting can be checked outright
prof = solve_ground_state(1, 3.0)
r = np.linspace(0, 20, 2001)
print("1D p=3: u0 =", prof.u0, " max error vs sqrt(2) sech(r):",
      np.abs(prof(r) - np.sqrt(2) / np.cosh(r)).max())

# the moments enter through c0 = (1/2 - 1/(p+1)) ∫Ū^{p+1}
for N, p in [(1, 3.0), (2, 3.0), (3, 3.0), (3, 2.0)]:
    m = profile_moments(solve_ground_state(N, p))
    print(f"N={N} p={p}: c0_bar={m.c0_bar:.6f}  m_grad2+m_sq-m_pp1 (rel)={m.pohozaev_defect:.1e}")

# the tail decays like r^{-(N-1)/2} e^{-r}
prof3 = solve_ground_state(3, 3.0)
rr = np.array([6.0, 8.0, 10.0])
print("3D tail, u·r·e^r (should level off):", prof3(rr) * rr * np.exp(rr))
