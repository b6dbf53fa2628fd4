"""
Timing-limited positioning accuracy
===================================

A Cramer-Rao style bound on position error from time-of-arrival noise,
and how quantum timing probes would shrink it.
"""

# %%
import numpy as np

from qlv import geometry as geo

timing = geo.TimingModel(1e-6)

# %%
# Spread-out stations give the best bound; a tight cluster is much worse.
for spread in (120.0, 45.0, 20.0):
    angles = np.radians([0.0, spread, 2 * spread])
    pts = 2000.0 * np.column_stack([np.cos(angles), np.sin(angles)])
    bound = geo.crlb_position_std(geo.NetworkGeometry(pts, (0.0, 0.0)), timing)
    print(f"angular spacing {spread:>5.0f} deg  bound {bound:9.2f} m")

# %%
# With one microsecond of timing noise, the bound sits in the hundreds of
# meters.  Quantum probes scale as 1/N and 1/N_p instead of their square roots.
angles = np.radians([0.0, 120.0, 240.0])
g = geo.NetworkGeometry(2000.0 * np.column_stack([np.cos(angles), np.sin(angles)]), (0.0, 0.0))
classical = geo.crlb_position_std(g, timing)
for n_p in (1, 25, 100, 400):
    factor = geo.quantum_scaling_advantage(g.n_stations, n_p)
    print(f"N_p={n_p:>4}  advantage x{factor:6.1f}  -> {classical / factor:8.2f} m")
