"""
Two-mode squeezed vacuum and the PPT test
=========================================

Build the two-mode squeezed vacuum for a few squeezing values, read off
the symplectic spectrum of its partial transpose, and watch the Fock
expansion converge.
"""

# %%
import numpy as np

from qlv import gaussian as g

# %%
# The partially transposed spectrum is exp(-2r), exp(+2r); anything below
# one means entanglement.
for r in (0.0, 0.25, 0.5, 1.0):
    state = g.tmsv(r)
    blocks = g.standard_form_blocks(state.covariance)
    pt = g.symplectic_spectrum(blocks, partial_transpose=True)
    print(f"r={r:<5} nu_-={pt.nu_minus:.6f} exp(-2r)={np.exp(-2 * r):.6f} entangled={g.is_entangled(state)}")

# %%
# Photon-number amplitudes fall off geometrically with ratio -tanh(r),
# so stronger squeezing needs a larger cutoff to capture the norm.
for r in (0.5, 1.0, 2.0):
    for n_max in (5, 20, 80):
        fock = g.tmsv_fock_coefficients(r, n_max)
        print(f"r={r} n_max={n_max:<3} norm={fock.norm:.8f}")

# %%
# Cloning one copy into five adds 1.6 units of vacuum noise to every quadrature.
params = g.CloningChannelParams(n_input=1, m_output=5)
copy = g.cloned(g.coherent(1.0, -0.5), params)
print("clone variance", params.sigma_cl)
print(copy.covariance)
