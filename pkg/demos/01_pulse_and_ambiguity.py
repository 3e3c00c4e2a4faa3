"""Root-raised-cosine prototype on its matched lattice.

Builds the pulse for a grid product slightly above one, checks that its
time-frequency shifts are orthonormal and that the lattice is a tight frame,
and shows how much of |A|**2 leaks onto the lattice when the channel
shifts the pulse a little.
"""

import numpy as np

from fadecap import PulseSpec, ambiguity, ambiguity_lattice_tail, matched_grid, moments, tight_frame_residual

pulse = PulseSpec(1.02)
grid = matched_grid(pulse)
print(f"grid T = F = {grid.T:.6f}, rolloff {pulse.rolloff:.3f}")

k, n = np.meshgrid(np.arange(-3, 4), np.arange(-3, 4), indexing="ij")
mask = (k != 0) | (n != 0)
print("largest |A| at nonzero lattice points:", np.abs(ambiguity(pulse, k[mask] * grid.T, n[mask] * grid.F)).max())

f = np.linspace(-1, 1, 2001)
print("tight-frame residual:", np.abs(tight_frame_residual(pulse, 0, f)).max())

d_t2, d_f2 = moments(pulse)
print(f"second moments: time {d_t2:.4f}, frequency {d_f2:.6f}")

print("\nshift (tau = nu)   |A|^2          lattice tail S_g")
for s in (1e-4, 1e-3, 1e-2):
    print(f"{s:8.0e}       {abs(ambiguity(pulse, s, s)) ** 2:.10f}   {float(ambiguity_lattice_tail(pulse, grid, s, s)):.3e}")
