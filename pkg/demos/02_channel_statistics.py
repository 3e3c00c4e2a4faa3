"""Statistics of the discretized channel for three scattering functions.

For each model the diagonal power sigma_g2 and the self-interference power
sigma_I2 are computed; their sum never exceeds one. The worst case over
the support square gives m_g and M_g, and for small spreads these follow
the linear slopes returned by taylor_constants.
"""

import math

from fadecap import (BrickRect, PulseSpec, SeparableJakesExp, TwoLevelBrick, extremal_sir, matched_grid,
                     sigma_g2, sigma_I2, taylor_constants)

pulse = PulseSpec(1.02)
grid = matched_grid(pulse)

models = {
    "uniform brick": BrickRect(5e-3, 5e-3),
    "brick with leakage": TwoLevelBrick(5e-3, 5e-3, 1e-3, 2e-2, 2e-2),
    "Jakes x exponential": SeparableJakesExp(4e-3, 1e-3, 8e-3),
}
for name, model in models.items():
    s_g, s_i = sigma_g2(pulse, grid, model), sigma_I2(pulse, grid, model)
    print(f"{name:22s} sigma_g2 = {s_g:.8f}  sigma_I2 = {s_i:.3e}  sum = {s_g + s_i:.8f}")

c_m, c_big = taylor_constants(pulse, grid)
print(f"\nsmall-spread slopes: c_m = {c_m:.4f}, c_M = {c_big:.4f}")
print("spread     1 - m_g        linear      M_g          linear")
for spread in (1e-8, 1e-6, 1e-4):
    half = math.sqrt(spread) / 2
    ext = extremal_sir(pulse, grid, half, half)
    print(f"{spread:8.0e}  {1 - ext.m_g:.4e}  {c_m * spread:.4e}  {ext.M_g:.4e}  {c_big * spread:.4e}")
