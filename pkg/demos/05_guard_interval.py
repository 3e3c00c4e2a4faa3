"""Guard interval that keeps inter-block spill-over below a target.

The pulse decays like 1/t**2, so the spill-over bound falls like 1/K_g and
tighter targets need proportionally longer guards.
"""

from fadecap import PulseSpec, decay_constants, guard_slots, matched_grid

pulse = PulseSpec(1.02)
grid = matched_grid(pulse)
c_decay, t0 = decay_constants(pulse)
print(f"|g(t)| <= {c_decay:.3f} / t^2 for t >= {t0:.4f}")
for eta in (1e-2, 1e-4, 1e-6):
    cfg = guard_slots(pulse, grid, eta, 3)
    print(f"eta = {eta:.0e}: K_g = {cfg.guard_slots:>10d}  bound = {cfg.bound:.3e}")
