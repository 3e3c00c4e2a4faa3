"""Where does fading cost little?

The ratio of the worst-case lower bound to the AWGN upper bound rises with
SNR, stays high over a plateau and collapses once self-interference and
leakage dominate. snr_range locates the plateau edges for a threshold.
"""

from fadecap.analysis import SweepSpec, snr_range, sweep_ratio
from fadecap.bounds import rule_of_thumb

rows = sweep_ratio(SweepSpec(snr_db=tuple(range(-20, 61, 10)), tf=(1.0, 1.02, 1.2), spreads=(1e-4,)))
print("SNR dB   TF=1     TF=1.02  TF=1.2")
by = {(r["tf"], r["snr_db"]): r["ratio"] for r in rows}
for snr in range(-20, 61, 10):
    print(f"{snr:6d}  " + "  ".join(f"{by[(tf, float(snr))]:.4f}" for tf in (1.0, 1.02, 1.2)))

print("\nspread   eps      plateau (ratio >= 0.75)     rule of thumb")
for spread, eps in ((1e-6, 1e-8), (1e-4, 1e-6), (1e-4, 1e-3)):
    rng = snr_range(spread, eps)
    lo, hi = rule_of_thumb(spread, eps)
    span = "empty" if rng is None else f"[{rng.lo_db:7.2f}, {rng.hi_db:6.2f}] dB"
    print(f"{spread:6.0e}  {eps:6.0e}  {span:26s}  rho in ({lo:.0e}, {hi:.0e})")
