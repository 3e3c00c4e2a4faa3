"""Noncoherent capacity bounds for Rayleigh-fading underspread WSSUS channels."""

__version__ = "0.1.0"

from .ambiguity import AdaptivePolicy, ambiguity, ambiguity_lattice_tail, lattice_sum
from .bounds import (BoundResult, approx_lb, awgn_upper, awgn_upper_approx, expected_log,
                     lower_bound_cor2, lower_bound_thm1, rule_of_thumb)
from .channel_stats import (ChannelStats, channel_stats, corr, extremal_sir, matrix_psd, scalar_psd,
                            sigma_g2, sigma_I2, taylor_constants)
from .errors import ConvergenceError, PreconditionError
from .pulse import (GuardConfig, PulseSpec, WHGrid, decay_constants, eval_freq, eval_time, guard_slots,
                    matched_grid, moments, pulse_for_grid, tight_frame_residual)
from .scattering import (BrickRect, SeparableJakesExp, TwoLevelBrick, UnderspreadParams, canonical_square,
                         grid_match, leakage)
