"""Gradient-free distributed Nash equilibrium seeking over directed graphs."""

from .exceptions import *  # noqa: F401,F403
from .game import (ActionSet, GameSpec, QuadraticGame, derived_constants, eval_cost, hvac_game,
                   lipschitz_bounds, monotonicity_constant, project, solve_quadratic_ne)
from .graph import (DiGraph, SpectralCertificate, balance_weights, is_strongly_connected, ring,
                    spectral_certificate, spectral_radius, successor_cycle, tilde_matrix, topology,
                    validate_deltas, validate_doubly_stochastic)
from .harness import (ExperimentSpec, GameConfig, GraphConfig, compare, consensus_error, relative_error,
                      run_experiment, sweep)
from .oracle import RandomSource, SmoothingSchedule, estimate_smoothed_grad, gf_oracle, second_moment_estimate
from .seeker import RunConfig, SeekerState, StepSchedule, admissible_alpha, gradient_step, run, step

__version__ = "0.1.0"
