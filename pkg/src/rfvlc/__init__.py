"""Effective capacity, delay bounds and queue simulation for a hybrid RF/VLC
indoor downlink."""
from .params import (FadingSample, Geometry, QosSpec, RfParams, VlcParams, db_to_linear,
                     linear_to_db, theta_from_db)
from .capacity import (ApproximationWarning, BlockageModel, EcEstimate, IlluminationSpec, Link,
                       MonteCarloWarning, QuadratureError, effective_capacity_rf,
                       effective_capacity_vlc, effective_capacity_vlc_blockage, select_link)
from .delay import ArrivalSpec, DelayBound, delay_bound, feasibility_range
from .access import AccessConfig, Scheme, per_user_ec
from .queue import (InsufficientTailError, QueueTrace, UnstableQueueWarning,
                    empirical_delay_violation, fit_tail_exponent, simulate_queue)
from .config import ConfigError, Scenario, default_scenario, load, validate_config
from .experiments import SweepResult, run_sweep, write_csv

__version__ = "0.1.0"

__all__ = [
    "FadingSample", "Geometry", "QosSpec", "RfParams", "VlcParams", "db_to_linear",
    "linear_to_db", "theta_from_db", "ApproximationWarning", "BlockageModel", "EcEstimate",
    "IlluminationSpec", "Link", "MonteCarloWarning", "QuadratureError",
    "effective_capacity_rf", "effective_capacity_vlc", "effective_capacity_vlc_blockage",
    "select_link", "ArrivalSpec", "DelayBound", "delay_bound", "feasibility_range",
    "AccessConfig", "Scheme", "per_user_ec", "InsufficientTailError", "QueueTrace",
    "UnstableQueueWarning", "empirical_delay_violation", "fit_tail_exponent", "simulate_queue",
    "ConfigError", "Scenario", "default_scenario", "load", "validate_config", "SweepResult",
    "run_sweep", "write_csv",
]
