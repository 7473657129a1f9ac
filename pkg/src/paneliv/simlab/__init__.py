from .dgp import DgpConfig, DgpDraw, simulate_dgp
from .mc import McResult, exclusion_violation_demo, monte_carlo_bias, replication_seed

__all__ = [
    "DgpConfig",
    "DgpDraw",
    "McResult",
    "exclusion_violation_demo",
    "monte_carlo_bias",
    "replication_seed",
    "simulate_dgp",
]
