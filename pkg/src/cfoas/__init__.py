"""Cell-free massive MIMO-OFDM with opportunistic AP selection.

Simulates the uplink and downlink spectral efficiency of cell-free (CF),
user-centric (UC), single-user (SU-OAS) and multi-user (MU-OAS)
opportunistic AP selection, with closed-form SINRs and a link-level oracle.
"""

from .config import SystemConfig, Topology
from .estimation import EstimationStats, draw_rb_channel
from .experiment import SeReport, SweepResult, run_drop, run_experiment, sweep
from .propagation import large_scale_matrix, path_loss
from .selection import SelectionPlan, build_plan
from .sinr import (
    PowerAllocation,
    SinrInputs,
    downlink_sinr_benchmark,
    downlink_sinr_oas,
    full_power_allocation,
    spectral_efficiency,
    uplink_sinr,
)

__version__ = "0.1.0"

__all__ = [
    "EstimationStats", "PowerAllocation", "SeReport", "SelectionPlan", "SinrInputs",
    "SweepResult", "SystemConfig", "Topology", "build_plan", "downlink_sinr_benchmark",
    "downlink_sinr_oas", "draw_rb_channel", "full_power_allocation", "large_scale_matrix",
    "path_loss", "run_drop", "run_experiment", "spectral_efficiency", "sweep", "uplink_sinr",
]
