"""Two-layer large-scale fading precoding (LSFP) simulator.

Multi-cell massive MIMO downlink under spatially correlated Rician fading
with random per-block LOS phase shifts. Provides:

- network/channel generation (`lsfp.scenario`)
- closed-form second-order statistics (`lsfp.stats`)
- closed-form and Monte Carlo SINR/SE evaluation (`lsfp.se`)
- FPP-SCA max-product-SINR weight optimization (`lsfp.optimizer`)
- LPC/CPC single-layer baselines (`lsfp.baselines`)
- experiment harness and CLI (`lsfp.harness`, `lsfp.cli`)
"""

from lsfp.config import SimulationConfig
from lsfp.scenario import NetworkScenario, generate_scenario
from lsfp.stats import ClosedFormStatistics, compute_statistics
from lsfp.se import PrecodingWeights, sinr_closed_form, spectral_efficiency

__all__ = [
    "SimulationConfig",
    "NetworkScenario",
    "generate_scenario",
    "ClosedFormStatistics",
    "compute_statistics",
    "PrecodingWeights",
    "sinr_closed_form",
    "spectral_efficiency",
]
