"""Simulation configuration with JSON loading and paper-style defaults."""

import dataclasses
import json
from dataclasses import dataclass


@dataclass(frozen=True)
class OptimizerOptions:
    """Knobs for the FPP-SCA weight optimizer.

    penalty=None means "use 1e3 * L * K", resolved when the optimizer runs.
    """

    penalty: float | None = None
    max_iterations: int = 50
    objective_tolerance: float = 1e-4
    slack_tolerance: float = 1e-8
    solver_tolerance: float = 1e-9

    def validate(self):
        if self.penalty is not None and self.penalty <= 0:
            raise ValueError("penalty must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        for name in ("objective_tolerance", "slack_tolerance", "solver_tolerance"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class SimulationConfig:
    """Network and experiment parameters.

    Defaults reproduce the 4-cell urban-microcell setup: 150 m square cells,
    M=200 antennas, 0.05 W pilot power, 2 W downlink power budget per BS,
    -96 dBm noise. All powers are in watts, distances in meters.
    """

    L: int = 4
    K: int = 6
    M: int = 200
    cell_side: float = 150.0
    min_bs_distance: float = 20.0
    eta: float = 0.05
    rho_d: float = 2.0
    sigma2: float = 10 ** (-12.6)  # -96 dBm in W
    tau_p: int | None = None  # None -> K (pilots are reused across cells)
    tau_c: int = 200
    seed: int = 0
    mc_realizations: int = 200
    n_setups: int = 100
    # channel-model constants (deterministic, no shadow fading)
    pathloss_intercept_db: float = -30.5
    pathloss_exponent_db: float = 36.7
    rician_offset_db: float = 13.0
    rician_slope_db_per_m: float = 0.03
    asd_deg: float = 10.0
    antenna_spacing: float = 0.5  # in wavelengths
    optimizer: OptimizerOptions = OptimizerOptions()

    def __post_init__(self):
        if self.tau_p is None:
            object.__setattr__(self, "tau_p", self.K)
        self.validate()

    def validate(self):
        if self.L < 1:
            raise ValueError("L must be >= 1")
        if self.K < 0:
            raise ValueError("K must be >= 0")
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if self.K > 0 and self.tau_p != self.K:
            raise ValueError("tau_p must equal K (shared orthogonal pilot set)")
        if self.tau_p >= self.tau_c:
            raise ValueError("tau_p must be < tau_c")
        for name in ("eta", "rho_d", "sigma2"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.cell_side <= 0:
            raise ValueError("cell_side must be positive")
        if self.min_bs_distance < 0:
            raise ValueError("min_bs_distance must be nonnegative")
        self.optimizer.validate()

    def with_users(self, K: int) -> "SimulationConfig":
        """Copy of this config with a different per-cell user count (tau_p follows K)."""
        return dataclasses.replace(self, K=K, tau_p=K)

    @classmethod
    def from_dict(cls, data: dict) -> "SimulationConfig":
        data = dict(data)
        opt = data.pop("optimizer", None)
        known = {f.name for f in dataclasses.fields(cls)} - {"optimizer"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        kwargs = dict(data)
        if opt is not None:
            opt_known = {f.name for f in dataclasses.fields(OptimizerOptions)}
            bad = set(opt) - opt_known
            if bad:
                raise ValueError(f"unknown optimizer fields: {sorted(bad)}")
            kwargs["optimizer"] = OptimizerOptions(**opt)
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path) -> "SimulationConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)
