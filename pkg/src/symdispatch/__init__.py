"""Optimal symmetric dispatch strategies for agents sharing one slot per step."""

__version__ = "0.1.0"

from .belief import (  # noqa: E402
    BeliefGrid,
    Prescription,
    ZeroLikelihood,
    bayes_update,
    dispatch_probability,
    expected_stage_cost,
    joint_observation_probability,
    snap_to_grid,
)
from .kernels import BACKEND  # noqa: E402
from .model import (  # noqa: E402
    ConfigError,
    ScenarioConfig,
    Urgency,
    load_config,
    resolve_collision,
    sample_private_states,
    stage_cost,
)
from .solver import (  # noqa: E402
    PrescriptionGrid,
    ValueTable,
    bellman_backup,
    export_policy_map,
    prescription_at,
    read_table,
    solve,
    write_table,
)

__all__ = [
    "BACKEND",
    "BeliefGrid",
    "ConfigError",
    "Prescription",
    "PrescriptionGrid",
    "ScenarioConfig",
    "Urgency",
    "ValueTable",
    "ZeroLikelihood",
    "bayes_update",
    "bellman_backup",
    "dispatch_probability",
    "expected_stage_cost",
    "export_policy_map",
    "joint_observation_probability",
    "load_config",
    "prescription_at",
    "read_table",
    "resolve_collision",
    "sample_private_states",
    "snap_to_grid",
    "solve",
    "stage_cost",
    "write_table",
]
