from .checkpoint import save_policy, load_policy, CHECKPOINT_MAGIC
from .orchestrator import (
    Orchestrator,
    SoundEvent,
    VideoFeatureEvent,
    Telemetry,
    turn_to_heading,
    run_script,
)

__all__ = [
    "save_policy",
    "load_policy",
    "CHECKPOINT_MAGIC",
    "Orchestrator",
    "SoundEvent",
    "VideoFeatureEvent",
    "Telemetry",
    "turn_to_heading",
    "run_script",
]
