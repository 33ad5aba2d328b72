"""einu: quadruped simulator with gait learning, sound localization, and
emotion-driven behavior, steerable from a web console."""

__version__ = "0.1.0"
