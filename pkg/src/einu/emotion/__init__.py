from .labels import (
    EmotionLabel,
    FeedbackAction,
    BehaviorCommand,
    DEFAULT_FEEDBACK_MAP,
    URGENCY_CUTOFF_RANK,
    arbitrate,
    behavior_for,
    feedback_for,
    feedback_map_from_config,
    feedback_map_to_config,
)
from .nets import AudioEmotionNet, VideoEmotionNet, N_CLASSES, MFCC_DIM
from .training import (
    Adam,
    TrainConfig,
    TrainResult,
    train_toy,
    make_audio_clusters,
    make_video_clusters,
    class_center_features,
)

__all__ = [
    "EmotionLabel",
    "FeedbackAction",
    "BehaviorCommand",
    "DEFAULT_FEEDBACK_MAP",
    "URGENCY_CUTOFF_RANK",
    "arbitrate",
    "behavior_for",
    "feedback_for",
    "feedback_map_from_config",
    "feedback_map_to_config",
    "AudioEmotionNet",
    "VideoEmotionNet",
    "N_CLASSES",
    "MFCC_DIM",
    "Adam",
    "TrainConfig",
    "TrainResult",
    "train_toy",
    "make_audio_clusters",
    "make_video_clusters",
    "class_center_features",
]
