"""Emotion labels with fixed priority ranks, arbitration, and the mapping
from a winning emotion to robot behavior and audio-visual feedback."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from ..errors import NoInput, UnknownEmotion

URGENCY_CUTOFF_RANK = 4  # rank <= cutoff means "react by approaching"


class EmotionLabel(enum.Enum):
    """Seven cardinal emotions; lower rank = higher priority."""

    ANGER = 1
    DISGUST = 2
    FEAR = 3
    SADNESS = 4
    SURPRISE = 5
    HAPPINESS = 6
    NEUTRAL = 7

    @property
    def rank(self) -> int:
        return self.value

    @classmethod
    def from_name(cls, name: str) -> "EmotionLabel":
        try:
            return cls[name.upper()]
        except KeyError:
            raise UnknownEmotion(f"unknown emotion label: {name!r}")


@dataclass(frozen=True)
class FeedbackAction:
    sound_clip_id: str
    face_expression_id: str


@dataclass(frozen=True)
class BehaviorCommand:
    kind: str                    # "squat" | "locomote_toward_sound" | "hold"
    feedback: FeedbackAction
    azimuth: float | None = None  # wrapped to [0, 2*pi), locomote only


DEFAULT_FEEDBACK_MAP: dict[EmotionLabel, FeedbackAction] = {
    EmotionLabel.ANGER: FeedbackAction("clip_growl", "face_alert"),
    EmotionLabel.DISGUST: FeedbackAction("clip_whine", "face_disgust"),
    EmotionLabel.FEAR: FeedbackAction("clip_whimper", "face_fear"),
    EmotionLabel.SADNESS: FeedbackAction("clip_soft_whine", "face_sad"),
    EmotionLabel.SURPRISE: FeedbackAction("clip_yip", "face_surprise"),
    EmotionLabel.HAPPINESS: FeedbackAction("clip_happy_bark", "face_happy"),
    EmotionLabel.NEUTRAL: FeedbackAction("clip_pant", "face_neutral"),
}


def arbitrate(audio_emotion: EmotionLabel | None,
              video_emotion: EmotionLabel | None) -> EmotionLabel:
    """Pick the higher-priority (lower-rank) emotion of the two inputs."""
    if audio_emotion is None and video_emotion is None:
        raise NoInput("arbitrate needs at least one emotion")
    if audio_emotion is None:
        return video_emotion
    if video_emotion is None:
        return audio_emotion
    return audio_emotion if audio_emotion.rank <= video_emotion.rank else video_emotion


def feedback_for(emotion: EmotionLabel,
                 mapping: dict[EmotionLabel, FeedbackAction] | None = None) -> FeedbackAction:
    mapping = mapping if mapping is not None else DEFAULT_FEEDBACK_MAP
    if not isinstance(emotion, EmotionLabel):
        raise UnknownEmotion(f"not an emotion label: {emotion!r}")
    try:
        return mapping[emotion]
    except KeyError:
        raise UnknownEmotion(f"no feedback configured for {emotion.name}")


def behavior_for(emotion: EmotionLabel,
                 localized_azimuth: float | None = None,
                 urgency_cutoff: int = URGENCY_CUTOFF_RANK,
                 mapping: dict[EmotionLabel, FeedbackAction] | None = None) -> BehaviorCommand:
    """Urgent emotions approach a localized sound; the rest trigger a squat."""
    fb = feedback_for(emotion, mapping)
    if emotion.rank <= urgency_cutoff:
        if localized_azimuth is not None:
            return BehaviorCommand(kind="locomote_toward_sound", feedback=fb,
                                   azimuth=localized_azimuth % (2.0 * math.pi))
        return BehaviorCommand(kind="hold", feedback=fb)
    return BehaviorCommand(kind="squat", feedback=fb)


def feedback_map_from_config(doc: dict) -> dict[EmotionLabel, FeedbackAction]:
    """Parse the {emotion: {clip, face}} JSON document into a feedback map."""
    out = {}
    for name, entry in doc.items():
        out[EmotionLabel.from_name(name)] = FeedbackAction(
            sound_clip_id=entry["clip"], face_expression_id=entry["face"])
    return out


def feedback_map_to_config(mapping: dict[EmotionLabel, FeedbackAction]) -> dict:
    return {label.name.lower(): {"clip": fb.sound_clip_id, "face": fb.face_expression_id}
            for label, fb in mapping.items()}
