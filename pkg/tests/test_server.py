import json
import math
import struct

import numpy as np
import pytest

from einu.config import EinuConfig
from einu.emotion.labels import EmotionLabel
from einu.errors import BadMagic, EinuError, LengthMismatch, VersionMismatch
from einu.gait.policy import PolicyParams
from einu.server import (
    CHECKPOINT_MAGIC,
    Orchestrator,
    SoundEvent,
    Telemetry,
    VideoFeatureEvent,
    load_policy,
    run_script,
    save_policy,
    turn_to_heading,
)
from einu.sim import generate_terrain
from einu.sim.physics import Pose, nominal_height


# ----------------------------------------------------------------------
# checkpoints


def make_params(seed=3):
    params = PolicyParams.create(5, 2, hidden=8, init_log_std=-0.7, seed=seed)
    # give every array non-trivial float32-representable content
    rng = np.random.default_rng(seed)
    for _, arr in params.named_arrays():
        arr[...] = rng.normal(size=arr.shape).astype(np.float32)
    params.normalizer.count = 17.0
    params.meta = {"task": "walk"}
    return params


def test_checkpoint_round_trip_bitwise(tmp_path):
    path = tmp_path / "p.ckpt"
    params = make_params()
    save_policy(params, path)
    loaded = load_policy(path)
    for (name, a), (_, b) in zip(params.named_arrays(), loaded.named_arrays()):
        np.testing.assert_array_equal(a, b, err_msg=name)
    assert loaded.obs_dim == 5 and loaded.action_dim == 2
    assert loaded.normalizer.count == 17.0
    assert loaded.normalizer.frozen
    assert loaded.meta["task"] == "walk"

    # save -> load is idempotent: a second round trip is bit-identical
    path2 = tmp_path / "p2.ckpt"
    save_policy(loaded, path2, meta=loaded.meta)
    again = load_policy(path2)
    for (name, a), (_, b) in zip(loaded.named_arrays(), again.named_arrays()):
        np.testing.assert_array_equal(a, b, err_msg=name)


def test_checkpoint_magic_and_header(tmp_path):
    path = tmp_path / "p.ckpt"
    save_policy(make_params(), path)
    raw = path.read_bytes()
    assert raw[:8] == CHECKPOINT_MAGIC == b"EINUPOL1"
    (hlen,) = struct.unpack("<I", raw[8:12])
    header = json.loads(raw[12:12 + hlen])
    assert header["version"] == 1
    assert header["obs_dim"] == 5
    assert {e["name"] for e in header["layers"]} >= {"actor.w0", "critic.w0",
                                                     "log_std", "norm.mean"}


def test_checkpoint_bad_magic(tmp_path):
    path = tmp_path / "p.ckpt"
    save_policy(make_params(), path)
    raw = bytearray(path.read_bytes())
    raw[0] ^= 0xFF
    path.write_bytes(bytes(raw))
    with pytest.raises(BadMagic, match="magic"):
        load_policy(path)


def test_checkpoint_truncated_payload(tmp_path):
    path = tmp_path / "p.ckpt"
    save_policy(make_params(), path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-4])
    with pytest.raises(LengthMismatch, match="payload"):
        load_policy(path)


def test_checkpoint_version_mismatch(tmp_path):
    path = tmp_path / "p.ckpt"
    save_policy(make_params(), path)
    raw = path.read_bytes()
    (hlen,) = struct.unpack("<I", raw[8:12])
    header = json.loads(raw[12:12 + hlen])
    header["version"] = 99
    blob = json.dumps(header).encode()
    path.write_bytes(raw[:8] + struct.pack("<I", len(blob)) + blob
                     + raw[12 + hlen:])
    with pytest.raises(VersionMismatch, match="version"):
        load_policy(path)


# ----------------------------------------------------------------------
# steering


def test_turn_to_heading_at_target():
    assert turn_to_heading(1.2, 1.2) == 0.0


def test_turn_to_heading_wraps_short_way():
    # yaw 3.1 to target -3.1 is +0.083 rad across the pi boundary
    cmd = turn_to_heading(3.1, -3.1)
    err = (2 * math.pi - 6.2)
    assert cmd == pytest.approx(2.0 * err)
    assert cmd > 0


def test_turn_to_heading_clamped():
    assert turn_to_heading(0.0, math.pi, max_turn_rate=0.5) == 0.5
    assert turn_to_heading(0.0, -math.pi + 1e-9, max_turn_rate=0.5) == -0.5


# ----------------------------------------------------------------------
# orchestrator


def flat_orchestrator(**kw):
    return Orchestrator(generate_terrain("flat", seed=0), seed=0, **kw)


def test_tick_empty_inbox_one_state_message():
    orch = flat_orchestrator()
    msgs = orch.tick()
    assert len(msgs) == 1
    state = msgs[0]
    assert state["type"] == "state"
    assert state["tick"] == 1
    assert set(state) == {"type", "tick", "time", "base", "joints",
                          "behavior", "emotion", "heading_target"}
    assert set(state["base"]) == {"pos", "rpy"}
    assert len(state["joints"]) == 8
    assert state["behavior"] == "walk"
    assert state["emotion"] is None
    assert state["heading_target"] is None
    assert orch.tick()[0]["tick"] == 2


def test_anger_sound_geometry():
    # robot at origin facing +y; anger source at (2, 0) is at world azimuth 0,
    # i.e. -pi/2 relative to the robot's heading
    orch = flat_orchestrator()
    z = nominal_height(orch.config.physics)
    orch.reset(pose=Pose(position=np.array([0.0, 0.0, z]),
                         rpy=np.array([0.0, 0.0, math.pi / 2])))
    orch.post(SoundEvent(position=(2.0, 0.0), emotion="anger"))
    msgs = orch.tick()
    kinds = [m.get("kind") for m in msgs if m["type"] == "event"]
    assert kinds == ["localized", "arbitrated"]
    localized = msgs[0]
    assert localized["emotion"] == "anger"
    # world azimuth 0 within onset-quantization tolerance
    wrapped = (localized["azimuth"] + math.pi) % (2 * math.pi) - math.pi
    assert abs(wrapped) < math.radians(5.0)
    arbitrated = msgs[1]
    assert arbitrated["behavior"] == "locomote_toward_sound"
    state = msgs[-1]
    assert state["behavior"] == "locomote_toward_sound"
    rel = (state["heading_target"] - math.pi / 2 + math.pi) % (2 * math.pi) - math.pi
    assert rel == pytest.approx(-math.pi / 2, abs=math.radians(5.0))


class OneHotVideoNet:
    """Stub emitting a fixed class distribution."""

    def __init__(self, label: EmotionLabel):
        self.idx = list(EmotionLabel).index(label)

    def forward(self, x, training=False, rng=None):
        probs = np.zeros(7)
        probs[self.idx] = 1.0
        return probs


def test_sadness_audio_beats_happiness_video():
    orch = flat_orchestrator(video_net=OneHotVideoNet(EmotionLabel.HAPPINESS))
    orch.post(SoundEvent(position=(1.0, 1.0), emotion="sadness"))
    orch.post(VideoFeatureEvent(features=np.zeros(16)))
    msgs = orch.tick()
    arb = [m for m in msgs if m.get("kind") == "arbitrated"]
    assert len(arb) == 1
    assert arb[0]["emotion"] == "sadness"          # rank 4 beats rank 6
    assert arb[0]["behavior"] == "locomote_toward_sound"


def test_happiness_video_alone_squats():
    orch = flat_orchestrator(video_net=OneHotVideoNet(EmotionLabel.HAPPINESS))
    orch.post(VideoFeatureEvent(features=np.zeros(16)))
    msgs = orch.tick()
    arb = [m for m in msgs if m.get("kind") == "arbitrated"]
    assert arb[0]["emotion"] == "happiness"
    assert arb[0]["behavior"] == "squat"
    assert msgs[-1]["behavior"] == "squat"


def test_bad_event_is_isolated():
    control = flat_orchestrator()
    orch = flat_orchestrator()
    orch.post(SoundEvent(position=(1.0, 0.0)))  # no emotion, no waveform
    msgs = orch.tick()
    errors = [m for m in msgs if m.get("kind") == "error"]
    assert len(errors) == 1
    assert "emotion hint or a waveform" in errors[0]["message"]
    # world state identical to a run that never saw the event
    ref = control.tick()
    np.testing.assert_array_equal(orch.world.robot.base_position,
                                  control.world.robot.base_position)
    assert msgs[-1] == ref[-1]


def test_video_without_model_is_error():
    orch = flat_orchestrator()
    orch.post(VideoFeatureEvent(features=np.zeros(4)))
    msgs = orch.tick()
    assert [m.get("kind") for m in msgs[:-1]] == ["error"]


def test_pose_requires_playground():
    orch = flat_orchestrator()
    with pytest.raises(EinuError, match="playground"):
        orch.set_pose([1, 1, 0.3], [0, 0, 0])
    play = flat_orchestrator(playground=True)
    play.set_pose([1.0, 2.0, 0.3], [0.0, 0.0, 0.5])
    assert play.world.robot.base_position[0] == 1.0
    assert play.world.robot.base_rpy[2] == pytest.approx(0.5)


def test_pause_freezes_world():
    orch = flat_orchestrator()
    orch.paused = True
    t0 = orch.world.time
    msgs = orch.tick()
    assert orch.world.time == t0
    assert msgs[0]["type"] == "state"
    orch.paused = False
    orch.tick()
    assert orch.world.time > t0


def test_event_log_records_wire_format():
    orch = flat_orchestrator()
    orch.post(SoundEvent(position=(2.0, 0.0), emotion="fear"))
    orch.tick()
    assert len(orch.event_log) == 1
    tick, doc = orch.event_log[0]
    assert doc == {"type": "place_sound", "x": 2.0, "y": 0.0,
                   "emotion": "fear", "waveform": None}


def test_replay_is_deterministic():
    script = [(2, SoundEvent(position=(2.0, 0.0), emotion="anger")),
              (8, SoundEvent(position=(-1.0, 1.0), emotion="neutral"))]
    streams = []
    for _ in range(2):
        orch = flat_orchestrator()
        msgs = run_script(orch, script, ticks=20)
        streams.append(json.dumps(msgs))
    assert streams[0] == streams[1]
    assert '"kind": "localized"' in streams[0]


def test_set_terrain_resets_world():
    orch = flat_orchestrator()
    for _ in range(5):
        orch.tick()
    orch.set_terrain(generate_terrain("uneven", seed=2))
    assert orch.terrain.kind == "uneven"
    assert orch.world.tick == 0


# ----------------------------------------------------------------------
# websocket service


def test_ws_state_stream_and_events():
    from starlette.testclient import TestClient

    from einu.server.ws import create_app

    orch = flat_orchestrator(playground=True)
    app = create_app(orch, realtime=False)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_text(json.dumps({"type": "place_sound", "x": 2.0,
                                     "y": 0.0, "emotion": "anger"}))
            seen = {"state": 0, "localized": 0, "arbitrated": 0}
            for _ in range(200):
                doc = json.loads(ws.receive_text())
                if doc["type"] == "state":
                    seen["state"] += 1
                elif doc["type"] == "event":
                    seen[doc["kind"]] = seen.get(doc["kind"], 0) + 1
                if seen["localized"] and seen["arbitrated"] and seen["state"] > 3:
                    break
            assert seen["localized"] == 1
            assert seen["arbitrated"] == 1
            assert seen["state"] >= 3


def test_ws_unknown_message_reports_error():
    from starlette.testclient import TestClient

    from einu.server.ws import create_app

    orch = flat_orchestrator()
    app = create_app(orch, realtime=False)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_text(json.dumps({"type": "launch_missiles"}))
            for _ in range(500):
                doc = json.loads(ws.receive_text())
                if doc["type"] == "event" and doc["kind"] == "error":
                    assert "launch_missiles" in doc["message"]
                    return
            pytest.fail("error event never delivered")


def test_ws_pose_rejected_without_playground():
    from starlette.testclient import TestClient

    from einu.server.ws import create_app

    orch = flat_orchestrator()
    app = create_app(orch, realtime=False)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_text(json.dumps({"type": "pose", "pos": [0, 0, 0.3],
                                     "rpy": [0, 0, 0]}))
            for _ in range(500):
                doc = json.loads(ws.receive_text())
                if doc["type"] == "event" and doc["kind"] == "error":
                    assert "playground" in doc["message"]
                    return
            pytest.fail("error event never delivered")
